//! Lee-Yang circle check in the fugacity variable `z = e^{-2ix}`.
//!
//! `e^{-ixn} Σ_M w_M e^{ixM} = Σ_k w_{n-2k} z^k`, a self-reciprocal
//! polynomial of degree `n` whose roots must lie on `|z| = 1`.

use num_complex::Complex;

use super::ZeroSet;
use crate::partition::{cabs, MagnetizationWeights};
use crate::real::Real;

/// `a_k = w_{n-2k}` for `k = 0..=n`.
pub fn fugacity_coefficients<T: Real>(w: &MagnetizationWeights<T>) -> Vec<T> {
    let n = w.n() as i64;
    (0..=n).map(|k| w.weight(n - 2 * k)).collect()
}

fn horner<T: Real>(coeffs: &[T], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let zero = Complex::new(T::zero(), T::zero());
    let mut p = zero;
    let mut dp = zero;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + Complex::new(c, T::zero());
    }
    (p, dp)
}

/// All complex roots of a real polynomial (increasing powers) by
/// Aberth-Ehrlich iteration with a Newton polish.
pub fn aberth_roots<T: Real>(coeffs: &[T]) -> Vec<Complex<T>> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.len() > 1 && *coeffs.last().unwrap() == T::zero() {
        coeffs.pop();
    }
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let radius = T::from_f64(1.1);
    let two_pi = T::pi() + T::pi();
    let mut z: Vec<Complex<T>> = (0..deg)
        .map(|k| {
            let a = two_pi * T::from_i64(k as i64) / T::from_i64(deg as i64) + T::from_f64(0.4);
            Complex::new(radius * a.cos(), radius * a.sin())
        })
        .collect();
    let eps = T::unit_roundoff() * T::from_f64(4.0);
    let one = Complex::new(T::one(), T::zero());
    for _ in 0..1000 {
        let mut converged = true;
        for k in 0..deg {
            let (p, dp) = horner(&coeffs, z[k]);
            if cabs(p) == T::zero() {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex::new(T::zero(), T::zero());
            for j in 0..deg {
                if j != k {
                    s = s + one / (z[k] - z[j]);
                }
            }
            let step = ratio / (one - ratio * s);
            z[k] = z[k] - step;
            if cabs(step) > eps * cabs(z[k]).max(T::one()) {
                converged = false;
            }
        }
        if converged {
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&coeffs, *zk);
            if cabs(dp) == T::zero() {
                break;
            }
            *zk = *zk - p / dp;
        }
    }
    z
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircleCheck {
    pub roots: Vec<Complex<f64>>,
    /// `max ||z| - 1|`.
    pub max_radius_deviation: f64,
    /// Largest distance between a principal zero image `e^{∓2ix_k}` and its
    /// nearest unused root.
    pub max_match_distance: f64,
}

pub fn circle_check<T: Real>(w: &MagnetizationWeights<T>, zs: &ZeroSet<T>) -> CircleCheck {
    let roots = aberth_roots(&fugacity_coefficients(w));
    let max_radius_deviation = roots
        .iter()
        .map(|&r| (cabs(r) - T::one()).abs().to_f64())
        .fold(0.0, f64::max);

    let mut targets = Vec::new();
    for &x in zs.interior() {
        let (s, c) = (x + x).sin_cos();
        targets.push(Complex::new(c, -s));
        targets.push(Complex::new(c, s));
    }
    if w.n() % 2 == 1 {
        targets.push(Complex::new(-T::one(), T::zero()));
    }
    let mut used = vec![false; roots.len()];
    let mut max_match_distance: f64 = 0.0;
    for tgt in targets {
        let best = roots
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, &r)| (i, cabs(r - tgt).to_f64()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((i, d)) => {
                used[i] = true;
                max_match_distance = max_match_distance.max(d);
            }
            None => max_match_distance = f64::INFINITY,
        }
    }
    CircleCheck {
        roots: roots.iter().map(|r| Complex::new(r.re.to_f64(), r.im.to_f64())).collect(),
        max_radius_deviation,
        max_match_distance,
    }
}
