//! Independent zero search on the cosine series itself, and the product
//! factorization residual.

use num_complex::Complex;

use super::{ccos, csin, precision_of, ExtractError, ZeroSet};
use crate::partition::{cabs, MagnetizationWeights};
use crate::real::Real;

/// Sign-change bisection of `F(x) = Σ w_M cos(Mx)` on `(0, π/2)`, with the
/// grid refined fourfold until `expected_count` zeros are isolated.
/// For odd `n` the function scanned is `F(x)/cos x`.
pub fn direct_zero_scan<T: Real>(
    w: &MagnetizationWeights<T>,
    expected_count: usize,
    tol: f64,
) -> Result<ZeroSet<T>, ExtractError> {
    let n = w.n();
    let odd = n % 2 == 1;
    let series = w.series();
    let abs_scale = series.sum();
    let bound = (w.rel_err() + T::from_i64(4 * (n as i64 + 2)) * T::unit_roundoff()) * abs_scale;
    let f = |x: T| -> (T, T) {
        let v = series.eval_real(x);
        if odd {
            let c = x.cos();
            (v / c, bound / c)
        } else {
            (v, bound)
        }
    };

    let quarter_pi = T::frac_pi_2() * T::half();
    let pi = T::pi();
    let mut nodes = (16 * (expected_count + 1)).max(64);
    let mut found = 0;
    for _ in 0..6 {
        let last = if odd { nodes - 1 } else { nodes };
        let certain: Vec<(T, bool)> = (0..=last)
            .filter_map(|i| {
                let x = quarter_pi * (T::one() - (pi * T::from_i64(i as i64) / T::from_i64(nodes as i64)).cos());
                let (v, b) = f(x);
                (v.abs() > b).then_some((x, v > T::zero()))
            })
            .collect();
        let brackets: Vec<(T, T, bool)> = certain
            .windows(2)
            .filter(|p| p[0].1 != p[1].1)
            .map(|p| (p[0].0, p[1].0, p[0].1))
            .collect();
        found = brackets.len();
        if found == expected_count {
            return Ok(finish(w, &brackets, &f, T::from_f64(tol), nodes));
        }
        nodes *= 4;
    }
    Err(ExtractError::ScanMismatch {
        found,
        expected: expected_count,
    })
}

fn finish<T: Real>(
    w: &MagnetizationWeights<T>,
    brackets: &[(T, T, bool)],
    f: &dyn Fn(T) -> (T, T),
    tol: T,
    nodes: usize,
) -> ZeroSet<T> {
    let series = w.series();
    let half = T::half();
    let z0 = series.sum();
    let mut x = Vec::new();
    let mut x_tol = Vec::new();
    let mut residuals = Vec::new();
    for &(mut lo, mut hi, lo_positive) in brackets {
        for _ in 0..400 {
            if hi - lo <= tol {
                break;
            }
            let mid = half * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let (v, b) = f(mid);
            if v.abs() <= b {
                break;
            }
            if (v > T::zero()) == lo_positive {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut r = half * (lo + hi);
        for _ in 0..60 {
            let d = series.eval_real_derivative(r);
            if d == T::zero() {
                break;
            }
            let step = series.eval_real(r) / d;
            let next = r - step;
            if !(next >= lo && next <= hi) {
                break;
            }
            r = next;
            if step.abs() <= T::unit_roundoff() * (T::one() + T::one()) {
                break;
            }
        }
        x.push(r);
        x_tol.push((hi - lo).to_f64());
        residuals.push((series.eval_real(r).abs() / z0).to_f64());
    }
    if w.n() % 2 == 1 {
        x.push(T::frac_pi_2());
        x_tol.push(0.0);
        residuals.push(0.0);
    }
    let y = x.iter().map(|&v| {
        let s = v.sin();
        s * s
    });
    let y: Vec<T> = y.collect();
    ZeroSet {
        n: w.n(),
        multiplicity_certified_simple: x.windows(2).all(|p| p[0] < p[1]),
        x,
        y,
        x_tol,
        residuals,
        precision: precision_of::<T>(),
        nodes,
    }
}

/// Largest `|Z(x) - Z(0) [cos x] ∏ (y_j - sin²x)/y_j| / |Z(0)|` over the
/// samples.
pub fn factorization_residual<T: Real>(w: &MagnetizationWeights<T>, zs: &ZeroSet<T>, samples: &[Complex<T>]) -> T {
    let z0 = w.series().sum();
    let odd = w.n() % 2 == 1;
    let mut worst = T::zero();
    for &x in samples {
        let s = csin(x);
        let s2 = s * s;
        let mut prod = Complex::new(z0, T::zero());
        for &yj in zs.interior_y() {
            prod = prod * (Complex::new(yj, T::zero()) - s2) / yj;
        }
        if odd {
            prod = prod * ccos(x);
        }
        let r = cabs(w.evaluate(x) - prod) / z0;
        if r > worst {
            worst = r;
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CouplingGraph;
    use crate::partition::{curie_weiss_weights, magnetization_weights};
    use crate::trigpoly::{solve_zeros_in, WeightSource, DEFAULT_TOL};

    #[test]
    fn single_spin_scan() {
        let g = CouplingGraph::new(1, &[], None).unwrap();
        let w = magnetization_weights::<f64>(&g, 0.0).unwrap();
        let zs = direct_zero_scan(&w, 0, DEFAULT_TOL).unwrap();
        assert_eq!(zs.x, vec![std::f64::consts::FRAC_PI_2]);
    }

    #[test]
    fn scan_agrees_with_polynomial_path() {
        let g = CouplingGraph::new(
            6,
            &[(0, 1, 0.4), (1, 2, 0.9), (2, 3, 0.2), (3, 4, 1.1), (4, 5, 0.5), (0, 3, 0.7)],
            Some((1, 2)),
        )
        .unwrap();
        let src = WeightSource::Graph { graph: &g, t: 0.3 };
        let a = solve_zeros_in::<f64>(&src, DEFAULT_TOL).unwrap();
        let w = src.weights::<f64>().unwrap();
        let b = direct_zero_scan(&w, 3, DEFAULT_TOL).unwrap();
        for (p, q) in a.x.iter().zip(&b.x) {
            assert!((p - q).abs() <= 1e-10);
        }
    }

    #[test]
    fn factorization_trivial_points() {
        let w = curie_weiss_weights::<f64>(5, 0.4);
        let zs = solve_zeros_in::<f64>(&WeightSource::CurieWeiss { n: 5, t: 0.4 }, DEFAULT_TOL).unwrap();
        assert_eq!(factorization_residual(&w, &zs, &[Complex::new(0.0, 0.0)]), 0.0);
        let at_zeros: Vec<_> = zs.x.iter().map(|&x| Complex::new(x, 0.0)).collect();
        assert!(factorization_residual(&w, &zs, &at_zeros) <= 1e-10);
        let off = [Complex::new(0.7, 0.3), Complex::new(-1.1, 0.9), Complex::new(1.9, -0.5)];
        assert!(factorization_residual(&w, &zs, &off) <= 1e-9);
    }
}
