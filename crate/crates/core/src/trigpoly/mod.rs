//! Reduction of the cosine series to a polynomial in `y = sin²x` and
//! extraction of the principal zeros.
//!
//! For even `n` the series equals `P(y)`; for odd `n` it equals
//! `cos x · P(y)`, so `π/2` is always a zero and the remaining zeros are the
//! roots of `P` in `(0, 1)`.

mod fugacity;
mod roots;
mod scan;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::partition::MagnetizationWeights;
use crate::real::{Precision, Real};

pub use fugacity::{aberth_roots, circle_check, fugacity_coefficients, CircleCheck};
pub use roots::{
    degenerate_zero_set, extract_zeros, extract_zeros_with_nodes, solve_zeros, solve_zeros_as, solve_zeros_in, ExtractError,
    SolveOptions, WeightSource, DEFAULT_TOL,
};
pub use scan::{direct_zero_scan, factorization_residual};

/// `Z(x) = e^{log_scale} · [cos x] · P(sin²x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinSquaredPoly<T> {
    n: usize,
    coeffs: Vec<T>,
    coeff_err: Vec<T>,
    odd_parity: bool,
    log_scale: T,
}

impl<T: Real> SinSquaredPoly<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients in increasing powers of `y`.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Absolute error bounds of the coefficients, inherited from the weights
    /// and the reduction.
    pub fn coeff_errors(&self) -> &[T] {
        &self.coeff_err
    }

    pub fn odd_parity(&self) -> bool {
        self.odd_parity
    }

    pub fn log_scale(&self) -> T {
        self.log_scale
    }

    pub fn eval(&self, y: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * y + c)
    }

    pub fn derivative(&self, y: T) -> T {
        let mut acc = T::zero();
        for (i, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * y + c * T::from_i64(i as i64);
        }
        acc
    }

    /// Value at `y in [0, 1]` and a rigorous-in-spirit bound on its error,
    /// covering both coefficient errors and Horner rounding.
    pub fn eval_with_bound(&self, y: T) -> (T, T) {
        let d = self.degree();
        let gamma = T::from_i64(4 * (d as i64 + 2)) * T::unit_roundoff();
        let mut value = T::zero();
        let mut bound = T::zero();
        let ya = y.abs();
        for i in (0..=d).rev() {
            value = value * y + self.coeffs[i];
            bound = bound * ya + self.coeff_err[i] + gamma * self.coeffs[i].abs();
        }
        (value, bound + bound)
    }

    pub fn eval_complex(&self, y: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * y + Complex::new(c, T::zero()))
    }
}

/// Converts the magnetization weights into `P(y)` through the recurrence
/// in `u = cos 2x = 1 - 2y`:
/// `cos 2(j+1)x = 2u cos 2jx - cos 2(j-1)x` for even `n` and
/// `cos(2j+3)x / cos x = 2u cos(2j+1)x / cos x - cos(2j-1)x / cos x` for odd `n`.
pub fn cosine_to_poly<T: Real>(w: &MagnetizationWeights<T>) -> SinSquaredPoly<T> {
    let n = w.n();
    let d = n / 2;
    let odd = n % 2 == 1;
    let two = T::one() + T::one();
    let four = two + two;

    let mut basis: Vec<Vec<T>> = Vec::with_capacity(d + 1);
    basis.push(vec![T::one()]);
    if d >= 1 {
        basis.push(vec![T::one(), if odd { -four } else { -two }]);
    }
    for j in 1..d {
        let (prev, cur) = (&basis[j - 1], &basis[j]);
        let mut next = vec![T::zero(); j + 2];
        for (i, &c) in cur.iter().enumerate() {
            next[i] += two * c;
            next[i + 1] -= four * c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        basis.push(next);
    }

    let series = w.series();
    let u = T::unit_roundoff();
    let per_term = w.rel_err() + T::from_i64(d as i64 + 4) * u;
    let mut coeffs = vec![T::zero(); d + 1];
    let mut coeff_err = vec![T::zero(); d + 1];
    for (k, &wk) in series.coeffs().iter().enumerate() {
        let m = series.magnetization(k);
        let mult = if m == 0 { T::one() } else { two };
        let j = d - k;
        for (i, &b) in basis[j].iter().enumerate() {
            coeffs[i] += mult * wk * b;
            coeff_err[i] += mult * wk * b.abs() * per_term;
        }
    }
    SinSquaredPoly {
        n,
        coeffs,
        coeff_err,
        odd_parity: odd,
        log_scale: w.logscale(),
    }
}

/// Principal zeros in `(0, π/2]`, ascending, with `π/2` last for odd `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet<T> {
    pub n: usize,
    pub x: Vec<T>,
    pub y: Vec<T>,
    /// Propagated accuracy of each `x_k`.
    pub x_tol: Vec<f64>,
    /// `|P(y_k)| / P(0)`.
    pub residuals: Vec<f64>,
    pub multiplicity_certified_simple: bool,
    pub precision: Precision,
    pub nodes: usize,
}

impl<T: Real> ZeroSet<T> {
    /// Zeros strictly inside `(0, π/2)`; excludes the fixed odd-parity zero.
    pub fn interior(&self) -> &[T] {
        &self.x[..self.n / 2]
    }

    pub fn interior_y(&self) -> &[T] {
        &self.y[..self.n / 2]
    }

    /// Smallest spacing in `0 < x_1 < … < π/2`, sentinels included.
    pub fn min_gap(&self) -> f64 {
        let mut pts = vec![T::zero()];
        pts.extend_from_slice(&self.x);
        if self.n % 2 == 0 {
            pts.push(T::frac_pi_2());
        }
        pts.windows(2)
            .map(|w| (w[1] - w[0]).to_f64())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_f64(&self) -> ZeroSet<f64> {
        ZeroSet {
            n: self.n,
            x: self.x.iter().map(|v| v.to_f64()).collect(),
            y: self.y.iter().map(|v| v.to_f64()).collect(),
            x_tol: self.x_tol.clone(),
            residuals: self.residuals.clone(),
            multiplicity_certified_simple: self.multiplicity_certified_simple,
            precision: self.precision,
            nodes: self.nodes,
        }
    }

    /// `k,x_k,y_k,residual` with `k` starting at 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,x_k,y_k,residual\n");
        for (k, ((x, y), r)) in self.x.iter().zip(&self.y).zip(&self.residuals).enumerate() {
            out.push_str(&format!("{},{:e},{:e},{:.3e}\n", k + 1, x.to_f64(), y.to_f64(), r));
        }
        out
    }

    pub fn to_document(&self) -> ZeroSetDocument {
        ZeroSetDocument {
            n: self.n,
            x: self.x.iter().map(|v| v.to_f64()).collect(),
            y: self.y.iter().map(|v| v.to_f64()).collect(),
            x_tol: self.x_tol.clone(),
            residuals: self.residuals.clone(),
            certified_simple: self.multiplicity_certified_simple,
            precision: self.precision,
            precision_bits: self.precision.bits(),
            nodes: self.nodes,
            min_gap: self.min_gap(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSetDocument {
    pub n: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub x_tol: Vec<f64>,
    pub residuals: Vec<f64>,
    pub certified_simple: bool,
    pub precision: Precision,
    pub precision_bits: u32,
    pub nodes: usize,
    pub min_gap: f64,
}

pub(crate) fn csin<T: Real>(z: Complex<T>) -> Complex<T> {
    let (s, c) = z.re.sin_cos();
    Complex::new(s * z.im.cosh(), c * z.im.sinh())
}

pub(crate) fn ccos<T: Real>(z: Complex<T>) -> Complex<T> {
    let (s, c) = z.re.sin_cos();
    Complex::new(c * z.im.cosh(), -(s * z.im.sinh()))
}

pub(crate) fn precision_of<T: Real>() -> Precision {
    Precision::from_bits(T::MANTISSA_BITS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::curie_weiss_weights;

    fn weights(n: usize, classes: Vec<f64>) -> MagnetizationWeights<f64> {
        MagnetizationWeights::from_classes(n, 0.0, classes, 1e-16).unwrap()
    }

    #[test]
    fn two_spin_reduction() {
        let (a, b) = (1.0, 0.37);
        let p = cosine_to_poly(&weights(2, vec![a, b]));
        assert!(!p.odd_parity());
        assert_eq!(p.coeffs(), &[2.0 * a + b, -4.0 * a]);
    }

    #[test]
    fn one_spin_reduction() {
        let p = cosine_to_poly(&weights(1, vec![1.0]));
        assert!(p.odd_parity());
        assert_eq!(p.coeffs(), &[2.0]);
    }

    #[test]
    fn three_spin_curie_weiss_reduction() {
        let t: f64 = 0.2;
        let w = curie_weiss_weights::<f64>(3, t);
        let p = cosine_to_poly(&w);
        // Z = 2e^{9t}cos3x + 6e^t cos x = cos x [(2e^{9t} + 6e^t) - 8e^{9t} y].
        let s = (-w.logscale()).exp();
        let c0 = (2.0 * (9.0 * t).exp() + 6.0 * t.exp()) * s;
        let c1 = -8.0 * (9.0 * t).exp() * s;
        assert!((p.coeffs()[0] - c0).abs() < 1e-14 * c0.abs());
        assert!((p.coeffs()[1] - c1).abs() < 1e-14 * c1.abs());
        // 8e^{9t}(cos²x - ¾(1 - e^{-8t})) form.
        let x: f64 = 0.77;
        let y = x.sin().powi(2);
        let alt = 8.0 * (9.0 * t).exp() * (x.cos().powi(2) - 0.75 * (1.0 - (-8.0 * t).exp())) * s;
        assert!((p.eval(y) - alt).abs() < 1e-13 * alt.abs().max(1.0));
    }

    #[test]
    fn reduction_reproduces_cosine_series() {
        for n in 1..=14usize {
            let classes: Vec<f64> = (0..=n / 2).map(|k| 1.0 / (1.0 + k as f64 * 0.7)).collect();
            let w = weights(n, classes);
            let p = cosine_to_poly(&w);
            assert_eq!(p.degree(), n / 2);
            assert!(p.eval(0.0) > 0.0);
            for &x in &[0.1f64, 0.5, 1.0, 1.4] {
                let y = x.sin().powi(2);
                let lhs = w.evaluate_real(x);
                let rhs = if n % 2 == 1 { x.cos() * p.eval(y) } else { p.eval(y) };
                let (_, bound) = p.eval_with_bound(y);
                assert!((lhs - rhs).abs() <= bound.max(1e-13), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn min_gap_uses_sentinels() {
        let zs = ZeroSet {
            n: 2,
            x: vec![1.2],
            y: vec![1.2f64.sin().powi(2)],
            x_tol: vec![0.0],
            residuals: vec![0.0],
            multiplicity_certified_simple: true,
            precision: Precision::Binary64,
            nodes: 0,
        };
        assert!((zs.min_gap() - (std::f64::consts::FRAC_PI_2 - 1.2)).abs() < 1e-15);
        assert!(zs.to_csv().starts_with("k,x_k,y_k,residual\n1,"));
    }
}
