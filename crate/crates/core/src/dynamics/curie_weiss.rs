//! Curie-Weiss zero dynamics `x'_k = f_k(x)` on
//! `D = {0 < x_1 < … < x_m < π/2}`, `m = ⌊n/2⌋`.
//!
//! `f_k = 2cot(2x_k) - 2sin(2x_k) Σ_{j≠k} 1/(sin²x_j - sin²x_k)`, and for odd
//! `n` the fixed zero at `π/2` contributes `-2 tan x_k`.

use super::integrator::OdeSystem;
use super::DynamicsError;
use crate::real::Real;
use crate::trigpoly::{solve_zeros_as, ExtractError, WeightSource, ZeroSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurieWeissSystem {
    pub n: usize,
}

impl CurieWeissSystem {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn m(&self) -> usize {
        self.n / 2
    }
}

fn check_distinct<T: Real>(x: &[T]) -> Result<(), DynamicsError> {
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            if x[i] == x[j] {
                return Err(DynamicsError::Coincident { i, j });
            }
        }
    }
    Ok(())
}

/// `sin²a - sin²b = sin(a + b) sin(a - b)`.
fn sin2_diff<T: Real>(a: T, b: T) -> T {
    (a + b).sin() * (a - b).sin()
}

pub fn cw_rhs<T: Real>(n: usize, x: &[T]) -> Result<Vec<T>, DynamicsError> {
    check_distinct(x)?;
    let two = T::one() + T::one();
    let odd = n % 2 == 1;
    Ok((0..x.len())
        .map(|k| {
            let (s2, c2) = (two * x[k]).sin_cos();
            let mut sum = T::zero();
            for (j, &xj) in x.iter().enumerate() {
                if j != k {
                    sum += T::one() / sin2_diff(xj, x[k]);
                }
            }
            let mut f = two * c2 / s2 - two * s2 * sum;
            if odd {
                f -= two * x[k].tan();
            }
            f
        })
        .collect())
}

/// Row-major `∂f_k/∂x_j`. Off-diagonal entries are
/// `2 sin(2x_k) sin(2x_j) / (sin²x_j - sin²x_k)^2 ≥ 0`.
pub fn cw_jacobian<T: Real>(n: usize, x: &[T]) -> Result<Vec<Vec<T>>, DynamicsError> {
    check_distinct(x)?;
    let m = x.len();
    let two = T::one() + T::one();
    let four = two + two;
    let odd = n % 2 == 1;
    let s2: Vec<T> = x.iter().map(|&v| (two * v).sin()).collect();
    let mut jac = vec![vec![T::zero(); m]; m];
    for k in 0..m {
        let c2k = (two * x[k]).cos();
        let mut inv = T::zero();
        let mut inv_sq = T::zero();
        for j in 0..m {
            if j == k {
                continue;
            }
            let d = sin2_diff(x[j], x[k]);
            let r = T::one() / d;
            inv += r;
            inv_sq += r * r;
            jac[k][j] = two * s2[k] * s2[j] * r * r;
        }
        let mut diag = -four / (s2[k] * s2[k]) - four * c2k * inv - two * s2[k] * s2[k] * inv_sq;
        if odd {
            let c = x[k].cos();
            diag -= two / (c * c);
        }
        jac[k][k] = diag;
    }
    Ok(jac)
}

impl<T: Real> OdeSystem<T> for CurieWeissSystem {
    fn dim(&self) -> usize {
        self.m()
    }

    fn rhs(&self, _t: T, x: &[T], out: &mut [T]) -> Result<(), DynamicsError> {
        out.copy_from_slice(&cw_rhs(self.n, x)?);
        Ok(())
    }

    fn in_domain(&self, x: &[T]) -> bool {
        x.iter().all(|&v| v > T::zero() && v < T::frac_pi_2()) && x.windows(2).all(|w| w[0] < w[1])
    }

    fn separation(&self, x: &[T]) -> T {
        x.windows(2)
            .map(|w| sin2_diff(w[1], w[0]))
            .fold(T::from_f64(f64::INFINITY), |a, b| a.min(b))
    }
}

/// Zeros at a small `t0 > 0` from direct extraction; the starting point
/// of every Curie-Weiss integration.
pub fn bootstrap_from_degenerate<T: Real>(n: usize, t0: f64) -> Result<ZeroSet<T>, ExtractError> {
    solve_zeros_as(&WeightSource::CurieWeiss { n, t: t0 }, crate::trigpoly::DEFAULT_TOL)
}
