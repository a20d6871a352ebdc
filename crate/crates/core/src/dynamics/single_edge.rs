//! Zero dynamics in `y = sin²x` when a single coupling `J_{u0v0} + t` varies.

use super::integrator::OdeSystem;
use super::DynamicsError;
use crate::graph::CouplingGraph;
use crate::partition::{magnetization_weights_at, MagnetizationWeights};
use crate::real::Real;
use crate::trigpoly::{solve_zeros_as, WeightSource};

/// `y'_k = -(1/sinh t) · y_k/(c sinh t + cosh t) · ∏_j (y0_j - y_k)/y0_j
///         · ∏_{j≠k} y_j/(y_j - y_k)` with `c = <σ_{u0}σ_{v0}>` at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleEdgeSystem<T> {
    pub y0: Vec<T>,
    pub corr: T,
}

impl<T: Real> SingleEdgeSystem<T> {
    pub fn new(y0: Vec<T>, corr: T) -> Self {
        Self { y0, corr }
    }

    pub fn m(&self) -> usize {
        self.y0.len()
    }
}

/// Accumulates a product as sign and log-magnitude.
#[derive(Clone, Copy)]
struct SignedLog<T> {
    negative: bool,
    log: T,
}

impl<T: Real> SignedLog<T> {
    fn one() -> Self {
        Self {
            negative: false,
            log: T::zero(),
        }
    }

    fn mul(&mut self, v: T) {
        if v < T::zero() {
            self.negative = !self.negative;
        }
        self.log += v.abs().ln();
    }

    fn value(self) -> T {
        let m = self.log.exp();
        if self.negative {
            -m
        } else {
            m
        }
    }
}

pub fn yode_rhs<T: Real>(sys: &SingleEdgeSystem<T>, t: T, y: &[T]) -> Result<Vec<T>, DynamicsError> {
    if !(t > T::zero()) {
        return Err(DynamicsError::NonPositiveTime { t: t.to_f64() });
    }
    let m = y.len();
    for i in 0..m {
        for j in (i + 1)..m {
            if y[i] == y[j] {
                return Err(DynamicsError::Coincident { i, j });
            }
        }
    }
    let (sh, ch) = (t.sinh(), t.cosh());
    let prefactor = -(T::one() / sh) / (sys.corr * sh + ch);
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let yk = y[k];
        if sys.y0.contains(&yk) {
            out.push(T::zero());
            continue;
        }
        let mut p = SignedLog::one();
        for &a in &sys.y0 {
            p.mul((a - yk) / a);
        }
        for (j, &yj) in y.iter().enumerate() {
            if j != k {
                p.mul(yj / (yj - yk));
            }
        }
        out.push(prefactor * yk * p.value());
    }
    Ok(out)
}

impl<T: Real> OdeSystem<T> for SingleEdgeSystem<T> {
    fn dim(&self) -> usize {
        self.y0.len()
    }

    fn rhs(&self, t: T, x: &[T], out: &mut [T]) -> Result<(), DynamicsError> {
        out.copy_from_slice(&yode_rhs(self, t, x)?);
        Ok(())
    }

    fn in_domain(&self, y: &[T]) -> bool {
        y.iter().all(|&v| v > T::zero() && v < T::one()) && y.windows(2).all(|w| w[0] < w[1])
    }

    fn separation(&self, y: &[T]) -> T {
        y.windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::from_f64(f64::INFINITY), |a, b| a.min(b))
    }
}

/// `K(t,s) = Z_s(0) sinh t / (Z_0(0) sinh(s - t))` from `ln Z_s(0)` and
/// `ln Z_0(0)`.
pub fn k_factor<T: Real>(t: T, s: T, ln_zs0: T, ln_z00: T) -> Result<T, DynamicsError> {
    if !(t > T::zero() && t < s) {
        return Err(DynamicsError::InvalidKInterval {
            t: t.to_f64(),
            s: s.to_f64(),
        });
    }
    Ok((ln_zs0 - ln_z00 + t.sinh().ln() - (s - t).sinh().ln()).exp())
}

/// Residual of `∏_j (y_j(0) - y_k(t))/y_j(0) = -K(t,s) ∏_j (y_j(s) - y_k(t))/y_j(s)`
/// relative to the larger side.
pub fn ydifft_residual<T: Real>(g: &CouplingGraph, k: usize, t: f64, s: f64, tol: f64) -> Result<T, DynamicsError> {
    let all = ydifft_residuals::<T>(g, t, s, tol)?;
    all.get(k).copied().ok_or(DynamicsError::ZeroIndex { k, m: all.len() })
}

/// The same residual for every interior zero.
pub fn ydifft_residuals<T: Real>(g: &CouplingGraph, t: f64, s: f64, tol: f64) -> Result<Vec<T>, DynamicsError> {
    g.require_varying_edge().map_err(crate::partition::PartitionError::from)?;
    let (tt, ss) = (T::from_f64(t), T::from_f64(s));
    let kf = {
        let w0: MagnetizationWeights<T> = magnetization_weights_at(g, T::zero(), crate::partition::DEFAULT_ENUMERATION_CAP)?;
        let ws: MagnetizationWeights<T> = magnetization_weights_at(g, ss, crate::partition::DEFAULT_ENUMERATION_CAP)?;
        k_factor(tt, ss, ws.ln_value_at_zero(), w0.ln_value_at_zero())?
    };
    let zeros = |time: f64| solve_zeros_as::<T>(&WeightSource::Graph { graph: g, t: time }, tol);
    let y0 = zeros(0.0)?.interior_y().to_vec();
    let yt = zeros(t)?.interior_y().to_vec();
    let ys = zeros(s)?.interior_y().to_vec();
    Ok(yt
        .iter()
        .map(|&yk| {
            let lhs = y0.iter().fold(T::one(), |p, &a| p * (a - yk) / a);
            let rhs = ys.iter().fold(T::one(), |p, &b| p * (b - yk) / b) * kf;
            (lhs + rhs).abs() / lhs.abs().max(rhs.abs())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_spin_fixed_point() {
        let sys = SingleEdgeSystem::new(vec![0.6], 0.3);
        assert_eq!(yode_rhs(&sys, 0.5, &[0.6]).unwrap(), vec![0.0]);
        let v = yode_rhs(&sys, 0.5, &[0.4]).unwrap()[0];
        let expected = -(1.0 / 0.5f64.sinh()) * 0.4 / (0.3 * 0.5f64.sinh() + 0.5f64.cosh()) * (0.6 - 0.4) / 0.6;
        assert!((v - expected).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let sys = SingleEdgeSystem::new(vec![0.2, 0.6], 0.3);
        assert!(matches!(yode_rhs(&sys, 0.0, &[0.1, 0.5]), Err(DynamicsError::NonPositiveTime { .. })));
        assert!(matches!(yode_rhs(&sys, 1.0, &[0.5, 0.5]), Err(DynamicsError::Coincident { i: 0, j: 1 })));
    }

    #[test]
    fn k_factor_cases() {
        assert!((k_factor(0.6, 1.2, 0.7, 0.7).unwrap() - 1.0f64).abs() < 1e-15);
        assert!(k_factor(1e-12, 1.0, 0.0, 0.0).unwrap() < 1e-11);
        assert!(k_factor(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(k_factor(0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn two_spin_ydifft_closed_form() {
        // Z_t = 2e^{t}cos2x + 2e^{-t}: y(t) = (1 + e^{-2t})/2, corr at t=0 is 0.
        let g = CouplingGraph::new(2, &[(0, 1, 0.0)], Some((0, 1))).unwrap();
        let r: f64 = ydifft_residual(&g, 0, 0.3, 0.9, 1e-13).unwrap();
        assert!(r <= 1e-12, "{r}");
        let y = |t: f64| (1.0 + (-2.0 * t).exp()) / 2.0;
        let sys = SingleEdgeSystem::new(vec![y(0.0)], 0.0);
        let h = 1e-6;
        let fd = (y(0.7 + h) - y(0.7 - h)) / (2.0 * h);
        let v = yode_rhs(&sys, 0.7, &[y(0.7)]).unwrap()[0];
        assert!((v - fd).abs() < 1e-8 * fd.abs());
        assert!(ydifft_residual::<f64>(&g, 0, 0.9, 0.3, 1e-12).is_err());
    }

    proptest! {
        #[test]
        fn sign_dichotomy(seed in proptest::collection::vec(0.01f64..0.99, 6), t in 0.01f64..5.0,
                          lam in 0.05f64..0.95, corr in 0.0f64..1.0, up in any::<bool>()) {
            let mut y0 = seed;
            y0.sort_by(f64::total_cmp);
            y0.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            let m = y0.len();
            let bands: Vec<(f64, f64)> = (0..m)
                .map(|k| if up {
                    (y0[k], if k + 1 < m { y0[k + 1] } else { 1.0 })
                } else {
                    (if k == 0 { 0.0 } else { y0[k - 1] }, y0[k])
                })
                .collect();
            let y: Vec<f64> = bands.iter().map(|(a, b)| a + lam * (b - a)).collect();
            let sys = SingleEdgeSystem::new(y0, corr);
            let v = yode_rhs(&sys, t, &y).unwrap();
            for vk in v {
                if up { prop_assert!(vk > 0.0); } else { prop_assert!(vk < 0.0); }
            }
        }
    }
}
