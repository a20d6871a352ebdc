//! Dormand-Prince 5(4) with PI step control and Hairer's dense output.

use super::DynamicsError;
use crate::real::Real;

/// Right-hand side of an autonomous or time-dependent system whose state
/// is a strictly increasing vector inside a domain.
pub trait OdeSystem<T: Real> {
    fn dim(&self) -> usize;

    fn rhs(&self, t: T, x: &[T], out: &mut [T]) -> Result<(), DynamicsError>;

    /// Strictly increasing and inside the open domain.
    fn in_domain(&self, x: &[T]) -> bool;

    /// Smallest pairwise separation in the coordinate where collisions are
    /// detected; `+∞` for a single component.
    fn separation(&self, x: &[T]) -> T;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Steps are refused once `separation < collision_factor · atol`.
    pub collision_factor: f64,
    pub max_steps: usize,
    pub initial_step: Option<f64>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-13,
            collision_factor: 1e3,
            max_steps: 200_000,
            initial_step: None,
        }
    }
}

/// One accepted step with its dense-output coefficients.
#[derive(Debug, Clone)]
struct Segment<T> {
    t: T,
    h: T,
    rcont: [Vec<T>; 5],
}

#[derive(Debug, Clone)]
pub struct Solution<T> {
    pub t0: T,
    pub t1: T,
    pub x0: Vec<T>,
    segments: Vec<Segment<T>>,
    pub accepted: usize,
    pub rejected: usize,
}

impl<T: Real> Solution<T> {
    /// Continuous extension at `t` in `[t0, t1]`.
    pub fn at(&self, t: T) -> Vec<T> {
        if self.segments.is_empty() || t <= self.t0 {
            return self.x0.clone();
        }
        let idx = self
            .segments
            .partition_point(|s| s.t + s.h < t)
            .min(self.segments.len() - 1);
        let s = &self.segments[idx];
        let theta = ((t - s.t) / s.h).max(T::zero()).min(T::one());
        let th1 = T::one() - theta;
        (0..self.x0.len())
            .map(|i| {
                let r = &s.rcont;
                r[0][i] + theta * (r[1][i] + th1 * (r[2][i] + theta * (r[3][i] + th1 * r[4][i])))
            })
            .collect()
    }

    pub fn end(&self) -> Vec<T> {
        self.at(self.t1)
    }
}

struct Tableau<T> {
    c: [T; 7],
    a: [[T; 6]; 7],
    e: [T; 7],
    d: [T; 7],
}

fn q<T: Real>(num: i64, den: i64) -> T {
    T::from_i64(num) / T::from_i64(den)
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        let z = T::zero();
        Self {
            c: [z, q(1, 5), q(3, 10), q(4, 5), q(8, 9), T::one(), T::one()],
            a: [
                [z; 6],
                [q(1, 5), z, z, z, z, z],
                [q(3, 40), q(9, 40), z, z, z, z],
                [q(44, 45), q(-56, 15), q(32, 9), z, z, z],
                [q(19372, 6561), q(-25360, 2187), q(64448, 6561), q(-212, 729), z, z],
                [q(9017, 3168), q(-355, 33), q(46732, 5247), q(49, 176), q(-5103, 18656), z],
                [q(35, 384), z, q(500, 1113), q(125, 192), q(-2187, 6784), q(11, 84)],
            ],
            e: [
                q(71, 57600),
                z,
                q(-71, 16695),
                q(71, 1920),
                q(-17253, 339200),
                q(22, 525),
                q(-1, 40),
            ],
            d: [
                q(-12715105075, 11282082432),
                z,
                q(87487479700, 32700410799),
                q(-10690763975, 1880347072),
                q(701980252875, 199316789632),
                q(-1453857185, 822651844),
                q(69997945, 29380423),
            ],
        }
    }
}

fn norm<T: Real>(v: &[T], scale: &[T]) -> f64 {
    let n = v.len().max(1) as f64;
    let s: f64 = v
        .iter()
        .zip(scale)
        .map(|(a, b)| {
            let r = (*a / *b).to_f64();
            r * r
        })
        .sum();
    (s / n).sqrt()
}

/// Integrates from `t0` to `t1 > t0`. The observer sees every accepted
/// step `(t, x)` including the initial state.
pub fn integrate<T: Real, S: OdeSystem<T>>(
    sys: &S,
    x0: &[T],
    t0: T,
    t1: T,
    opts: &IntegrateOptions,
    mut observer: Option<&mut dyn FnMut(T, &[T])>,
) -> Result<Solution<T>, DynamicsError> {
    let dim = sys.dim();
    if x0.len() != dim || !sys.in_domain(x0) {
        return Err(DynamicsError::OrderingViolation { t: t0.to_f64() });
    }
    let mut sol = Solution {
        t0,
        t1,
        x0: x0.to_vec(),
        segments: Vec::new(),
        accepted: 0,
        rejected: 0,
    };
    if let Some(obs) = observer.as_mut() {
        obs(t0, x0);
    }
    if dim == 0 || t1 <= t0 {
        return Ok(sol);
    }

    let tab = Tableau::<T>::new();
    let rtol = T::from_f64(opts.rtol);
    let atol = T::from_f64(opts.atol);
    let guard = T::from_f64(opts.collision_factor * opts.atol);

    let mut t = t0;
    let mut x = x0.to_vec();
    let mut k: Vec<Vec<T>> = vec![vec![T::zero(); dim]; 7];
    sys.rhs(t, &x, &mut k[0])?;

    let span = (t1 - t0).to_f64();
    let mut h = match opts.initial_step {
        Some(h) => h,
        None => initial_step(sys, t, &x, &k[0], opts, span)?,
    }
    .min(span);

    let beta = 0.04;
    let expo1 = 0.2 - 0.75 * beta;
    let (safe, facc1, facc2) = (0.9, 5.0, 0.1);
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    let mut stage = vec![T::zero(); dim];
    let mut x_new = vec![T::zero(); dim];
    let mut err_vec = vec![T::zero(); dim];
    let mut scale = vec![T::zero(); dim];

    for _ in 0..opts.max_steps {
        let remaining = (t1 - t).to_f64();
        if remaining <= 0.0 {
            return Ok(sol);
        }
        let finishing = h >= remaining;
        if finishing {
            h = remaining;
        }
        if h <= 1e-15 * t.to_f64().abs().max(1.0) {
            return Err(DynamicsError::StepUnderflow { t: t.to_f64() });
        }
        let ht = if finishing { t1 - t } else { T::from_f64(h) };

        let mut stage_ok = true;
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = T::zero();
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += tab.a[s][j] * kj[i];
                }
                stage[i] = x[i] + ht * acc;
            }
            if !sys.in_domain(&stage) {
                stage_ok = false;
                break;
            }
            sys.rhs(t + tab.c[s] * ht, &stage, &mut k[s])?;
            if s == 6 {
                x_new.copy_from_slice(&stage);
            }
        }

        if !stage_ok {
            sol.rejected += 1;
            last_rejected = true;
            h *= 0.25;
            continue;
        }

        for i in 0..dim {
            let mut acc = T::zero();
            for (j, kj) in k.iter().enumerate() {
                acc += tab.e[j] * kj[i];
            }
            err_vec[i] = ht * acc;
            scale[i] = atol + rtol * x[i].abs().max(x_new[i].abs());
        }
        let err = norm(&err_vec, &scale);

        if !err.is_finite() {
            sol.rejected += 1;
            last_rejected = true;
            h *= 0.25;
            continue;
        }

        let fac11 = err.powf(expo1);
        if err <= 1.0 {
            if sys.separation(&x_new) < guard {
                return Err(DynamicsError::NearCollision {
                    t: (t + ht).to_f64(),
                    separation: sys.separation(&x_new).to_f64(),
                });
            }
            let fac = (fac11 / facold.powf(beta) / safe).clamp(facc2, facc1);
            let mut h_new = h / fac;
            facold = err.max(1e-4);

            // k[6] is f(t + h, x_new): first-same-as-last.
            let mut rcont: [Vec<T>; 5] = Default::default();
            rcont[0] = x.clone();
            rcont[1] = (0..dim).map(|i| x_new[i] - x[i]).collect();
            rcont[2] = (0..dim).map(|i| ht * k[0][i] - rcont[1][i]).collect();
            rcont[3] = (0..dim).map(|i| rcont[1][i] - ht * k[6][i] - rcont[2][i]).collect();
            rcont[4] = (0..dim)
                .map(|i| {
                    let mut acc = T::zero();
                    for (j, kj) in k.iter().enumerate() {
                        acc += tab.d[j] * kj[i];
                    }
                    ht * acc
                })
                .collect();
            sol.segments.push(Segment { t, h: ht, rcont });
            sol.accepted += 1;

            t = if finishing { t1 } else { t + ht };
            x.copy_from_slice(&x_new);
            let k6 = k[6].clone();
            k[0] = k6;
            if let Some(obs) = observer.as_mut() {
                obs(t, &x);
            }
            if finishing {
                return Ok(sol);
            }
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new;
        } else {
            h /= (fac11 / safe).min(facc1);
            sol.rejected += 1;
            last_rejected = true;
        }
    }
    Err(DynamicsError::TooManySteps { t: t.to_f64() })
}

fn initial_step<T: Real, S: OdeSystem<T>>(
    sys: &S,
    t: T,
    x: &[T],
    f0: &[T],
    opts: &IntegrateOptions,
    span: f64,
) -> Result<f64, DynamicsError> {
    let dim = x.len();
    let scale: Vec<T> = x
        .iter()
        .map(|v| T::from_f64(opts.atol) + T::from_f64(opts.rtol) * v.abs())
        .collect();
    let d0 = norm(x, &scale);
    let d1 = norm(f0, &scale);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span);
    let x1: Vec<T> = (0..dim).map(|i| x[i] + T::from_f64(h0) * f0[i]).collect();
    if !sys.in_domain(&x1) {
        return Ok((h0 * 1e-3).max(1e-12));
    }
    let mut f1 = vec![T::zero(); dim];
    sys.rhs(t + T::from_f64(h0), &x1, &mut f1)?;
    let diff: Vec<T> = (0..dim).map(|i| f1[i] - f0[i]).collect();
    let d2 = norm(&diff, &scale) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(span))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay;

    impl OdeSystem<f64> for Decay {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, x: &[f64], out: &mut [f64]) -> Result<(), DynamicsError> {
            out[0] = -x[0];
            out[1] = -0.5 * x[1];
            Ok(())
        }
        fn in_domain(&self, x: &[f64]) -> bool {
            x[0] < x[1]
        }
        fn separation(&self, x: &[f64]) -> f64 {
            x[1] - x[0]
        }
    }

    #[test]
    fn exponential_decay_and_dense_output() {
        let sol = integrate(&Decay, &[1.0, 2.0], 0.0, 3.0, &IntegrateOptions::default(), None).unwrap();
        let end = sol.end();
        assert!((end[0] - (-3.0f64).exp()).abs() < 1e-11);
        assert!((end[1] - 2.0 * (-1.5f64).exp()).abs() < 1e-11);
        for &t in &[0.1, 0.77, 1.9, 2.5] {
            let v = sol.at(t);
            assert!((v[0] - (-t as f64).exp()).abs() < 1e-9, "t={t}");
        }
        assert!(sol.accepted > 3);
    }

    #[test]
    fn observer_sees_every_accepted_step() {
        let mut count = 0usize;
        let mut last = f64::NEG_INFINITY;
        let mut obs = |t: f64, _x: &[f64]| {
            assert!(t > last);
            last = t;
            count += 1;
        };
        let sol = integrate(&Decay, &[1.0, 2.0], 0.0, 1.0, &IntegrateOptions::default(), Some(&mut obs)).unwrap();
        assert_eq!(count, sol.accepted + 1);
        assert_eq!(last, 1.0);
    }

    #[test]
    fn ordering_violation_on_bad_start() {
        let r = integrate(&Decay, &[2.0, 1.0], 0.0, 1.0, &IntegrateOptions::default(), None);
        assert!(matches!(r, Err(DynamicsError::OrderingViolation { .. })));
    }

    #[test]
    fn near_collision_is_reported() {
        // x0 - x1 shrinks like e^{-t}: separation 1e-3 e^{-0.5t} hits the guard.
        let opts = IntegrateOptions {
            collision_factor: 1e9,
            ..Default::default()
        };
        let r = integrate(&Decay, &[1.0, 1.001], 0.0, 30.0, &opts, None);
        assert!(matches!(r, Err(DynamicsError::NearCollision { .. })));
    }
}
