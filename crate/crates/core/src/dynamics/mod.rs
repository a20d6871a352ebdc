//! Right-hand sides of the zero dynamics, the `K(t,s)` relation, and an
//! adaptive integrator for zero trajectories.

mod curie_weiss;
mod integrator;
mod single_edge;

use f256::f256;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::CouplingGraph;
use crate::partition::{edge_correlation, PartitionError};
use crate::real::{Precision, Real};
use crate::trigpoly::{solve_zeros, solve_zeros_as, ExtractError, SolveOptions, WeightSource, ZeroSet, DEFAULT_TOL};

pub use curie_weiss::{bootstrap_from_degenerate, cw_jacobian, cw_rhs, CurieWeissSystem};
pub use integrator::{integrate, IntegrateOptions, OdeSystem, Solution};
pub use single_edge::{k_factor, ydifft_residual, ydifft_residuals, yode_rhs, SingleEdgeSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("components {i} and {j} coincide")]
    Coincident { i: usize, j: usize },
    #[error("time must be positive, got {t}")]
    NonPositiveTime { t: f64 },
    #[error("ordering violated at t = {t}")]
    OrderingViolation { t: f64 },
    #[error("near collision at t = {t} (separation {separation:e})")]
    NearCollision { t: f64, separation: f64 },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step limit reached at t = {t}")]
    TooManySteps { t: f64 },
    #[error("K(t,s) needs 0 < t < s, got t = {t}, s = {s}")]
    InvalidKInterval { t: f64, s: f64 },
    #[error("zero index {k} out of range for {m} zeros")]
    ZeroIndex { k: usize, m: usize },
    #[error("time grid must be strictly increasing and start above 0")]
    InvalidGrid,
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinate {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    OdeIntegrated,
    DirectlyRecomputed,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::OdeIntegrated => "ode-integrated",
            Source::DirectlyRecomputed => "directly-recomputed",
        }
    }
}

/// Sorted zero vectors on an increasing time grid. For odd `n` the fixed
/// zero `π/2` (or `y = 1`) is the last component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub n: usize,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub coordinate: Coordinate,
    pub source: Source,
}

impl Trajectory {
    pub fn components(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn component(&self, k: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[k]).collect()
    }

    pub fn to_x(&self) -> Trajectory {
        match self.coordinate {
            Coordinate::X => self.clone(),
            Coordinate::Y => Trajectory {
                states: self
                    .states
                    .iter()
                    .map(|s| s.iter().map(|&y| y.sqrt().asin()).collect())
                    .collect(),
                coordinate: Coordinate::X,
                ..self.clone()
            },
        }
    }

    /// Largest componentwise difference on a shared grid.
    pub fn max_deviation(&self, other: &Trajectory) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max)
    }

    /// Long-format rows `t,k,x_k,source` (no header).
    pub fn write_csv_rows(&self, out: &mut String) {
        for (t, s) in self.times.iter().zip(&self.states) {
            for (k, v) in s.iter().enumerate() {
                out.push_str(&format!("{:e},{},{:e},{}\n", t, k + 1, v, self.source.as_str()));
            }
        }
    }

    pub fn is_ordered(&self) -> bool {
        self.states.iter().all(|s| s.windows(2).all(|w| w[0] < w[1]))
            && self.times.windows(2).all(|w| w[0] < w[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub integrate: IntegrateOptions,
    pub tol: f64,
    /// Working precision of the first integration attempt.
    pub precision: Precision,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            integrate: IntegrateOptions::default(),
            tol: DEFAULT_TOL,
            precision: Precision::Binary64,
        }
    }
}

/// Both trajectory paths on the same grid, in `x` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub ode: Trajectory,
    pub direct: Trajectory,
    /// Zeros at `t = 0`.
    pub initial: ZeroSet<f64>,
    /// Precision the ODE path finally ran in.
    pub ode_precision: Precision,
    pub accepted_steps: usize,
    /// Why the ODE path is empty. Only set when the positive-coupling
    /// subgraph is disconnected, where zeros may collide.
    pub ode_failure: Option<DynamicsError>,
}

impl TraceResult {
    /// `NaN` when the ODE path is missing.
    pub fn max_deviation(&self) -> f64 {
        if self.ode_failure.is_some() {
            return f64::NAN;
        }
        self.ode.max_deviation(&self.direct)
    }
}

fn check_grid(times: &[f64]) -> Result<(), DynamicsError> {
    if times.is_empty() || !(times[0] > 0.0) || times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(DynamicsError::InvalidGrid);
    }
    Ok(())
}

fn attach_fixed(n: usize, mut x: Vec<f64>) -> Vec<f64> {
    if n % 2 == 1 {
        x.push(std::f64::consts::FRAC_PI_2);
    }
    x
}

fn direct_path<'a>(src: impl Fn(f64) -> WeightSource<'a>, n: usize, times: &[f64], tol: f64) -> Result<Trajectory, DynamicsError> {
    let states = times
        .iter()
        .map(|&t| {
            let z = solve_zeros(&src(t), SolveOptions { tol, ..Default::default() })?;
            Ok(z.x)
        })
        .collect::<Result<Vec<_>, DynamicsError>>()?;
    Ok(Trajectory {
        n,
        times: times.to_vec(),
        states,
        coordinate: Coordinate::X,
        source: Source::DirectlyRecomputed,
    })
}

/// Guard scaled so that the octuple rerun tolerates separations that are
/// meaningful at its own precision.
fn octuple_options(opts: &IntegrateOptions) -> IntegrateOptions {
    let ratio = f256::EPSILON.to_f64() / f64::EPSILON;
    IntegrateOptions {
        collision_factor: opts.collision_factor * ratio,
        ..*opts
    }
}

fn run_with_fallback<F64, F256>(precision: Precision, opts: &IntegrateOptions, f64_run: F64, f256_run: F256) -> Result<(Vec<Vec<f64>>, usize, Precision), DynamicsError>
where
    F64: FnOnce(&IntegrateOptions) -> Result<(Vec<Vec<f64>>, usize), DynamicsError>,
    F256: FnOnce(&IntegrateOptions) -> Result<(Vec<Vec<f64>>, usize), DynamicsError>,
{
    if precision == Precision::Binary64 {
        match f64_run(opts) {
            Ok((s, a)) => return Ok((s, a, Precision::Binary64)),
            Err(DynamicsError::NearCollision { .. }) | Err(DynamicsError::Extract(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let (s, a) = f256_run(&octuple_options(opts))?;
    Ok((s, a, Precision::Octuple))
}

fn single_edge_states<T: Real>(
    g: &CouplingGraph,
    times: &[f64],
    tol: f64,
    opts: &IntegrateOptions,
) -> Result<(Vec<Vec<f64>>, usize), DynamicsError> {
    let y0 = solve_zeros_as::<T>(&WeightSource::Graph { graph: g, t: 0.0 }, tol)?;
    let corr = edge_correlation::<T>(g, 0.0)?;
    let start = solve_zeros_as::<T>(&WeightSource::Graph { graph: g, t: times[0] }, tol)?;
    let sys = SingleEdgeSystem::new(y0.interior_y().to_vec(), corr);
    let t1 = T::from_f64(*times.last().unwrap());
    let sol = integrate(&sys, start.interior_y(), T::from_f64(times[0]), t1, opts, None)?;
    let states = times
        .iter()
        .map(|&t| {
            let y = sol.at(T::from_f64(t));
            attach_fixed(g.n(), y.iter().map(|v| v.sqrt().asin().to_f64()).collect())
        })
        .collect();
    Ok((states, sol.accepted))
}

/// Traces the zeros of `Z_{G,t}` along the varying edge, once by
/// integrating the single-edge system from `times[0]` and once by direct
/// re-extraction at every grid time.
pub fn trace_single_edge(g: &CouplingGraph, times: &[f64], opts: &TraceOptions) -> Result<TraceResult, DynamicsError> {
    check_grid(times)?;
    g.require_varying_edge().map_err(PartitionError::from)?;
    let initial = solve_zeros(&WeightSource::Graph { graph: g, t: 0.0 }, SolveOptions { tol: opts.tol, ..Default::default() })?;
    let direct = direct_path(|t| WeightSource::Graph { graph: g, t }, g.n(), times, opts.tol)?;
    let run = run_with_fallback(
        opts.precision,
        &opts.integrate,
        |o| single_edge_states::<f64>(g, times, opts.tol, o),
        |o| single_edge_states::<f256>(g, times, opts.tol, o),
    );
    let (ode_times, states, accepted, ode_precision, ode_failure) = match run {
        Ok((s, a, p)) => (times.to_vec(), s, a, p, None),
        Err(
            e @ (DynamicsError::NearCollision { .. }
            | DynamicsError::StepUnderflow { .. }
            | DynamicsError::TooManySteps { .. }
            | DynamicsError::OrderingViolation { .. }
            | DynamicsError::Coincident { .. }
            | DynamicsError::Extract(_)),
        ) if !g.hypothesis_met() => (Vec::new(), Vec::new(), 0, opts.precision, Some(e)),
        Err(e) => return Err(e),
    };
    Ok(TraceResult {
        ode: Trajectory {
            n: g.n(),
            times: ode_times,
            states,
            coordinate: Coordinate::X,
            source: Source::OdeIntegrated,
        },
        direct,
        initial,
        ode_precision,
        accepted_steps: accepted,
        ode_failure,
    })
}

fn curie_weiss_states<T: Real>(
    n: usize,
    times: &[f64],
    opts: &IntegrateOptions,
    observer: Option<&mut dyn FnMut(T, &[T])>,
) -> Result<(Vec<Vec<f64>>, usize), DynamicsError> {
    let start = bootstrap_from_degenerate::<T>(n, times[0])?;
    let sys = CurieWeissSystem::new(n);
    let t1 = T::from_f64(*times.last().unwrap());
    let sol = integrate(&sys, start.interior(), T::from_f64(times[0]), t1, opts, observer)?;
    let states = times
        .iter()
        .map(|&t| attach_fixed(n, sol.at(T::from_f64(t)).iter().map(|v| v.to_f64()).collect()))
        .collect();
    Ok((states, sol.accepted))
}

/// Curie-Weiss counterpart of [`trace_single_edge`], bootstrapped by direct
/// extraction at `times[0] > 0`.
pub fn trace_curie_weiss(n: usize, times: &[f64], opts: &TraceOptions) -> Result<TraceResult, DynamicsError> {
    check_grid(times)?;
    let initial = crate::trigpoly::degenerate_zero_set::<f64>(n);
    let direct = direct_path(move |t| WeightSource::CurieWeiss { n, t }, n, times, opts.tol)?;
    let (states, accepted, ode_precision) = run_with_fallback(
        opts.precision,
        &opts.integrate,
        |o| curie_weiss_states::<f64>(n, times, o, None),
        |o| curie_weiss_states::<f256>(n, times, o, None),
    )?;
    Ok(TraceResult {
        ode: Trajectory {
            n,
            times: times.to_vec(),
            states,
            coordinate: Coordinate::X,
            source: Source::OdeIntegrated,
        },
        direct,
        initial,
        ode_precision,
        accepted_steps: accepted,
        ode_failure: None,
    })
}

/// Integrates the Curie-Weiss system in binary64 and hands every accepted
/// step to `observer`.
pub fn observe_curie_weiss(
    n: usize,
    times: &[f64],
    opts: &IntegrateOptions,
    observer: &mut dyn FnMut(f64, &[f64]),
) -> Result<Vec<Vec<f64>>, DynamicsError> {
    check_grid(times)?;
    curie_weiss_states::<f64>(n, times, opts, Some(observer)).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_grid(a: f64, b: f64, k: usize) -> Vec<f64> {
        (0..k)
            .map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (k - 1) as f64).exp())
            .collect()
    }

    #[test]
    fn curie_weiss_two_spin_endpoint() {
        let r = trace_curie_weiss(2, &[0.01, 1.0, 5.0], &TraceOptions::default()).unwrap();
        let expected = 0.5 * (-(-20.0f64).exp()).acos();
        assert!((r.ode.states[2][0] - expected).abs() < 1e-9);
        assert!(r.max_deviation() < 1e-9);
    }

    #[test]
    fn curie_weiss_three_spin_matches_closed_form() {
        let times = log_grid(0.01, 5.0, 12);
        let r = trace_curie_weiss(3, &times, &TraceOptions::default()).unwrap();
        for (t, s) in times.iter().zip(&r.ode.states) {
            let expected = ((3.0 * -(-8.0 * t).exp_m1()).sqrt() / 2.0).acos();
            assert!((s[0] - expected).abs() < 1e-9, "t={t}");
            assert_eq!(s[1], std::f64::consts::FRAC_PI_2);
        }
    }

    #[test]
    fn single_edge_matches_direct_extraction() {
        let g = CouplingGraph::new(4, &[(0, 1, 0.5), (1, 2, 0.8), (2, 3, 0.3), (0, 3, 0.6)], Some((1, 2))).unwrap();
        let times = log_grid(0.05, 5.0, 10);
        let r = trace_single_edge(&g, &times, &TraceOptions::default()).unwrap();
        assert!(r.max_deviation() < 1e-7, "{}", r.max_deviation());
        assert!(r.ode.is_ordered() && r.direct.is_ordered());
    }

    #[test]
    fn single_edge_rhs_matches_finite_difference_of_extraction() {
        let g = CouplingGraph::new(4, &[(0, 1, 0.5), (1, 2, 0.8), (2, 3, 0.3), (0, 3, 0.6)], Some((1, 2))).unwrap();
        let y = |t: f64| {
            solve_zeros(&WeightSource::Graph { graph: &g, t }, SolveOptions::default())
                .unwrap()
                .interior_y()
                .to_vec()
        };
        let t = 0.7;
        let h = 1e-4;
        let sys = SingleEdgeSystem::new(y(0.0), edge_correlation::<f64>(&g, 0.0).unwrap());
        let v = yode_rhs(&sys, t, &y(t)).unwrap();
        let (yp, ym) = (y(t + h), y(t - h));
        for k in 0..2 {
            let fd = (yp[k] - ym[k]) / (2.0 * h);
            assert!((fd - v[k]).abs() <= 1e-6 * v[k].abs(), "k={k}");
        }
    }

    #[test]
    fn grid_validation() {
        assert_eq!(trace_curie_weiss(2, &[0.0, 1.0], &TraceOptions::default()), Err(DynamicsError::InvalidGrid));
        assert_eq!(trace_curie_weiss(2, &[1.0, 0.5], &TraceOptions::default()), Err(DynamicsError::InvalidGrid));
    }

    #[test]
    fn trajectory_csv_and_conversion() {
        let tr = Trajectory {
            n: 2,
            times: vec![0.1],
            states: vec![vec![0.5]],
            coordinate: Coordinate::Y,
            source: Source::OdeIntegrated,
        };
        let x = tr.to_x();
        assert!((x.states[0][0] - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let mut out = String::new();
        x.write_csv_rows(&mut out);
        assert!(out.starts_with("1e-1,1,7.85398163397448"));
        assert!(out.ends_with(",ode-integrated\n"));
    }
}
