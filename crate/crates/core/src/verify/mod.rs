//! Executable checks of the structural statements about the zeros.

mod suites;

use f256::f256;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{DynamicsError, Trajectory};
use crate::real::Real;
use crate::scenarios::{cw_large_t_deviation, cw_limit};
use crate::trigpoly::{solve_zeros, solve_zeros_in, ExtractError, SolveOptions, WeightSource, ZeroSet, DEFAULT_TOL};

pub use suites::{
    checkpoints, complex_samples, cooperativity_sample, factorization_max, g5_constant_tag, g5_t_grid, random_state, run_suite,
    structure_checks, tshift_max, ydifft_max, CheckResult, CooperativityStats, StructureOutcome, SuiteConfig, SuiteName,
    SuiteReport, VerifyReport, YDIFFT_PAIRS,
};

/// Default constancy threshold, `1e-9 · π/2`.
pub const DEFAULT_CONSTANT_EPS: f64 = 1e-9 * std::f64::consts::FRAC_PI_2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("zero {k} is neither constant nor monotone although the hypothesis holds")]
    NonMonotone { k: usize },
    #[error("trajectory has {got} components, expected at least {expected}")]
    Shape { got: usize, expected: usize },
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroTag {
    Constant,
    Decreasing,
    Increasing,
    /// Non-monotone trajectory of a graph outside the hypothesis.
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub tags: Vec<ZeroTag>,
    /// Containment interval of each interior zero.
    pub intervals: Vec<(f64, f64)>,
    /// `max_t |x_k(t) - x_k(0)|`.
    pub drift: Vec<f64>,
    /// Smallest distance of a sample to the far end of its interval.
    pub margin: f64,
    pub containment_holds: bool,
    pub hypothesis_met: bool,
    /// The `t = 0` zeros coincide (Curie-Weiss), so intervals fall back to
    /// the sentinels `(0, π/2)`.
    pub degenerate_start: bool,
    pub eps: f64,
}

fn resolution(x: f64, x_tol: f64) -> f64 {
    4.0 * f64::EPSILON * x.abs() + x_tol
}

/// Tags each interior zero of an `x`-coordinate trajectory against its
/// `t = 0` position and checks the containment interval at every sample.
/// Monotonicity is required up to the resolution of the sampled values.
pub fn classify_trajectories(
    tr: &Trajectory,
    x_at_0: &ZeroSet<f64>,
    hypothesis_met: bool,
    eps: f64,
) -> Result<ClassificationReport, VerifyError> {
    let tr = tr.to_x();
    let m = x_at_0.n / 2;
    if tr.components() < m {
        return Err(VerifyError::Shape {
            got: tr.components(),
            expected: m,
        });
    }
    let x0 = x_at_0.interior();
    let degenerate_start = !x_at_0.multiplicity_certified_simple && m > 1;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut tags = Vec::with_capacity(m);
    let mut intervals = Vec::with_capacity(m);
    let mut drift = Vec::with_capacity(m);
    let mut margin = f64::INFINITY;
    let mut containment_holds = true;

    for k in 0..m {
        let series = tr.component(k);
        let start = x0[k];
        let tol_k = x_at_0.x_tol.get(k).copied().unwrap_or(0.0).max(1e-12);
        let d = series.iter().map(|v| (v - start).abs()).fold(0.0, f64::max);
        drift.push(d);
        let below = if k == 0 || degenerate_start { 0.0 } else { x0[k - 1] };
        let above = if k + 1 == m || degenerate_start { half_pi } else { x0[k + 1] };

        if d <= eps {
            tags.push(ZeroTag::Constant);
            intervals.push((start, start));
            continue;
        }
        let last = *series.last().unwrap();
        let decreasing = last < start;
        let mut seq = vec![start];
        seq.extend_from_slice(&series);
        let monotone = seq.windows(2).all(|w| {
            let step = w[1] - w[0];
            let res = resolution(w[0], tol_k);
            if decreasing {
                step <= res
            } else {
                step >= -res
            }
        });
        if !monotone {
            if hypothesis_met {
                return Err(VerifyError::NonMonotone { k });
            }
            tags.push(ZeroTag::Unclassified);
            intervals.push((below, above));
            continue;
        }
        let (lo, hi) = if decreasing { (below, start) } else { (start, above) };
        for &v in &series {
            let res = resolution(v, tol_k);
            let inside = v > lo - res && v < hi + res;
            if !inside {
                containment_holds = false;
            }
            margin = margin.min(if decreasing { v - lo } else { hi - v });
        }
        tags.push(if decreasing { ZeroTag::Decreasing } else { ZeroTag::Increasing });
        intervals.push((lo, hi));
    }
    Ok(ClassificationReport {
        tags,
        intervals,
        drift,
        margin,
        containment_holds,
        hypothesis_met,
        degenerate_start,
        eps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisjointnessResult {
    pub disjoint: bool,
    /// Overlapping pair of zero indices, when there is one.
    pub witness: Option<(usize, usize)>,
    /// Smallest gap between consecutive ranges.
    pub min_gap: f64,
    pub hypothesis_met: bool,
}

/// Checks that the ranges `[min_t x_k, max_t x_k]` of distinct zeros are
/// pairwise disjoint, separated by more than the report's `eps`. With a degenerate start the `t = 0` values are left
/// out of the ranges.
pub fn disjointness_check(report: &ClassificationReport, tr: &Trajectory, x_at_0: &ZeroSet<f64>) -> DisjointnessResult {
    let tr = tr.to_x();
    let m = report.tags.len();
    let ranges: Vec<(f64, f64)> = (0..m)
        .map(|k| {
            let mut c = tr.component(k);
            if !report.degenerate_start {
                c.push(x_at_0.x[k]);
            }
            let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
        .collect();
    let mut witness = None;
    let mut min_gap = f64::INFINITY;
    for a in 0..m {
        for b in (a + 1)..m {
            if x_at_0.x[a] == x_at_0.x[b] {
                continue;
            }
            let (ra, rb) = (ranges[a], ranges[b]);
            let gap = (rb.0 - ra.1).max(ra.0 - rb.1);
            if b == a + 1 {
                min_gap = min_gap.min(gap);
            }
            if gap <= report.eps && witness.is_none() {
                witness = Some((a, b));
            }
        }
    }
    DisjointnessResult {
        disjoint: witness.is_none(),
        witness,
        min_gap,
        hypothesis_met: report.hypothesis_met,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterlacingResult {
    pub pass: bool,
    pub min_gap: f64,
    pub degenerate: bool,
}

/// `0 < x_1 < … < x_{n/2} < π/2` with a positive reported gap.
pub fn interlacing_check<T: Real>(zs: &ZeroSet<T>) -> InterlacingResult {
    let min_gap = zs.min_gap();
    let degenerate = !zs.multiplicity_certified_simple;
    InterlacingResult {
        pass: min_gap > 0.0 && !degenerate,
        min_gap,
        degenerate,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitResult {
    pub n: usize,
    pub t: f64,
    /// `|x_k(t) - (2k-1)π/(2n)|`.
    pub deviations: Vec<f64>,
    /// Odd `n` has the exact `π/2` zero.
    pub fixed_zero_exact: bool,
    pub pass: bool,
}

pub fn cw_limit_check(n: usize, t_large: f64, tol: f64) -> Result<LimitResult, VerifyError> {
    let zs = solve_zeros(&WeightSource::CurieWeiss { n, t: t_large }, SolveOptions::default())?;
    let deviations: Vec<f64> = zs
        .interior()
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - cw_limit::<f64>(n, i + 1)).abs())
        .collect();
    let fixed_zero_exact = n % 2 == 0 || (zs.x.len() == n / 2 + 1 && *zs.x.last().unwrap() == std::f64::consts::FRAC_PI_2);
    let pass = fixed_zero_exact && deviations.len() == n / 2 && deviations.iter().all(|&d| d <= tol);
    Ok(LimitResult {
        n,
        t: t_large,
        deviations,
        fixed_zero_exact,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneResult {
    pub n: usize,
    /// Every component strictly decreases between consecutive grid times,
    /// decided in octuple precision.
    pub strictly_decreasing: bool,
    /// Smallest `x_k(t_i) - x_k(t_{i+1})`.
    pub min_step: f64,
    /// Smallest step relative to the remaining distance to the limit.
    pub min_relative_step: f64,
}

/// Distance of each interior Curie-Weiss zero to its limit at time `t`, in
/// octuple precision. The large-`t` expansion is used where it applies so
/// that the deviation keeps full relative precision.
pub fn cw_deviations_f256(n: usize, t: f64) -> Result<Vec<f256>, VerifyError> {
    let m = n / 2;
    let from_expansion: Option<Vec<f256>> = (1..=m).map(|k| cw_large_t_deviation::<f256>(n, k, t)).collect();
    if let Some(d) = from_expansion {
        return Ok(d);
    }
    let zs = solve_zeros_in::<f256>(&WeightSource::CurieWeiss { n, t }, DEFAULT_TOL)?;
    Ok(zs
        .interior()
        .iter()
        .enumerate()
        .map(|(i, &x)| x - cw_limit::<f256>(n, i + 1))
        .collect())
}

/// Strict decrease of every Curie-Weiss zero along `times`.
pub fn cw_monotonicity(n: usize, times: &[f64]) -> Result<MonotoneResult, VerifyError> {
    let devs = times
        .iter()
        .map(|&t| cw_deviations_f256(n, t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut strictly_decreasing = true;
    let mut min_step = f64::INFINITY;
    let mut min_relative_step = f64::INFINITY;
    for w in devs.windows(2) {
        for (a, b) in w[0].iter().zip(&w[1]) {
            let step = *a - *b;
            if !(step > f256::ZERO) {
                strictly_decreasing = false;
            }
            min_step = min_step.min(step.to_f64());
            min_relative_step = min_relative_step.min((step / *a).to_f64());
        }
    }
    Ok(MonotoneResult {
        n,
        strictly_decreasing,
        min_step,
        min_relative_step,
    })
}
