//! Named verification suites over built-in and seeded random instances.

use std::fmt;
use std::str::FromStr;

use f256::f256;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{classify_trajectories, cw_limit_check, cw_monotonicity, disjointness_check, interlacing_check, ZeroTag, DEFAULT_CONSTANT_EPS};
use crate::dynamics::{
    bootstrap_from_degenerate, cw_jacobian, cw_rhs, integrate, observe_curie_weiss, trace_curie_weiss, trace_single_edge,
    ydifft_residuals, CurieWeissSystem, IntegrateOptions, TraceOptions,
};
use crate::graph::CouplingGraph;
use crate::partition::t_shift_residual;
use crate::real::{Precision, Real};
use crate::scenarios::{
    critical_beta, cw_closed_form, g5_invariant_zero, g5_partition, g5_scale, instance_set, reconstruct_g5, G5Params,
};
use crate::trigpoly::{circle_check, factorization_residual, solve_zeros, solve_zeros_as, SolveOptions, WeightSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Factorization,
    Tshift,
    Ydifft,
    Ode,
    Cooperativity,
    Theorems,
    All,
}

impl SuiteName {
    const EACH: [SuiteName; 6] = [
        SuiteName::Factorization,
        SuiteName::Tshift,
        SuiteName::Ydifft,
        SuiteName::Ode,
        SuiteName::Cooperativity,
        SuiteName::Theorems,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Factorization => "factorization",
            SuiteName::Tshift => "tshift",
            SuiteName::Ydifft => "ydifft",
            SuiteName::Ode => "ode",
            SuiteName::Cooperativity => "cooperativity",
            SuiteName::Theorems => "theorems",
            SuiteName::All => "all",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SuiteName::EACH
            .iter()
            .chain(std::iter::once(&SuiteName::All))
            .find(|n| n.as_str() == s)
            .copied()
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub n_max: usize,
    /// Precision of the identity suites (factorization, tshift, ydifft).
    pub precision: Precision,
    pub instances: usize,
    pub tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            n_max: 10,
            precision: Precision::Binary64,
            instances: 20,
            tol: crate::trigpoly::DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    /// Measured quantity, compared against `tolerance`.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            pass: value <= tolerance,
            value,
            tolerance,
            detail: String::new(),
        }
    }

    fn flag(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            value: if pass { 1.0 } else { 0.0 },
            tolerance: 1.0,
            detail: detail.into(),
        }
    }

    fn failed(name: impl Into<String>, err: impl fmt::Display) -> Self {
        Self {
            name: name.into(),
            pass: false,
            value: f64::NAN,
            tolerance: f64::NAN,
            detail: err.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub seed: u64,
    pub n_max: usize,
    pub precision: Precision,
    pub precision_bits: u32,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn failing_checks(&self) -> Vec<String> {
        self.suites
            .iter()
            .flat_map(|s| s.checks.iter().filter(|c| !c.pass).map(move |c| format!("{}/{}", s.suite, c.name)))
            .collect()
    }
}

pub fn run_suite(name: SuiteName, cfg: &SuiteConfig) -> VerifyReport {
    let names: Vec<SuiteName> = if name == SuiteName::All {
        SuiteName::EACH.to_vec()
    } else {
        vec![name]
    };
    let suites: Vec<SuiteReport> = names
        .into_iter()
        .map(|s| {
            let checks = match s {
                SuiteName::Factorization => factorization_suite(cfg),
                SuiteName::Tshift => tshift_suite(cfg),
                SuiteName::Ydifft => ydifft_suite(cfg),
                SuiteName::Ode => ode_suite(cfg),
                SuiteName::Cooperativity => cooperativity_suite(cfg),
                SuiteName::Theorems => theorems_suite(cfg),
                SuiteName::All => unreachable!(),
            };
            SuiteReport {
                suite: s,
                pass: checks.iter().all(|c| c.pass),
                checks,
            }
        })
        .collect();
    VerifyReport {
        pass: suites.iter().all(|s| s.pass),
        seed: cfg.seed,
        n_max: cfg.n_max,
        precision: cfg.precision,
        precision_bits: cfg.precision.bits(),
        suites,
    }
}

/// Ten log-spaced checkpoints in `[0.05, 5]`.
pub fn checkpoints() -> Vec<f64> {
    log_grid(0.05, 5.0, 10)
}

pub(crate) fn log_grid(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

fn instances(cfg: &SuiteConfig) -> Vec<(usize, CouplingGraph)> {
    instance_set(cfg.seed, cfg.instances)
        .into_iter()
        .enumerate()
        .filter(|(_, g)| g.n() <= cfg.n_max)
        .collect()
}

/// Complex samples with `|x| ≤ 2` and `|Im x| ≤ 1`.
pub fn complex_samples(rng: &mut ChaCha8Rng, count: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (re, im): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
        if re.hypot(im) <= 2.0 {
            out.push((re, im));
        }
    }
    out
}

/// Largest factorization residual of one instance at one time, in `T`.
pub fn factorization_max<T: Real>(g: &CouplingGraph, t: f64, samples: &[(f64, f64)], tol: f64) -> Result<f64, String> {
    let src = WeightSource::Graph { graph: g, t };
    let zs = solve_zeros_as::<T>(&src, tol).map_err(|e| e.to_string())?;
    let w = src.weights::<T>().map_err(|e| e.to_string())?;
    let mut pts: Vec<Complex<T>> = samples
        .iter()
        .map(|&(a, b)| Complex::new(T::from_f64(a), T::from_f64(b)))
        .collect();
    pts.extend(zs.x.iter().map(|&x| Complex::new(x, T::zero())));
    pts.push(Complex::new(T::zero(), T::zero()));
    Ok(factorization_residual(&w, &zs, &pts).to_f64())
}

fn thresholds(cfg: &SuiteConfig, binary64: f64) -> f64 {
    match cfg.precision {
        Precision::Binary64 => binary64,
        Precision::Octuple => 1e-20,
    }
}

fn factorization_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let tol = thresholds(cfg, 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xfac);
    instances(cfg)
        .into_iter()
        .map(|(i, g)| {
            let name = format!("instance{i}-n{}", g.n());
            let mut worst: f64 = 0.0;
            for &t in &checkpoints() {
                let samples = complex_samples(&mut rng, 8);
                let r = match cfg.precision {
                    Precision::Binary64 => factorization_max::<f64>(&g, t, &samples, cfg.tol),
                    Precision::Octuple => factorization_max::<f256>(&g, t, &samples, cfg.tol),
                };
                match r {
                    Ok(v) => worst = worst.max(v),
                    Err(e) => return CheckResult::failed(name, e),
                }
            }
            CheckResult::at_most(name, worst, tol)
        })
        .collect()
}

/// Largest t-shift residual over random `(t, δ, x)` draws.
pub fn tshift_max<T: Real>(g: &CouplingGraph, rng: &mut ChaCha8Rng, draws: usize) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let t = rng.gen_range(0.0..5.0);
        let d = rng.gen_range(-2.0..2.0);
        let (a, b) = complex_samples(rng, 1)[0];
        let r = t_shift_residual::<T>(g, t, d, Complex::new(T::from_f64(a), T::from_f64(b))).map_err(|e| e.to_string())?;
        worst = worst.max(r.to_f64());
    }
    Ok(worst)
}

fn tshift_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let tol = thresholds(cfg, 1e-10);
    instances(cfg)
        .into_iter()
        .map(|(i, g)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1000 + i as u64));
            let name = format!("instance{i}-n{}", g.n());
            let r = match cfg.precision {
                Precision::Binary64 => tshift_max::<f64>(&g, &mut rng, 10),
                Precision::Octuple => tshift_max::<f256>(&g, &mut rng, 3),
            };
            match r {
                Ok(v) => CheckResult::at_most(name, v, tol),
                Err(e) => CheckResult::failed(name, e),
            }
        })
        .collect()
}

/// `(t, s)` pairs used by the K(t,s) relation checks.
pub const YDIFFT_PAIRS: [(f64, f64); 3] = [(0.3, 0.9), (0.05, 1.0), (1.0, 4.0)];

pub fn ydifft_max<T: Real>(g: &CouplingGraph, tol: f64) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for &(t, s) in &YDIFFT_PAIRS {
        let r = ydifft_residuals::<T>(g, t, s, tol).map_err(|e| e.to_string())?;
        worst = r.iter().fold(worst, |a, v| a.max(v.to_f64()));
    }
    Ok(worst)
}

fn ydifft_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let tol = thresholds(cfg, 1e-8);
    instances(cfg)
        .into_iter()
        .map(|(i, g)| {
            let name = format!("instance{i}-n{}", g.n());
            let r = match cfg.precision {
                Precision::Binary64 => ydifft_max::<f64>(&g, cfg.tol),
                Precision::Octuple => ydifft_max::<f256>(&g, cfg.tol),
            };
            match r {
                Ok(v) => CheckResult::at_most(name, v, tol),
                Err(e) => CheckResult::failed(name, e),
            }
        })
        .collect()
}

fn ode_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let opts = TraceOptions {
        tol: cfg.tol,
        ..Default::default()
    };
    let mut checks: Vec<CheckResult> = instances(cfg)
        .into_iter()
        .map(|(i, g)| {
            let name = format!("two-path-instance{i}-n{}", g.n());
            match trace_single_edge(&g, &checkpoints(), &opts) {
                Ok(r) => CheckResult::at_most(name, r.max_deviation(), 1e-7),
                Err(e) => CheckResult::failed(name, e),
            }
        })
        .collect();
    let grid = log_grid(1e-3, 20.0, 30);
    for n in 2..=cfg.n_max.max(2) {
        let name = format!("two-path-cw{n}");
        checks.push(match trace_curie_weiss(n, &grid, &opts) {
            Ok(r) => CheckResult::at_most(name, r.max_deviation(), 1e-7),
            Err(e) => CheckResult::failed(name, e),
        });
    }
    for n in [2usize, 3] {
        match trace_curie_weiss(n, &grid, &opts) {
            Ok(r) => {
                let dev = |tr: &crate::dynamics::Trajectory| {
                    grid.iter()
                        .zip(&tr.states)
                        .map(|(&t, s)| (s[0] - cw_closed_form(n, t).unwrap().x[0]).abs())
                        .fold(0.0, f64::max)
                };
                checks.push(CheckResult::at_most(format!("closed-form-cw{n}-direct"), dev(&r.direct), 1e-10));
                checks.push(CheckResult::at_most(format!("closed-form-cw{n}-ode"), dev(&r.ode), 1e-7));
            }
            Err(e) => checks.push(CheckResult::failed(format!("closed-form-cw{n}"), e)),
        }
    }
    checks.push(order_preservation(cfg.n_max.clamp(2, 8)));
    checks
}

/// Two Curie-Weiss solutions started at `x_a ≪ x_b` stay strictly ordered
/// with margin `≥ 10·atol`.
fn order_preservation(n: usize) -> CheckResult {
    let name = format!("order-preservation-cw{n}");
    let opts = IntegrateOptions::default();
    let run = || -> Result<f64, String> {
        let a = bootstrap_from_degenerate::<f64>(n, 0.05).map_err(|e| e.to_string())?;
        let b = bootstrap_from_degenerate::<f64>(n, 0.01).map_err(|e| e.to_string())?;
        let sys = CurieWeissSystem::new(n);
        let span = 0.2;
        let sa = integrate(&sys, a.interior(), 0.0, span, &opts, None).map_err(|e| e.to_string())?;
        let sb = integrate(&sys, b.interior(), 0.0, span, &opts, None).map_err(|e| e.to_string())?;
        let mut margin = f64::INFINITY;
        for t in log_grid(1e-3, span, 40) {
            for (p, q) in sa.at(t).iter().zip(sb.at(t)) {
                margin = margin.min(q - p);
            }
        }
        Ok(margin)
    };
    match run() {
        Ok(margin) => CheckResult {
            name,
            pass: margin >= 10.0 * opts.atol,
            value: margin,
            tolerance: 10.0 * opts.atol,
            detail: "minimum componentwise gap x_b - x_a".into(),
        },
        Err(e) => CheckResult::failed(name, e),
    }
}

/// Random increasing state in `D` with gaps at least `0.02` and at least
/// `0.02` away from `0` and `π/2`.
pub fn random_state(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let (lo, hi) = (0.02, std::f64::consts::FRAC_PI_2 - 0.02);
    loop {
        let mut x: Vec<f64> = (0..m).map(|_| rng.gen_range(lo..hi)).collect();
        x.sort_by(f64::total_cmp);
        if x.windows(2).all(|w| w[1] - w[0] >= 0.02) {
            return x;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CooperativityStats {
    pub states: usize,
    pub min_offdiagonal: f64,
    /// `max |fd - closed form| / max(|closed form|, 1)`.
    pub max_fd_error: f64,
}

/// Closed-form Jacobian against central differences (`h = 1e-6`) on
/// random states with up to `n_max` spins.
pub fn cooperativity_sample(seed: u64, count: usize, n_max: usize) -> CooperativityStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_offdiagonal = f64::INFINITY;
    let mut max_fd_error: f64 = 0.0;
    let h = 1e-6;
    for _ in 0..count {
        let m = rng.gen_range(1..=(n_max / 2).max(1));
        let n = if rng.gen_bool(0.5) && 2 * m < n_max { 2 * m + 1 } else { 2 * m };
        let x = random_state(&mut rng, m);
        let jac = cw_jacobian(n, &x).expect("distinct state");
        for j in 0..m {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let fp = cw_rhs(n, &xp).expect("distinct state");
            let fm = cw_rhs(n, &xm).expect("distinct state");
            for k in 0..m {
                let fd = (fp[k] - fm[k]) / (2.0 * h);
                max_fd_error = max_fd_error.max((fd - jac[k][j]).abs() / jac[k][j].abs().max(1.0));
                if k != j {
                    min_offdiagonal = min_offdiagonal.min(jac[k][j]);
                }
            }
        }
    }
    CooperativityStats {
        states: count,
        min_offdiagonal,
        max_fd_error,
    }
}

fn cooperativity_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let n_max = cfg.n_max.max(2);
    let stats = cooperativity_sample(cfg.seed, 1000, n_max);
    let mut checks = vec![
        CheckResult {
            name: "offdiagonal-nonnegative".into(),
            pass: stats.min_offdiagonal >= 0.0,
            value: stats.min_offdiagonal,
            tolerance: 0.0,
            detail: format!("{} random states, n <= {n_max}", stats.states),
        },
        CheckResult::at_most("jacobian-finite-difference", stats.max_fd_error, 1e-6),
    ];
    let mut min_along: f64 = f64::INFINITY;
    let mut steps = 0usize;
    let mut obs = |_t: f64, x: &[f64]| {
        steps += 1;
        if let Ok(j) = cw_jacobian(n_max, x) {
            for (k, row) in j.iter().enumerate() {
                for (i, &v) in row.iter().enumerate() {
                    if i != k {
                        min_along = min_along.min(v);
                    }
                }
            }
        }
    };
    let r = observe_curie_weiss(n_max, &log_grid(1e-3, 20.0, 10), &IntegrateOptions::default(), &mut obs);
    checks.push(match r {
        Ok(_) => CheckResult {
            name: format!("offdiagonal-along-trajectory-cw{n_max}"),
            pass: min_along >= 0.0 || n_max < 4,
            value: min_along,
            tolerance: 0.0,
            detail: format!("{steps} accepted steps"),
        },
        Err(e) => CheckResult::failed(format!("offdiagonal-along-trajectory-cw{n_max}"), e),
    });
    checks
}

/// Outcome of the structural checks on one traced instance.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureOutcome {
    pub tags_ok: bool,
    pub containment: bool,
    pub disjoint: Option<bool>,
    pub min_interlacing_gap: f64,
    pub max_circle_deviation: f64,
}

/// Classification, containment, disjointness, interlacing and the circle
/// check for one instance on the checkpoint grid.
pub fn structure_checks(g: &CouplingGraph, times: &[f64], tol: f64) -> Result<StructureOutcome, String> {
    let opts = TraceOptions {
        tol,
        ..Default::default()
    };
    let r = trace_single_edge(g, times, &opts).map_err(|e| e.to_string())?;
    let hyp = g.hypothesis_met();
    let rep = classify_trajectories(&r.direct, &r.initial, hyp, DEFAULT_CONSTANT_EPS).map_err(|e| e.to_string())?;
    let tags_ok = rep.tags.len() == g.n() / 2 && rep.tags.iter().all(|t| *t != ZeroTag::Unclassified);
    let disjoint = hyp.then(|| disjointness_check(&rep, &r.direct, &r.initial).disjoint);
    let mut min_gap = interlacing_check(&r.initial).min_gap;
    let mut circle: f64 = 0.0;
    for &t in times {
        let src = WeightSource::Graph { graph: g, t };
        let zs = solve_zeros(&src, SolveOptions { tol, ..Default::default() }).map_err(|e| e.to_string())?;
        let il = interlacing_check(&zs);
        if !il.pass {
            min_gap = min_gap.min(0.0);
        }
        min_gap = min_gap.min(il.min_gap);
        let w = src.weights::<f64>().map_err(|e| e.to_string())?;
        circle = circle.max(circle_check(&w, &zs).max_radius_deviation);
    }
    Ok(StructureOutcome {
        tags_ok,
        containment: rep.containment_holds,
        disjoint,
        min_interlacing_gap: min_gap,
        max_circle_deviation: circle,
    })
}

fn theorems_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    for (i, g) in instances(cfg) {
        let base = format!("instance{i}-n{}", g.n());
        match structure_checks(&g, &checkpoints(), cfg.tol) {
            Ok(o) => {
                checks.push(CheckResult::flag(format!("{base}-tags"), o.tags_ok, "one tag per zero"));
                checks.push(CheckResult::flag(format!("{base}-containment"), o.containment, ""));
                if let Some(d) = o.disjoint {
                    checks.push(CheckResult::flag(format!("{base}-disjoint"), d, ""));
                }
                checks.push(CheckResult {
                    name: format!("{base}-interlacing"),
                    pass: o.min_interlacing_gap > 0.0,
                    value: o.min_interlacing_gap,
                    tolerance: 0.0,
                    detail: "minimum gap including sentinels".into(),
                });
                checks.push(CheckResult::at_most(format!("{base}-circle"), o.max_circle_deviation, 1e-10));
            }
            Err(e) => checks.push(CheckResult::failed(base, e)),
        }
    }
    for n in 2..=cfg.n_max.max(2) {
        let name = format!("cw{n}-limits");
        checks.push(match cw_limit_check(n, 20.0, 1e-6) {
            Ok(r) => CheckResult {
                name,
                pass: r.pass,
                value: r.deviations.iter().copied().fold(0.0, f64::max),
                tolerance: 1e-6,
                detail: String::new(),
            },
            Err(e) => CheckResult::failed(name, e),
        });
    }
    let grid = log_grid(1e-3, 20.0, 100);
    for n in 2..=cfg.n_max.clamp(2, 10) {
        let name = format!("cw{n}-strict-decrease");
        checks.push(match cw_monotonicity(n, &grid) {
            Ok(r) => CheckResult {
                name,
                pass: r.strictly_decreasing,
                value: r.min_relative_step,
                tolerance: 0.0,
                detail: format!("octuple precision; smallest absolute step {:e}", r.min_step),
            },
            Err(e) => CheckResult::failed(name, e),
        });
    }
    let beta = critical_beta();
    let invariant = g5_t_grid()
        .iter()
        .map(|&t| {
            let p = G5Params { beta, t };
            g5_partition(p, g5_invariant_zero()).abs() / g5_scale(p)
        })
        .fold(0.0, f64::max);
    checks.push(CheckResult::at_most("g5-invariant-zero", invariant, 1e-10));
    checks.push(match g5_constant_tag(beta) {
        Ok(d) => CheckResult::at_most("g5-constant-tag", d, 1e-9),
        Err(e) => CheckResult::failed("g5-constant-tag", e),
    });
    checks
}

/// `t = 0` and 49 log-spaced times in `[1e-3, 10]`.
pub fn g5_t_grid() -> Vec<f64> {
    let mut t = vec![0.0];
    t.extend(log_grid(1e-3, 10.0, 49));
    t
}

/// Drift of the traced G₅ zero that starts at `arcsin(2^{-1/4})`, provided
/// it is tagged constant.
pub fn g5_constant_tag(beta: f64) -> Result<f64, String> {
    let s = reconstruct_g5().ok_or("G5 not reconstructed")?;
    let g = s.graph(beta).map_err(|e| e.to_string())?;
    let times = log_grid(0.01, 10.0, 50);
    let r = trace_single_edge(&g, &times, &TraceOptions::default()).map_err(|e| e.to_string())?;
    let rep = classify_trajectories(&r.direct, &r.initial, g.hypothesis_met(), DEFAULT_CONSTANT_EPS).map_err(|e| e.to_string())?;
    let k = r
        .initial
        .interior()
        .iter()
        .position(|x| (x - g5_invariant_zero()).abs() < 1e-9)
        .ok_or("no zero at arcsin(2^(-1/4))")?;
    let ode_drift = r.ode.component(k).iter().map(|v| (v - r.initial.x[k]).abs()).fold(0.0, f64::max);
    if rep.tags[k] != ZeroTag::Constant {
        return Err(format!("tagged {:?}", rep.tags[k]));
    }
    Ok(rep.drift[k].max(ode_drift))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for n in SuiteName::EACH {
            assert_eq!(n.as_str().parse::<SuiteName>().unwrap(), n);
        }
        assert_eq!("all".parse::<SuiteName>().unwrap(), SuiteName::All);
        assert!("nope".parse::<SuiteName>().is_err());
    }

    #[test]
    fn cooperativity_suite_passes() {
        let r = run_suite(SuiteName::Cooperativity, &SuiteConfig::default());
        assert!(r.pass, "{:?}", r.failing_checks());
    }

    #[test]
    fn small_identity_suites_pass() {
        let cfg = SuiteConfig {
            n_max: 6,
            instances: 6,
            ..Default::default()
        };
        for s in [SuiteName::Factorization, SuiteName::Tshift, SuiteName::Ydifft] {
            let r = run_suite(s, &cfg);
            assert!(r.pass, "{s}: {:?}", r.suites[0].checks);
        }
    }
}
