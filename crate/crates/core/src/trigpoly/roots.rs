//! Certified isolation of the roots of `P(y)` on `(0, 1)`.

use f256::f256;
use thiserror::Error;

use super::{cosine_to_poly, precision_of, SinSquaredPoly, ZeroSet};
use crate::graph::CouplingGraph;
use crate::partition::{curie_weiss_weights, magnetization_weights, MagnetizationWeights, PartitionError};
use crate::real::{Precision, Real};

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtractError {
    #[error("found {found} certified roots, expected {expected} ({bits}-bit, {nodes} nodes)")]
    NotCertified {
        found: usize,
        expected: usize,
        bits: u32,
        nodes: usize,
    },
    #[error("root {index} could not be resolved to the requested tolerance ({bits}-bit)")]
    Unresolved { index: usize, bits: u32 },
    #[error("direct scan found {found} zeros, expected {expected}")]
    ScanMismatch { found: usize, expected: usize },
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

fn default_nodes(degree: usize) -> usize {
    (8 * (degree + 1)).max(32)
}

/// Single attempt with the default node count.
pub fn extract_zeros<T: Real>(p: &SinSquaredPoly<T>, tol: f64) -> Result<ZeroSet<T>, ExtractError> {
    extract_zeros_with_nodes(p, tol, default_nodes(p.degree()))
}

/// Samples `P` at `nodes` Chebyshev points of `(0, 1)` plus both endpoints,
/// keeps only samples whose sign exceeds the error bound, bisects every sign
/// change to `tol` and Newton-polishes inside the bracket. Succeeds only if
/// the number of brackets equals the degree.
pub fn extract_zeros_with_nodes<T: Real>(
    p: &SinSquaredPoly<T>,
    tol: f64,
    nodes: usize,
) -> Result<ZeroSet<T>, ExtractError> {
    let d = p.degree();
    let bits = T::MANTISSA_BITS;
    let mut samples = Vec::with_capacity(nodes + 2);
    samples.push(T::zero());
    let half = T::half();
    let pi = T::pi();
    for i in 1..=nodes {
        let theta = pi * T::from_f64(i as f64 - 0.5) / T::from_i64(nodes as i64);
        samples.push(half * (T::one() - theta.cos()));
    }
    samples.push(T::one());

    let certain: Vec<(T, bool)> = samples
        .into_iter()
        .filter_map(|y| {
            let (v, b) = p.eval_with_bound(y);
            (v.abs() > b).then_some((y, v > T::zero()))
        })
        .collect();
    let brackets: Vec<(T, T, bool)> = certain
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| (w[0].0, w[1].0, w[0].1))
        .collect();
    if brackets.len() != d {
        return Err(ExtractError::NotCertified {
            found: brackets.len(),
            expected: d,
            bits,
            nodes,
        });
    }

    let p0 = p.eval(T::zero());
    let tol_t = T::from_f64(tol);
    let mut ys = Vec::with_capacity(d);
    let mut y_tols = Vec::with_capacity(d);
    let mut residuals = Vec::with_capacity(d);
    for (index, &(lo0, hi0, lo_positive)) in brackets.iter().enumerate() {
        let (root, y_tol) = refine(p, lo0, hi0, lo_positive, tol_t).ok_or(ExtractError::Unresolved { index, bits })?;
        ys.push(root);
        y_tols.push(y_tol);
        residuals.push((p.eval(root).abs() / p0).to_f64());
    }

    let mut x: Vec<T> = ys.iter().map(|&y| y.sqrt().asin()).collect();
    let mut x_tol: Vec<f64> = ys
        .iter()
        .zip(&y_tols)
        .map(|(&y, &e)| {
            let yf = y.to_f64();
            e.to_f64() / (2.0 * (yf * (1.0 - yf)).sqrt())
        })
        .collect();
    let mut y = ys;
    if p.odd_parity() {
        x.push(T::frac_pi_2());
        y.push(T::one());
        x_tol.push(0.0);
        residuals.push(0.0);
    }
    let strictly_increasing = x.windows(2).all(|w| w[0] < w[1]);
    Ok(ZeroSet {
        n: p.n(),
        x,
        y,
        x_tol,
        residuals,
        multiplicity_certified_simple: strictly_increasing,
        precision: precision_of::<T>(),
        nodes,
    })
}

/// Bisection on a certified bracket followed by a clamped Newton polish.
/// Returns the root and its accuracy estimate in `y`.
fn refine<T: Real>(p: &SinSquaredPoly<T>, mut lo: T, mut hi: T, lo_positive: bool, tol: T) -> Option<(T, T)> {
    let half = T::half();
    for _ in 0..400 {
        if hi - lo <= tol {
            break;
        }
        let mid = half * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (v, b) = p.eval_with_bound(mid);
        if v.abs() <= b {
            break;
        }
        if (v > T::zero()) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut y = half * (lo + hi);
    for _ in 0..60 {
        let dp = p.derivative(y);
        if dp == T::zero() {
            break;
        }
        let step = p.eval(y) / dp;
        let next = y - step;
        if !(next >= lo && next <= hi) {
            break;
        }
        y = next;
        if step.abs() <= T::unit_roundoff() * (T::one() + T::one()) * y.abs() {
            break;
        }
    }
    let (_, bound) = p.eval_with_bound(y);
    let dp = p.derivative(y).abs();
    let newton_err = if dp > T::zero() { bound / dp } else { hi - lo };
    let err = newton_err.min(hi - lo).max(T::unit_roundoff() * y);
    (err <= tol).then_some((y, err))
}

/// All zeros at `π/2` with multiplicity `n`; the non-interacting limit.
pub fn degenerate_zero_set<T: Real>(n: usize) -> ZeroSet<T> {
    let count = n / 2 + n % 2;
    ZeroSet {
        n,
        x: vec![T::frac_pi_2(); count],
        y: vec![T::one(); count],
        x_tol: vec![0.0; count],
        residuals: vec![0.0; count],
        multiplicity_certified_simple: n <= 1,
        precision: precision_of::<T>(),
        nodes: 0,
    }
}

/// Where the weights of a zero computation come from. Both variants can
/// be recomputed at any precision, which the escalation ladder relies on.
#[derive(Debug, Clone, Copy)]
pub enum WeightSource<'a> {
    Graph { graph: &'a CouplingGraph, t: f64 },
    CurieWeiss { n: usize, t: f64 },
}

impl WeightSource<'_> {
    pub fn n(&self) -> usize {
        match self {
            WeightSource::Graph { graph, .. } => graph.n(),
            WeightSource::CurieWeiss { n, .. } => *n,
        }
    }

    pub fn weights<T: Real>(&self) -> Result<MagnetizationWeights<T>, PartitionError> {
        match *self {
            WeightSource::Graph { graph, t } => magnetization_weights(graph, t),
            WeightSource::CurieWeiss { n, t } => Ok(curie_weiss_weights(n, t)),
        }
    }

    /// Every coupling vanishes, so `Z = (2 cos x)^n`.
    pub fn is_degenerate(&self) -> bool {
        match *self {
            WeightSource::Graph { graph, t } => graph.effective_couplings(t).iter().all(|&j| j == 0.0),
            WeightSource::CurieWeiss { t, .. } => t == 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    /// Starting rung of the ladder.
    pub precision: Precision,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            precision: Precision::Binary64,
        }
    }
}

/// Largest node count is `MAX_NODE_FACTOR` times the default.
const MAX_NODE_FACTOR: usize = 64;

/// Runs `T`-precision attempts with the default node count, then keeps
/// quadrupling it while roots are missing, since close pairs can hide
/// between samples.
pub fn solve_zeros_in<T: Real>(src: &WeightSource<'_>, tol: f64) -> Result<ZeroSet<T>, ExtractError> {
    if src.is_degenerate() {
        return Ok(degenerate_zero_set(src.n()));
    }
    let w = src.weights::<T>()?;
    let p = cosine_to_poly(&w);
    let base = default_nodes(p.degree());
    let mut nodes = base;
    loop {
        match extract_zeros_with_nodes(&p, tol, nodes) {
            Ok(z) => return Ok(z),
            Err(ExtractError::NotCertified { found, expected, .. }) if found < expected && nodes < MAX_NODE_FACTOR * base => {
                nodes *= 4;
            }
            Err(_) if nodes == base => nodes *= 4,
            Err(e) => return Err(e),
        }
    }
}

/// Escalation ladder: binary64 then octuple precision, each with the
/// default and quadrupled node counts.
pub fn solve_zeros(src: &WeightSource<'_>, opts: SolveOptions) -> Result<ZeroSet<f64>, ExtractError> {
    if opts.precision == Precision::Binary64 {
        if let Ok(z) = solve_zeros_in::<f64>(src, opts.tol) {
            return Ok(z);
        }
    }
    solve_zeros_in::<f256>(src, opts.tol).map(|z| z.to_f64())
}

/// Zeros in precision `T`, obtained from the octuple rung when `T` itself
/// cannot certify them.
pub fn solve_zeros_as<T: Real>(src: &WeightSource<'_>, tol: f64) -> Result<ZeroSet<T>, ExtractError> {
    match solve_zeros_in::<T>(src, tol) {
        Ok(z) => Ok(z),
        Err(e) if T::MANTISSA_BITS >= f256::MANTISSA_DIGITS => Err(e),
        Err(_) => {
            let z = solve_zeros_in::<f256>(src, tol)?;
            Ok(ZeroSet {
                n: z.n,
                x: z.x.iter().map(|v| T::from_f64(v.to_f64())).collect(),
                y: z.y.iter().map(|v| T::from_f64(v.to_f64())).collect(),
                x_tol: z.x_tol,
                residuals: z.residuals,
                multiplicity_certified_simple: z.multiplicity_certified_simple,
                precision: z.precision,
                nodes: z.nodes,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete_graph;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn two_spin_curie_weiss_closed_form() {
        let t = 0.25f64;
        let zs = solve_zeros(&WeightSource::CurieWeiss { n: 2, t }, SolveOptions::default()).unwrap();
        let y = (1.0 + (-1.0f64).exp()) / 2.0;
        assert!((zs.y[0] - y).abs() < 1e-13);
        assert!((zs.x[0] - 0.5 * (-(-4.0 * t).exp()).acos()).abs() < 1e-12);
        assert!((zs.x[0] - 0.973762).abs() < 1e-6);
    }

    #[test]
    fn three_spin_curie_weiss_closed_form() {
        for &t in &[0.01f64, 0.3, 2.0] {
            let zs = solve_zeros(&WeightSource::CurieWeiss { n: 3, t }, SolveOptions::default()).unwrap();
            let expected = ((3.0 * -(-8.0 * t).exp_m1()).sqrt() / 2.0).acos();
            assert_eq!(zs.x.len(), 2);
            assert!((zs.x[0] - expected).abs() < 1e-11, "t={t}");
            assert_eq!(zs.x[1], FRAC_PI_2);
        }
    }

    #[test]
    fn four_spin_large_t_limits() {
        let zs = solve_zeros(&WeightSource::CurieWeiss { n: 4, t: 20.0 }, SolveOptions::default()).unwrap();
        assert!((zs.x[0] - PI / 8.0).abs() < 1e-6);
        assert!((zs.x[1] - 3.0 * PI / 8.0).abs() < 1e-6);
    }

    #[test]
    fn degenerate_start_is_analytic() {
        let zs = solve_zeros(&WeightSource::CurieWeiss { n: 5, t: 0.0 }, SolveOptions::default()).unwrap();
        assert_eq!(zs.x, vec![FRAC_PI_2; 3]);
        assert!(!zs.multiplicity_certified_simple);
        let w = curie_weiss_weights::<f64>(4, 0.0);
        assert!(extract_zeros(&cosine_to_poly(&w), DEFAULT_TOL).is_err());
    }

    #[test]
    fn ladder_escalates_to_octuple_for_large_n() {
        let src = WeightSource::CurieWeiss { n: 40, t: 1e-3 };
        assert!(solve_zeros_in::<f64>(&src, DEFAULT_TOL).is_err());
        let zs = solve_zeros(&src, SolveOptions::default()).unwrap();
        assert_eq!(zs.precision, Precision::Octuple);
        assert_eq!(zs.interior().len(), 20);
        assert!(zs.multiplicity_certified_simple);
    }

    #[test]
    fn round_trip_sin_squared() {
        let g = complete_graph(9, 0.3).with_varying_edge(0, 1).unwrap();
        let src = WeightSource::Graph { graph: &g, t: 0.4 };
        assert!(matches!(
            solve_zeros_in::<f64>(&src, DEFAULT_TOL),
            Err(ExtractError::Unresolved { .. } | ExtractError::NotCertified { .. })
        ));
        let zs = solve_zeros(&src, SolveOptions::default()).unwrap();
        assert_eq!(zs.precision, Precision::Octuple);
        for (x, y) in zs.x.iter().zip(&zs.y) {
            assert!((x.sin().powi(2) - y).abs() <= 4.0 * f64::EPSILON);
        }
        assert!(zs.residuals.iter().all(|&r| r < 1e-12));
    }
}
