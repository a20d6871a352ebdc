//! Concrete instances and closed-form oracles.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{CouplingGraph, GraphError};
use crate::real::{Precision, Real};
use crate::trigpoly::ZeroSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("closed form available only for n = 2 or 3, got {0}")]
    UnsupportedOrder(usize),
    #[error("closed form needs t > 0, got {0}")]
    NonPositiveTime(f64),
    #[error("unknown scenario {0:?}; expected g5, cw:<n> or random:<seed>")]
    UnknownScenario(String),
    #[error("the G5 formula matched no graph in the search space")]
    G5NotFound,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `β* = ln(1 + √2)/2`, where `e^{-2β*} = √2 - 1`.
pub fn critical_beta() -> f64 {
    std::f64::consts::SQRT_2.ln_1p() / 2.0
}

/// The invariant zero `arcsin(2^{-1/4})`.
pub fn g5_invariant_zero() -> f64 {
    2f64.powf(-0.25).asin()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G5Params {
    pub beta: f64,
    pub t: f64,
}

/// The five-vertex example, as the explicit two-bracket formula.
pub fn g5_partition(p: G5Params, x: f64) -> f64 {
    let e = |k: f64| (k * p.beta).exp();
    let plus = e(4.0) * (5.0 * x).cos()
        + (e(2.0) + e(-2.0) + 1.0) * (3.0 * x).cos()
        + (e(2.0) + e(-2.0) + e(-4.0) + 1.0) * x.cos();
    let minus = 2.0 * e(2.0) * (3.0 * x).cos() + (e(4.0) + 2.0 * e(-2.0) + e(-4.0) + 2.0) * x.cos();
    2.0 * p.t.exp() * plus + 2.0 * (-p.t).exp() * minus
}

/// Sum of the absolute values of every term of [`g5_partition`].
pub fn g5_scale(p: G5Params) -> f64 {
    let e = |k: f64| (k * p.beta).exp();
    let plus = e(4.0) + e(2.0) + e(-2.0) + 1.0 + e(2.0) + e(-2.0) + e(-4.0) + 1.0;
    let minus = 2.0 * e(2.0) + e(4.0) + 2.0 * e(-2.0) + e(-4.0) + 2.0;
    2.0 * p.t.exp() * plus + 2.0 * (-p.t).exp() * minus
}

/// Multiset of `(sign of the t-term, β exponent, M)` over all 32 spin
/// configurations; this is what the formula determines.
type Signature = BTreeMap<(i8, i32, i32), u32>;

fn g5_target() -> Signature {
    let mut s = Signature::new();
    let mut put = |sign: i8, m: i32, terms: &[(i32, u32)]| {
        for &(a, c) in terms {
            *s.entry((sign, a, m)).or_default() += c;
            *s.entry((sign, a, -m)).or_default() += c;
        }
    };
    put(1, 5, &[(4, 1)]);
    put(1, 3, &[(2, 1), (-2, 1), (0, 1)]);
    put(1, 1, &[(2, 1), (-2, 1), (-4, 1), (0, 1)]);
    put(-1, 3, &[(2, 2)]);
    put(-1, 1, &[(4, 1), (-2, 2), (-4, 1), (0, 2)]);
    s
}

/// A candidate structure: β multiplicity per vertex pair plus the pair
/// carrying `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct G5Structure {
    pub beta_edges: Vec<((usize, usize), u32)>,
    pub t_edge: (usize, usize),
}

impl G5Structure {
    /// The coupling graph at a given `β`. The `t` edge has base coupling 0
    /// unless it also carries β.
    pub fn graph(&self, beta: f64) -> Result<CouplingGraph, GraphError> {
        let mut edges: Vec<(usize, usize, f64)> =
            self.beta_edges.iter().map(|&((u, v), m)| (u, v, m as f64 * beta)).collect();
        if !edges.iter().any(|&(u, v, _)| (u, v) == self.t_edge) {
            edges.push((self.t_edge.0, self.t_edge.1, 0.0));
        }
        CouplingGraph::new(5, &edges, Some(self.t_edge))
    }
}

fn pairs() -> Vec<(usize, usize)> {
    let mut p = Vec::new();
    for u in 0..5 {
        for v in (u + 1)..5 {
            p.push((u, v));
        }
    }
    p
}

fn signature(mult: &[u32], t_pair: usize, pairs: &[(usize, usize)]) -> Signature {
    let mut s = Signature::new();
    for c in 0u32..32 {
        let spin = |i: usize| if c >> i & 1 == 1 { 1 } else { -1 };
        let mut a = 0i32;
        for (p, &m) in pairs.iter().zip(mult) {
            a += m as i32 * spin(p.0) * spin(p.1);
        }
        let (u, v) = pairs[t_pair];
        let sign = (spin(u) * spin(v)) as i8;
        let m: i32 = (0..5).map(spin).sum();
        *s.entry((sign, a, m)).or_default() += 1;
    }
    s
}

/// Exhaustive search over β multiplicities in `0..=max_multiplicity` per
/// vertex pair with total weight four, and every choice of `t` pair.
/// Results are in lexicographic order of (multiplicities, t pair).
pub fn g5_search(max_multiplicity: u32) -> Vec<G5Structure> {
    let pairs = pairs();
    let target = g5_target();
    let mut found = Vec::new();
    let mut mult = vec![0u32; pairs.len()];
    fn rec(
        i: usize,
        left: u32,
        max: u32,
        mult: &mut Vec<u32>,
        pairs: &[(usize, usize)],
        target: &Signature,
        found: &mut Vec<G5Structure>,
    ) {
        if i == mult.len() {
            if left != 0 {
                return;
            }
            for tp in 0..pairs.len() {
                if signature(mult, tp, pairs) == *target {
                    found.push(G5Structure {
                        beta_edges: pairs
                            .iter()
                            .zip(mult.iter())
                            .filter(|(_, &m)| m > 0)
                            .map(|(&p, &m)| (p, m))
                            .collect(),
                        t_edge: pairs[tp],
                    });
                }
            }
            return;
        }
        for m in 0..=max.min(left) {
            mult[i] = m;
            rec(i + 1, left - m, max, mult, pairs, target, found);
        }
        mult[i] = 0;
    }
    rec(0, 4, max_multiplicity, &mut mult, &pairs, &target, &mut found);
    found
}

/// First structure reproducing the formula; a plain graph with four
/// single β edges is tried before allowing doubled edges.
pub fn reconstruct_g5() -> Option<G5Structure> {
    g5_search(1).into_iter().next().or_else(|| g5_search(2).into_iter().next())
}

/// Closed-form Curie-Weiss zeros for `n = 2, 3`.
pub fn cw_closed_form(n: usize, t: f64) -> Result<ZeroSet<f64>, ScenarioError> {
    cw_closed_form_in::<f64>(n, t)
}

pub fn cw_closed_form_in<T: Real>(n: usize, t: f64) -> Result<ZeroSet<T>, ScenarioError> {
    if !(t > 0.0) {
        return Err(ScenarioError::NonPositiveTime(t));
    }
    let tt = T::from_f64(t);
    // n = 2: cos²x = (1 - e^{-4t})/2; n = 3: cos²x = 3(1 - e^{-8t})/4.
    let cos_sq = match n {
        2 => -(-T::from_f64(4.0) * tt).exp_m1() * T::half(),
        3 => -(-T::from_f64(8.0) * tt).exp_m1() * T::from_f64(0.75),
        _ => return Err(ScenarioError::UnsupportedOrder(n)),
    };
    let x1 = cos_sq.sqrt().acos();
    let mut x = vec![x1];
    let mut y = vec![T::one() - cos_sq];
    if n == 3 {
        x.push(T::frac_pi_2());
        y.push(T::one());
    }
    let len = x.len();
    Ok(ZeroSet {
        n,
        x,
        y,
        x_tol: vec![0.0; len],
        residuals: vec![0.0; len],
        multiplicity_certified_simple: true,
        precision: Precision::from_bits(T::MANTISSA_BITS),
        nodes: 0,
    })
}

/// `lim_{t→∞} x_k(t) = (2k - 1)π/(2n)`, `k` from 1.
pub fn cw_limit<T: Real>(n: usize, k: usize) -> T {
    T::pi() * T::from_i64(2 * k as i64 - 1) / T::from_i64(2 * n as i64)
}

/// `d = x_k(t) - (2k-1)π/(2n)` for large `t`, solving
/// `sin(nd) = (-1)^{k-1} Σ_j b_j cos((n-2j)(x_∞ + d))` with
/// `b_j = C(n,j) e^{-4j(n-j)t}` (halved for `n = 2j`) by fixed-point
/// iteration. The result keeps full relative precision however small `d`
/// is. Returns `None` unless `Σ b_j < 1e-6`.
pub fn cw_large_t_deviation<T: Real>(n: usize, k: usize, t: f64) -> Option<T> {
    let tt = T::from_f64(t);
    let mut b = Vec::new();
    let mut binom = T::one();
    for j in 1..=n / 2 {
        binom = binom * T::from_i64((n - j + 1) as i64) / T::from_i64(j as i64);
        let mut bj = binom * (-(T::from_i64(4 * (j * (n - j)) as i64) * tt)).exp();
        if 2 * j == n {
            bj = bj * T::half();
        }
        b.push((n as i64 - 2 * j as i64, bj));
    }
    let total = b.iter().fold(T::zero(), |a, &(_, v)| a + v);
    if !(total < T::from_f64(1e-6)) {
        return None;
    }
    let x_inf = cw_limit::<T>(n, k);
    let sign = if k % 2 == 1 { T::one() } else { -T::one() };
    let nf = T::from_i64(n as i64);
    let mut d = T::zero();
    for _ in 0..200 {
        let rhs = b
            .iter()
            .fold(T::zero(), |a, &(m, bj)| a + bj * (T::from_i64(m) * (x_inf + d)).cos());
        let next = (sign * rhs).asin() / nf;
        let done = (next - d).abs() <= T::unit_roundoff() * next.abs();
        d = next;
        if done {
            break;
        }
    }
    Some(d)
}

/// Random coupling graph whose positive part is connected: a random
/// spanning tree plus extra pairs up to `edge_density · n(n-1)/2` edges,
/// couplings uniform in the range.
pub fn random_connected_graph(n: usize, edge_density: f64, coupling_range: (f64, f64), seed: u64) -> CouplingGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_connected_with(&mut rng, n, edge_density, coupling_range)
}

fn random_connected_with(rng: &mut ChaCha8Rng, n: usize, edge_density: f64, (lo, hi): (f64, f64)) -> CouplingGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut present = vec![vec![false; n]; n];
    let mut pairs = Vec::new();
    for i in 1..n {
        let (a, b) = (order[i], order[rng.gen_range(0..i)]);
        let (u, v) = (a.min(b), a.max(b));
        present[u][v] = true;
        pairs.push((u, v));
    }
    let total = n * (n - 1) / 2;
    let target = ((edge_density * total as f64).round() as usize).clamp(n.saturating_sub(1), total);
    let mut rest: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !present[u][v])
        .collect();
    rest.shuffle(rng);
    pairs.extend(rest.into_iter().take(target - pairs.len()));
    pairs.sort_unstable();
    let edges: Vec<(usize, usize, f64)> = pairs
        .into_iter()
        .map(|(u, v)| (u, v, if hi > lo { rng.gen_range(lo..hi) } else { lo }))
        .collect();
    CouplingGraph::new(n, &edges, None).expect("generated edges are valid")
}

/// Random connected graph with density 0.4, couplings in `[0.1, 2]`, and a
/// varying edge chosen among its edges.
pub fn random_instance(n: usize, seed: u64) -> CouplingGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_connected_with(&mut rng, n, 0.4, (0.1, 2.0));
    let e = g.edges()[rng.gen_range(0..g.edges().len())];
    g.with_varying_edge(e.u, e.v).expect("edge exists")
}

/// `count` instances with `n = 4 + (i mod 7)` and seeds `base + i`.
pub fn instance_set(base_seed: u64, count: usize) -> Vec<CouplingGraph> {
    (0..count)
        .map(|i| random_instance(4 + i % 7, base_seed + i as u64))
        .collect()
}

/// Named scenarios accepted by the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    G5 { beta: f64 },
    CurieWeiss { n: usize },
    Random { seed: u64, n: usize },
}

impl Scenario {
    /// `g5`, `cw:<n>` or `random:<seed>`; `beta` and `n` fill in the
    /// parameters the name leaves open.
    pub fn parse(name: &str, beta: f64, n: usize) -> Result<Self, ScenarioError> {
        let bad = || ScenarioError::UnknownScenario(name.to_string());
        match name.split_once(':') {
            None if name == "g5" => Ok(Scenario::G5 { beta }),
            Some(("cw", v)) => {
                let n: usize = v.parse().map_err(|_| bad())?;
                if n == 0 {
                    return Err(bad());
                }
                Ok(Scenario::CurieWeiss { n })
            }
            Some(("random", v)) => Ok(Scenario::Random {
                seed: v.parse().map_err(|_| bad())?,
                n,
            }),
            _ => Err(bad()),
        }
    }

    /// Graph form; Curie-Weiss maps to the complete graph with pair
    /// coupling `2t` and has no varying edge of its own.
    pub fn graph(&self) -> Result<Option<CouplingGraph>, ScenarioError> {
        match *self {
            Scenario::G5 { beta } => {
                let s = reconstruct_g5().ok_or(ScenarioError::G5NotFound)?;
                Ok(Some(s.graph(beta)?))
            }
            Scenario::CurieWeiss { .. } => Ok(None),
            Scenario::Random { seed, n } => Ok(Some(random_instance(n, seed))),
        }
    }
}
