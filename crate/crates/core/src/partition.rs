//! Magnetization-resolved partition function weights.
//!
//! `Z_t(x) = Σ_σ exp[t σ_{u0}σ_{v0} + Σ J_uv σ_u σ_v + i x Σ σ_u]` is stored as
//! `e^{logscale} Σ_M w_M e^{ixM}` with the nonnegative-magnetization classes
//! computed once and mirrored, so `w_M = w_{-M}` holds exactly.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{CouplingGraph, Edge, GraphError};
use crate::real::Real;

pub const DEFAULT_ENUMERATION_CAP: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("{n} spins exceed the enumeration cap of {cap}")]
    TooManySpins { n: usize, cap: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("weights must be nonnegative with at least one positive entry")]
    InvalidWeights,
}

/// Cosine series `Σ_{M=-n,-n+2,..,n} c_M e^{ixM}` with `c_M = c_{-M}`.
/// `coeffs[k]` holds the coefficient of `M = n - 2k`, `k = 0..=n/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineSeries<T> {
    n: usize,
    logscale: T,
    coeffs: Vec<T>,
}

impl<T: Real> CosineSeries<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn logscale(&self) -> T {
        self.logscale
    }

    /// Coefficients for `M = n, n-2, ..., n mod 2`.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn magnetization(&self, k: usize) -> i64 {
        self.n as i64 - 2 * k as i64
    }

    /// Coefficient for an arbitrary magnetization; zero off the lattice.
    pub fn coeff(&self, m: i64) -> T {
        let n = self.n as i64;
        let a = m.abs();
        if a > n || (n - a) % 2 != 0 {
            return T::zero();
        }
        self.coeffs[((n - a) / 2) as usize]
    }

    fn multiplicity(&self, k: usize) -> T {
        if self.magnetization(k) == 0 {
            T::one()
        } else {
            T::one() + T::one()
        }
    }

    /// Scaled value at real `x` through the cosine form.
    pub fn eval_real(&self, x: T) -> T {
        let mut acc = T::zero();
        for (k, &c) in self.coeffs.iter().enumerate() {
            let m = self.magnetization(k);
            acc += self.multiplicity(k) * c * (T::from_i64(m) * x).cos();
        }
        acc
    }

    /// Scaled derivative in `x` at real `x`.
    pub fn eval_real_derivative(&self, x: T) -> T {
        let mut acc = T::zero();
        for (k, &c) in self.coeffs.iter().enumerate() {
            let m = T::from_i64(self.magnetization(k));
            acc -= self.multiplicity(k) * c * m * (m * x).sin();
        }
        acc
    }

    /// Scaled value at complex `x`. Real arguments go through the cosine form
    /// so the imaginary part is exactly zero.
    pub fn eval(&self, x: Complex<T>) -> Complex<T> {
        if x.im == T::zero() {
            return Complex::new(self.eval_real(x.re), T::zero());
        }
        self.eval_full_sum(x)
    }

    /// Plain exponential sum over every magnetization `-n..=n`.
    pub fn eval_full_sum(&self, x: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        let n = self.n as i64;
        let mut m = -n;
        while m <= n {
            let c = self.coeff(m);
            acc = acc + expi(x, m) * c;
            m += 2;
        }
        acc
    }

    /// `Σ_M |c_M| |e^{ixM}|`, the natural scale for rounding errors of the
    /// sum at `x`.
    pub fn abs_sum(&self, x: Complex<T>) -> T {
        let n = self.n as i64;
        let mut acc = T::zero();
        let mut m = -n;
        while m <= n {
            acc += self.coeff(m).abs() * (-(x.im * T::from_i64(m))).exp();
            m += 2;
        }
        acc
    }

    /// Scaled value at `x = 0`.
    pub fn sum(&self) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (k, &c)| acc + self.multiplicity(k) * c)
    }
}

/// `e^{i x m}` for complex `x`.
pub fn expi<T: Real>(x: Complex<T>, m: i64) -> Complex<T> {
    let mf = T::from_i64(m);
    let (s, c) = (x.re * mf).sin_cos();
    let r = (-(x.im * mf)).exp();
    Complex::new(r * c, r * s)
}

/// Modulus without relying on `Float`.
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    let a = z.re.abs();
    let b = z.im.abs();
    let big = a.max(b);
    if big == T::zero() {
        return T::zero();
    }
    let (ra, rb) = (a / big, b / big);
    big * (ra * ra + rb * rb).sqrt()
}

/// Nonnegative magnetization weights, max-normalised to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationWeights<T> {
    series: CosineSeries<T>,
    rel_err: T,
}

impl<T: Real> MagnetizationWeights<T> {
    /// Builds weights from the `M >= 0` classes (`M = n, n-2, ...`) in any
    /// positive scaling; the result is renormalised to unit maximum.
    pub fn from_classes(n: usize, logscale: T, classes: Vec<T>, rel_err: T) -> Result<Self, PartitionError> {
        if classes.len() != n / 2 + 1 || classes.iter().any(|w| !(*w >= T::zero()) || !w.is_finite()) {
            return Err(PartitionError::InvalidWeights);
        }
        let max = classes.iter().fold(T::zero(), |a, &b| a.max(b));
        if max <= T::zero() {
            return Err(PartitionError::InvalidWeights);
        }
        let coeffs = classes.into_iter().map(|w| w / max).collect();
        Ok(Self {
            series: CosineSeries {
                n,
                logscale: logscale + max.ln(),
                coeffs,
            },
            rel_err,
        })
    }

    pub fn n(&self) -> usize {
        self.series.n
    }

    pub fn logscale(&self) -> T {
        self.series.logscale
    }

    pub fn series(&self) -> &CosineSeries<T> {
        &self.series
    }

    /// Estimated relative error of each stored weight.
    pub fn rel_err(&self) -> T {
        self.rel_err
    }

    pub fn weight(&self, m: i64) -> T {
        self.series.coeff(m)
    }

    pub fn evaluate(&self, x: Complex<T>) -> Complex<T> {
        self.series.eval(x)
    }

    pub fn evaluate_real(&self, x: T) -> T {
        self.series.eval_real(x)
    }

    /// `ln Z(0)` including the log scale.
    pub fn ln_value_at_zero(&self) -> T {
        self.series.logscale + self.series.sum().ln()
    }

    pub fn to_document(&self) -> WeightsDocument {
        let n = self.n() as i64;
        let weights = (0..=self.n())
            .map(|k| {
                let m = n - 2 * k as i64;
                (m, self.weight(m).to_f64())
            })
            .collect();
        WeightsDocument {
            n: self.n(),
            logscale: self.logscale().to_f64(),
            weights,
        }
    }
}

/// JSON export of a weight table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsDocument {
    pub n: usize,
    pub logscale: f64,
    pub weights: Vec<(i64, f64)>,
}

/// Signed weights of `S_t(x) = Σ_σ σ_{u0}σ_{v0} exp[...]`, sharing the
/// normalisation of the matching [`MagnetizationWeights`].
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeightedSum<T> {
    series: CosineSeries<T>,
}

impl<T: Real> EdgeWeightedSum<T> {
    pub fn series(&self) -> &CosineSeries<T> {
        &self.series
    }

    pub fn logscale(&self) -> T {
        self.series.logscale
    }

    pub fn weight(&self, m: i64) -> T {
        self.series.coeff(m)
    }

    pub fn evaluate(&self, x: Complex<T>) -> Complex<T> {
        self.series.eval(x)
    }
}

struct Neumaier<T> {
    sum: T,
    comp: T,
}

impl<T: Real> Neumaier<T> {
    fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    fn add(&mut self, v: T) {
        let s = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - s) + v;
        } else {
            self.comp += (v - s) + self.sum;
        }
        self.sum = s;
    }

    fn total(&self) -> T {
        self.sum + self.comp
    }
}

struct Enumeration<T> {
    logscale: T,
    plain: Vec<T>,
    signed: Vec<T>,
    rel_err: T,
}

/// Exhaustive sum over `2^n` configurations in ascending index order.
/// The varying edge (when present and `with_signed`) contributes the sign of
/// `σ_{u0}σ_{v0}` to the signed table. `t` may be any real shift.
fn enumerate<T: Real>(g: &CouplingGraph, t: T, cap: usize, with_signed: bool) -> Result<Enumeration<T>, PartitionError> {
    let n = g.n();
    if n > cap || n >= 63 {
        return Err(PartitionError::TooManySpins { n, cap });
    }
    let edges: Vec<Edge> = g.edges().to_vec();
    let marked = g.varying_index();
    let couplings: Vec<T> = edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let j = T::from_f64(e.coupling);
            if Some(i) == marked {
                j + t
            } else {
                j
            }
        })
        .collect();
    let total_abs = couplings.iter().fold(T::zero(), |a, &j| a + j.abs());
    let total = couplings.iter().fold(T::zero(), |a, &j| a + j);

    let classes = n / 2 + 1;
    let mut plain: Vec<Neumaier<T>> = (0..classes).map(|_| Neumaier::new()).collect();
    let mut signed: Vec<Neumaier<T>> = (0..classes).map(|_| Neumaier::new()).collect();
    let two = T::one() + T::one();
    let half_up = n.div_ceil(2) as u32;

    for config in 0u64..(1u64 << n) {
        let up = config.count_ones();
        if up < half_up {
            continue;
        }
        // σ_u = +1 iff bit u is set; k indexes M = n - 2k.
        let k = n - up as usize;
        let mut broken = T::zero();
        let mut marked_sign = T::one();
        for (i, e) in edges.iter().enumerate() {
            if ((config >> e.u) ^ (config >> e.v)) & 1 == 1 {
                broken += couplings[i];
                if Some(i) == marked {
                    marked_sign = -T::one();
                }
            }
        }
        let energy = total - two * broken;
        let w = (energy - total_abs).exp();
        plain[k].add(w);
        if with_signed {
            signed[k].add(marked_sign * w);
        }
    }

    let u = T::unit_roundoff();
    let rel_err = u * (T::from_f64(8.0) + T::from_i64(edges.len() as i64 + 2) * (T::one() + total_abs) * two);
    Ok(Enumeration {
        logscale: total_abs,
        plain: plain.iter().map(Neumaier::total).collect(),
        signed: signed.iter().map(Neumaier::total).collect(),
        rel_err,
    })
}

/// Exact magnetization weights of `Z_{G,t}` by enumeration.
pub fn magnetization_weights<T: Real>(g: &CouplingGraph, t: f64) -> Result<MagnetizationWeights<T>, PartitionError> {
    magnetization_weights_capped(g, t, DEFAULT_ENUMERATION_CAP)
}

pub fn magnetization_weights_capped<T: Real>(
    g: &CouplingGraph,
    t: f64,
    cap: usize,
) -> Result<MagnetizationWeights<T>, PartitionError> {
    magnetization_weights_at(g, T::from_f64(t), cap)
}

/// Same as [`magnetization_weights_capped`] with the shift given in the
/// working precision.
pub fn magnetization_weights_at<T: Real>(
    g: &CouplingGraph,
    t: T,
    cap: usize,
) -> Result<MagnetizationWeights<T>, PartitionError> {
    let e = enumerate::<T>(g, t, cap, false)?;
    MagnetizationWeights::from_classes(g.n(), e.logscale, e.plain, e.rel_err)
}

/// Weights of `Z_t` together with the `σ_{u0}σ_{v0}`-weighted sum `S_t`,
/// both on the same scale.
pub fn edge_weighted_sum<T: Real>(
    g: &CouplingGraph,
    t: f64,
) -> Result<(MagnetizationWeights<T>, EdgeWeightedSum<T>), PartitionError> {
    edge_weighted_sum_at(g, T::from_f64(t))
}

pub fn edge_weighted_sum_at<T: Real>(
    g: &CouplingGraph,
    t: T,
) -> Result<(MagnetizationWeights<T>, EdgeWeightedSum<T>), PartitionError> {
    g.require_varying_edge()?;
    let e = enumerate::<T>(g, t, DEFAULT_ENUMERATION_CAP, true)?;
    let max = e.plain.iter().fold(T::zero(), |a, &b| a.max(b));
    let signed = e.signed.iter().map(|&s| s / max).collect();
    let weights = MagnetizationWeights::from_classes(g.n(), e.logscale, e.plain, e.rel_err)?;
    let sum = EdgeWeightedSum {
        series: CosineSeries {
            n: g.n(),
            logscale: weights.logscale(),
            coeffs: signed,
        },
    };
    Ok((weights, sum))
}

/// `<σ_{u0}σ_{v0}>` under the couplings shifted by `t`.
pub fn edge_correlation<T: Real>(g: &CouplingGraph, t: f64) -> Result<T, PartitionError> {
    let (z, s) = edge_weighted_sum::<T>(g, t)?;
    Ok(s.series().sum() / z.series().sum())
}

/// Curie-Weiss weights `W_{n-2k} = C(n,k) e^{t(n-2k)^2}`; no enumeration.
pub fn curie_weiss_weights<T: Real>(n: usize, t: f64) -> MagnetizationWeights<T> {
    let tt = T::from_f64(t);
    let mut log_terms = Vec::with_capacity(n / 2 + 1);
    let mut binom = T::one();
    let mut log_binom_fallback = T::zero();
    for k in 0..=n / 2 {
        if k > 0 {
            let num = T::from_i64((n - k + 1) as i64);
            let den = T::from_i64(k as i64);
            binom = binom * num / den;
            log_binom_fallback += (num / den).ln();
        }
        let ln_c = if binom.is_finite() { binom.ln() } else { log_binom_fallback };
        let m = T::from_i64(n as i64 - 2 * k as i64);
        log_terms.push(ln_c + tt * m * m);
    }
    let max = log_terms.iter().skip(1).fold(log_terms[0], |a, &b| a.max(b));
    let classes: Vec<T> = log_terms.iter().map(|&l| (l - max).exp()).collect();
    let u = T::unit_roundoff();
    let rel_err = u * (T::from_f64(8.0) + T::from_f64(2.0) * (tt.abs() * T::from_i64((n * n) as i64) + T::from_i64(n as i64)));
    MagnetizationWeights::from_classes(n, max, classes, rel_err).expect("binomial weights are positive")
}

/// `|Z_{t-δ}(x) - [-sinh δ S_t(x) + cosh δ Z_t(x)]|` relative to the largest
/// absolute term scale of either side.
pub fn t_shift_residual<T: Real>(g: &CouplingGraph, t: f64, delta: f64, x: Complex<T>) -> Result<T, PartitionError> {
    let d = T::from_f64(delta);
    let tt = T::from_f64(t);
    let shifted = magnetization_weights_at::<T>(g, tt - d, DEFAULT_ENUMERATION_CAP)?;
    let (z, s) = edge_weighted_sum_at::<T>(g, tt)?;
    let (sh, ch) = (d.sinh(), d.cosh());

    let l1 = shifted.logscale();
    let l2 = z.logscale();
    let reference = l1.max(l2);
    let f1 = (l1 - reference).exp();
    let f2 = (l2 - reference).exp();

    let lhs = shifted.evaluate(x) * f1;
    let rhs = (z.evaluate(x) * ch - s.evaluate(x) * sh) * f2;
    let scale_lhs = shifted.series().abs_sum(x) * f1;
    let scale_rhs = (z.series().abs_sum(x) * ch + s.series().abs_sum(x) * sh.abs()) * f2;
    let scale = scale_lhs.max(scale_rhs);
    Ok(cabs(lhs - rhs) / scale)
}
