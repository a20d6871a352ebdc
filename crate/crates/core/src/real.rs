//! Scalar abstraction over the two working precisions.
//!
//! Every numerical routine in the crate is generic over [`Real`]. Two
//! implementations exist: IEEE binary64 (`f64`) for everyday work and the
//! software octuple-precision [`f256`] (237-bit significand) for
//! verification reruns where cancellation would otherwise swamp binary64.

use std::fmt::{Debug, Display, LowerExp};
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use f256::f256;
use num_traits::Num;
use serde::{Deserialize, Serialize};

pub trait Real:
    Copy
    + Debug
    + Display
    + LowerExp
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// Significand bits including the implicit leading bit.
    const MANTISSA_BITS: u32;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;

    /// Unit roundoff `u = 2^-p`.
    fn unit_roundoff() -> Self;
    fn pi() -> Self;
    fn frac_pi_2() -> Self;

    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn exp_m1(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn tan(self) -> Self;
    fn asin(self) -> Self;
    fn acos(self) -> Self;
    fn is_finite(self) -> bool;

    fn from_i64(v: i64) -> Self {
        Self::from_f64(v as f64)
    }

    fn sinh(self) -> Self {
        let two = Self::one() + Self::one();
        (self.exp_m1() - (-self).exp_m1()) / two
    }

    fn cosh(self) -> Self {
        let two = Self::one() + Self::one();
        (self.exp() + (-self).exp()) / two
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn powi(self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    fn half() -> Self {
        Self::from_f64(0.5)
    }
}

impl Real for f64 {
    const MANTISSA_BITS: u32 = f64::MANTISSA_DIGITS;

    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn unit_roundoff() -> Self {
        f64::EPSILON / 2.0
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn frac_pi_2() -> Self {
        std::f64::consts::FRAC_PI_2
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn exp_m1(self) -> Self {
        f64::exp_m1(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn asin(self) -> Self {
        f64::asin(self)
    }
    fn acos(self) -> Self {
        f64::acos(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
}

const F256_FRACTION_BITS: u32 = 236;
const F256_EXP_BIAS: i32 = 262_143;

impl Real for f256 {
    const MANTISSA_BITS: u32 = F256_FRACTION_BITS + 1;

    fn from_f64(v: f64) -> Self {
        f256::from(v)
    }

    fn to_f64(self) -> f64 {
        f256_to_f64(self)
    }

    fn unit_roundoff() -> Self {
        f256::EPSILON.div2()
    }
    fn pi() -> Self {
        ::f256::consts::PI
    }
    fn frac_pi_2() -> Self {
        ::f256::consts::FRAC_PI_2
    }
    fn abs(self) -> Self {
        f256::abs(&self)
    }
    fn sqrt(self) -> Self {
        f256::sqrt(self)
    }
    fn exp(self) -> Self {
        f256::exp(&self)
    }
    fn exp_m1(self) -> Self {
        f256::exp_m1(&self)
    }
    fn ln(self) -> Self {
        f256::ln(&self)
    }
    fn sin(self) -> Self {
        f256::sin(&self)
    }
    fn cos(self) -> Self {
        f256::cos(&self)
    }
    fn sin_cos(self) -> (Self, Self) {
        f256::sin_cos(&self)
    }
    fn tan(self) -> Self {
        f256::tan(&self)
    }
    fn asin(self) -> Self {
        f256::asin(&self)
    }
    fn acos(self) -> Self {
        f256::acos(&self)
    }
    fn is_finite(self) -> bool {
        f256::is_finite(self)
    }
}

/// Round-to-nearest-even conversion from the octuple bit layout
/// (1 sign, 19 exponent, 236 fraction bits) to binary64.
fn f256_to_f64(v: f256) -> f64 {
    if v.is_nan() {
        return f64::NAN;
    }
    let negative = v.is_sign_negative();
    let sign = if negative { -1.0 } else { 1.0 };
    if v.is_infinite() {
        return sign * f64::INFINITY;
    }
    if v.eq_zero() {
        return sign * 0.0;
    }
    let (hi, lo) = v.abs().to_bits();
    let biased = (hi >> 108) as i32;
    let frac_hi = hi & ((1u128 << 108) - 1);
    // Subnormal octuple values are far below the binary64 range.
    if biased == 0 {
        return sign * 0.0;
    }
    let exponent = biased - F256_EXP_BIAS;
    // Keep 53 significant bits plus a round bit and a sticky bit.
    let top = frac_hi >> (108 - 52);
    let round = (frac_hi >> (108 - 53)) & 1;
    let sticky = (frac_hi & ((1u128 << (108 - 53)) - 1)) != 0 || lo != 0;
    let mut mantissa = (1u128 << 52) | top;
    if round == 1 && (sticky || mantissa & 1 == 1) {
        mantissa += 1;
    }
    let m = mantissa as f64;
    sign * scale_pow2(m, exponent - 52)
}

fn scale_pow2(m: f64, e: i32) -> f64 {
    if e > 1100 {
        return f64::INFINITY;
    }
    if e < -1200 {
        return 0.0;
    }
    let mut value = m;
    let mut e = e;
    while e > 1000 {
        value *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        value *= 2f64.powi(-1000);
        e += 1000;
    }
    value * 2f64.powi(e)
}

/// Working precision selector exposed to configuration surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Binary64,
    Octuple,
}

impl Precision {
    /// Maps a requested significand width onto the nearest available type
    /// that is at least as wide, saturating at octuple.
    pub fn from_bits(bits: u32) -> Self {
        if bits <= f64::MANTISSA_DIGITS {
            Precision::Binary64
        } else {
            Precision::Octuple
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Precision::Binary64 => <f64 as Real>::MANTISSA_BITS,
            Precision::Octuple => <f256 as Real>::MANTISSA_BITS,
        }
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::Binary64
    }
}
