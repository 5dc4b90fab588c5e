//! Wide binary floating point for log-scale quantities.
//!
//! Absolute logarithms in the construction grow like `γ·n!`, which is far
//! beyond the 53-bit significand of `f64` once `n` is in the teens. `Wide`
//! wraps an arbitrary-precision binary float. Two kinds of operations are
//! offered: rounded ones that take a working precision in bits, and exact
//! ones (`*_exact`) whose result precision grows to hold the full answer.
//! Level shifts use the exact forms, so rebasing a point and rebasing it back
//! reproduces the original value bit for bit.

use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, RoundingMode};

const RM: RoundingMode = RoundingMode::ToEven;

/// Bits used when converting from `f64`; any width >= 53 is exact.
const F64_BITS: usize = 64;

#[derive(Clone)]
pub struct Wide(BigFloat);

impl Wide {
    pub fn zero() -> Self {
        Wide(BigFloat::from_word(0, F64_BITS))
    }

    /// Exact conversion. Non-finite input is a caller bug.
    pub fn from_f64(x: f64) -> Self {
        debug_assert!(x.is_finite(), "non-finite wide value {x}");
        Wide(BigFloat::from_f64(x, F64_BITS))
    }

    /// Exact conversion of an unsigned integer.
    pub fn from_u128(v: u128) -> Self {
        Wide(BigFloat::from_u128(v, 128))
    }

    pub fn from_i64(v: i64) -> Self {
        Wide(BigFloat::from_i64(v, F64_BITS))
    }

    pub fn add(&self, rhs: &Wide, prec: usize) -> Wide {
        Wide(self.0.add(&rhs.0, prec, RM))
    }

    pub fn sub(&self, rhs: &Wide, prec: usize) -> Wide {
        Wide(self.0.sub(&rhs.0, prec, RM))
    }

    pub fn mul(&self, rhs: &Wide, prec: usize) -> Wide {
        Wide(self.0.mul(&rhs.0, prec, RM))
    }

    pub fn div(&self, rhs: &Wide, prec: usize) -> Wide {
        Wide(self.0.div(&rhs.0, prec, RM))
    }

    pub fn sqrt(&self, prec: usize) -> Wide {
        Wide(self.0.sqrt(prec, RM))
    }

    // The backend's full-precision operations return zero when either operand
    // is zero, so zeros are handled here.
    pub fn add_exact(&self, rhs: &Wide) -> Wide {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        Wide(self.0.add_full_prec(&rhs.0))
    }

    pub fn sub_exact(&self, rhs: &Wide) -> Wide {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.neg();
        }
        Wide(self.0.sub_full_prec(&rhs.0))
    }

    pub fn mul_exact(&self, rhs: &Wide) -> Wide {
        if self.is_zero() || rhs.is_zero() {
            return Wide::zero();
        }
        Wide(self.0.mul_full_prec(&rhs.0))
    }

    /// Exact product with a small integer.
    pub fn mul_int_exact(&self, k: i64) -> Wide {
        self.mul_exact(&Wide::from_i64(k))
    }

    /// Exact sum with an `f64` correction term.
    pub fn add_f64_exact(&self, x: f64) -> Wide {
        self.add_exact(&Wide::from_f64(x))
    }

    /// Rounds to `prec` significant bits.
    pub fn round(&self, prec: usize) -> Wide {
        let mut v = self.0.clone();
        // Only fails on allocation errors, which leave the value NaN anyway.
        let _ = v.set_precision(prec, RM);
        Wide(v)
    }

    pub fn neg(&self) -> Wide {
        Wide(self.0.neg())
    }

    pub fn abs(&self) -> Wide {
        Wide(self.0.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.0.is_nan() || self.0.is_inf())
    }

    /// Number of significand bits currently held.
    pub fn precision(&self) -> usize {
        self.0.precision().unwrap_or(0)
    }

    /// Nearest `f64`, correctly rounded from the leading 128 bits plus a
    /// sticky bit for the remainder.
    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let Some((words, _, _, exp, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        let len = words.len();
        if len == 0 || words.iter().all(|w| *w == 0) {
            return 0.0;
        }
        // Words are little-endian; the value is 0.mantissa * 2^exp.
        let hi = words[len - 1] as u128;
        let lo = if len >= 2 { words[len - 2] as u128 } else { 0 };
        let sticky = len > 2 && words[..len - 2].iter().any(|w| *w != 0);
        let top = (hi << 64) | lo | u128::from(sticky);
        let mag = ldexp(top as f64, exp as i64 - 128);
        if self.0.is_negative() {
            -mag
        } else {
            mag
        }
    }

    /// Unit in the last place for a value of this magnitude at `prec` bits.
    pub fn ulp(&self, prec: usize) -> f64 {
        let x = self.to_f64().abs();
        if x == 0.0 {
            return 0.0;
        }
        ldexp(1.0, x.log2().floor() as i64 + 1 - prec as i64)
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl PartialEq for Wide {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Wide {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl From<f64> for Wide {
    fn from(x: f64) -> Self {
        Wide::from_f64(x)
    }
}

impl fmt::Debug for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Wide({:e}; {} bits)", self.to_f64(), self.precision())
    }
}

impl fmt::Display for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}
