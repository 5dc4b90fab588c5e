//! Leveled log coordinates.
//!
//! A nonzero complex number is stored as `z = R_level · e^{s + iθ}`. Offsets
//! stay small near the reference radius even when `log|z|` itself is
//! astronomically large, and moving between levels only adds exact table
//! differences to `s`.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::construction::Construction;
use crate::error::{Error, Result};
use crate::wide::Wide;

/// Ratios `|w/z|` below `e^{-DROP_GUARD}` are dropped from sums.
pub const DROP_GUARD: f64 = 500.0;

/// `|1 + w/z|` below this is reported as cancellation.
pub const CANCELLATION_FLOOR: f64 = 1e-12;

const TAU: f64 = 2.0 * PI;

/// Reduces an angle to the principal interval `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let mut r = x.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    if r <= -PI {
        r += TAU;
    }
    r
}

#[derive(Clone, Debug, PartialEq)]
pub struct LPoint {
    pub level: usize,
    /// `log(|z| / R_level)`.
    pub s: Wide,
    /// Principal argument in `(−π, π]`.
    pub theta: f64,
    /// Continuous argument; congruent to `theta` mod 2π when present.
    pub lift: Option<f64>,
}

/// A point of the plane: either the origin or a leveled nonzero value.
#[derive(Clone, Debug, PartialEq)]
pub enum LValue {
    Zero,
    Point(LPoint),
}

impl LValue {
    pub fn point(&self) -> Option<&LPoint> {
        match self {
            LValue::Zero => None,
            LValue::Point(p) => Some(p),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LValue::Zero)
    }
}

impl From<LPoint> for LValue {
    fn from(p: LPoint) -> Self {
        LValue::Point(p)
    }
}

impl LPoint {
    pub fn new(level: usize, s: f64, theta: f64) -> Self {
        Self::from_wide(level, Wide::from_f64(s), theta)
    }

    pub fn from_wide(level: usize, s: Wide, theta: f64) -> Self {
        LPoint {
            level,
            s,
            theta: wrap_angle(theta),
            lift: None,
        }
    }

    /// Point with the argument lift set to `lift` and `theta` its principal value.
    pub fn with_lift(level: usize, s: Wide, lift: f64) -> Self {
        LPoint {
            level,
            s,
            theta: wrap_angle(lift),
            lift: Some(lift),
        }
    }

    /// `R_level` itself.
    pub fn radius(level: usize) -> Self {
        Self::new(level, 0.0, 0.0)
    }

    pub fn s_f64(&self) -> f64 {
        self.s.to_f64()
    }

    pub fn conj(&self) -> Self {
        LPoint {
            level: self.level,
            s: self.s.clone(),
            theta: wrap_angle(-self.theta),
            lift: self.lift.map(|l| -l),
        }
    }

    /// Argument, preferring the lift when present.
    pub fn arg(&self) -> f64 {
        self.lift.unwrap_or(self.theta)
    }

    /// Same number, expressed relative to `R_target`. Exact: rebasing back
    /// reproduces `s` bit for bit.
    pub fn rebase(&self, ctx: &Construction, target: usize) -> Result<LPoint> {
        if target > ctx.max_level() {
            return Err(Error::LevelOutOfRange {
                level: target,
                max: ctx.max_level(),
            });
        }
        Ok(self.rebase_unchecked(ctx, target))
    }

    /// Rebase allowing the two extra tabulated levels past `max_level`.
    pub(crate) fn rebase_unchecked(&self, ctx: &Construction, target: usize) -> LPoint {
        if target == self.level {
            return self.clone();
        }
        LPoint {
            level: target,
            s: self.s.add_exact(&ctx.log_r_gap(self.level, target)),
            theta: self.theta,
            lift: self.lift,
        }
    }

    /// Moves to the tabulated level whose radius is closest in log scale.
    pub fn normalized(&self, ctx: &Construction) -> LPoint {
        let mut p = self.clone();
        loop {
            let s = p.s.to_f64();
            if p.level < ctx.table_top() {
                let up = ctx.log_r_gap(p.level + 1, p.level).to_f64();
                if s > 0.5 * up {
                    p = p.rebase_unchecked(ctx, p.level + 1);
                    continue;
                }
            }
            if p.level > 0 {
                let down = ctx.log_r_gap(p.level, p.level - 1).to_f64();
                if s < -0.5 * down {
                    p = p.rebase_unchecked(ctx, p.level - 1);
                    continue;
                }
            }
            return p;
        }
    }

    /// Rounds `s` to the working precision.
    pub fn rounded(mut self, prec: usize) -> LPoint {
        self.s = self.s.round(prec);
        self
    }

    /// `log|z| − log R_level` for a value `log|z|` given as `(level, offset)`.
    pub fn log_modulus_at(&self, ctx: &Construction, level: usize) -> Wide {
        self.rebase_unchecked(ctx, level).s
    }
}

/// Product, expressed at the level of `p`.
pub fn lmul(p: &LPoint, q: &LPoint, ctx: &Construction) -> LPoint {
    let s = p.s.add_exact(&q.s).add_exact(ctx.log_r(q.level));
    let lift = match (p.lift, q.lift) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    };
    LPoint {
        level: p.level,
        s: s.round(ctx.prec()),
        theta: wrap_angle(p.theta + q.theta),
        lift,
    }
}

/// `z^k`, expressed at the level of `p`.
pub fn lpow(p: &LPoint, k: i64, ctx: &Construction) -> LPoint {
    let base = ctx.log_r(p.level);
    let s = p.s.add_exact(base).mul_int_exact(k).sub_exact(base);
    LPoint {
        level: p.level,
        s,
        theta: wrap_angle(p.theta * k as f64),
        lift: p.lift.map(|l| l * k as f64),
    }
}

/// Multiplies by the constant `e^{log_c + i·arg_c}`.
pub fn lscale(p: &LPoint, log_c: f64, arg_c: f64) -> LPoint {
    if log_c == 0.0 && arg_c == 0.0 {
        return p.clone();
    }
    LPoint {
        level: p.level,
        s: p.s.add_f64_exact(log_c),
        theta: wrap_angle(p.theta + arg_c),
        lift: p.lift.map(|l| l + arg_c),
    }
}

/// Sum of two leveled points. See [`ladd_with_bound`].
pub fn ladd(p: &LPoint, q: &LPoint, ctx: &Construction) -> Result<LValue> {
    ladd_with_bound(p, q, ctx).map(|(v, _)| v)
}

/// Sum of two leveled points together with an absolute bound on the log-scale
/// error from dropping a negligible term (zero when nothing was dropped).
///
/// The result is at the common level (the higher of the two), with the lift
/// carried over from the larger operand.
pub fn ladd_with_bound(p: &LPoint, q: &LPoint, ctx: &Construction) -> Result<(LValue, f64)> {
    let level = p.level.max(q.level);
    let a = p.rebase_unchecked(ctx, level);
    let b = q.rebase_unchecked(ctx, level);
    let (big, small) = if a.s >= b.s { (a, b) } else { (b, a) };
    let delta = small.s.sub(&big.s, 64).to_f64();
    if delta < -DROP_GUARD {
        return Ok((LValue::Point(big.rounded(ctx.prec())), delta.exp()));
    }
    let phi = wrap_angle(small.theta - big.theta);
    let (log_mod, arg) = log_one_plus(delta, phi);
    let residual = log_mod.exp();
    if residual < CANCELLATION_FLOOR {
        return Err(Error::CatastrophicCancellation { residual });
    }
    let s = big.s.add(&Wide::from_f64(log_mod), ctx.prec());
    let out = LPoint {
        level,
        s,
        theta: wrap_angle(big.theta + arg),
        lift: big.lift.map(|l| l + arg),
    };
    Ok((LValue::Point(out), 0.0))
}

/// `log(1 + e^{δ + iφ})` as (log-modulus, argument), for `δ ≤ 0`.
///
/// Uses `|1 + r e^{iφ}|² = (1 − r)² + 4r·cos²(φ/2)` so that points near
/// `r = 1, φ = π` keep their relative accuracy.
pub fn log_one_plus(delta: f64, phi: f64) -> (f64, f64) {
    let r = delta.exp();
    let one_minus_r = -delta.exp_m1();
    let c = (0.5 * phi).cos();
    let re = one_minus_r + 2.0 * r * c * c;
    let im = r * phi.sin();
    let mod2 = one_minus_r * one_minus_r + 4.0 * r * c * c;
    let log_mod = if mod2 < 0.5 {
        0.5 * mod2.ln()
    } else {
        // |1 + r e^{iφ}|² − 1 = r(r + 2cos φ), accurate for small r.
        0.5 * (r * (r + 2.0 * phi.cos())).ln_1p()
    };
    (log_mod, im.atan2(re))
}

/// Three-way comparison of `log|p|` with the value `log R_level + bound`.
/// Differences within two units in the last place of the working precision
/// compare equal.
pub fn cmp_modulus(p: &LPoint, level: usize, bound: &Wide, ctx: &Construction) -> Ordering {
    let diff = p.s.sub_exact(bound).add_exact(&ctx.log_r_gap(p.level, level));
    if diff.is_zero() {
        return Ordering::Equal;
    }
    let d = diff.to_f64();
    let scale = p.s.to_f64().abs().max(bound.to_f64().abs());
    let slack = 2.0 * Wide::from_f64(scale).ulp(ctx.prec());
    if d.abs() <= slack {
        Ordering::Equal
    } else if d > 0.0 {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

impl fmt::Display for LPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}:{:.16e}:{:.16e}", self.level, self.s.to_f64(), self.theta)
    }
}

impl FromStr for LPoint {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected L<level>:<s>:<theta>, got {text:?}"));
        let rest = text.trim().strip_prefix('L').ok_or_else(bad)?;
        let mut parts = rest.split(':');
        let level: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let s: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let theta: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if parts.next().is_some() || !s.is_finite() || !theta.is_finite() {
            return Err(bad());
        }
        Ok(LPoint::new(level, s, theta))
    }
}

impl fmt::Display for LValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LValue::Zero => f.write_str("zero"),
            LValue::Point(p) => p.fmt(f),
        }
    }
}
