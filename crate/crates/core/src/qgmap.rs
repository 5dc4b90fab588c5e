//! The piecewise map `g`, its band interpolation, and dilatation estimates.
//!
//! With `w = z/R_n` and `g(z) = R_{n+1}·G(w)`:
//!
//! | tile | range | `g` |
//! |---|---|---|
//! | `InnerCore` | `|z| ≤ P_2` | `z²` |
//! | `InterpLower(n)` | `P_n < |z| < Q_n` | ramp from `wⁿ` to `c_n(w−1)wⁿ` |
//! | `CriticalBand(n)` | `Q_n ≤ |z| ≤ S_n` | `c_n(w−1)wⁿ` |
//! | `InterpUpper(n)` | `S_n < |z| < T_n` | ramp from `c_n(w−1)wⁿ` to `w^{n+1}` |
//! | `Core(n)` | `T_n ≤ |z| ≤ P_{n+1}` | `w^{n+1}` |
//!
//! On the open bands the map is `log G(u) = k·u + t·Δ(u)` in `u = log w`,
//! where `k·u` is the power branch, `Δ` the log-ratio of the two boundary
//! maps and `t` an affine ramp in `Re u` from 0 to 1 across the band.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{log_neg_c, Construction};
use crate::error::{Error, Result};
use crate::logplane::{cmp_modulus, ladd, LPoint, LValue};
use crate::wide::Wide;

/// Which piece of `g` applies at a given modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionTag {
    InnerCore,
    InterpLower(usize),
    CriticalBand(usize),
    InterpUpper(usize),
    Core(usize),
}

impl RegionTag {
    /// The reference level `n` of the tile (1 for the inner core).
    pub fn level(&self) -> usize {
        match *self {
            RegionTag::InnerCore => 1,
            RegionTag::InterpLower(n)
            | RegionTag::CriticalBand(n)
            | RegionTag::InterpUpper(n)
            | RegionTag::Core(n) => n,
        }
    }

    pub fn is_band(&self) -> bool {
        matches!(self, RegionTag::InterpLower(_) | RegionTag::InterpUpper(_))
    }

    /// Index `j` of the interpolation region `E_j = ann(S_j,T_j) ∪ ann(P_{j+1},Q_{j+1})`
    /// containing this tile.
    pub fn band_index(&self) -> Option<usize> {
        match *self {
            RegionTag::InterpUpper(j) => Some(j),
            RegionTag::InterpLower(n) => Some(n - 1),
            _ => None,
        }
    }

    /// Position along the radial tiling, in units of annuli `ann(S_n, Q_{n+1})`:
    /// consecutive points of an escaping orbit advance by one.
    pub fn stage(&self) -> f64 {
        match *self {
            RegionTag::InnerCore => 1.0,
            RegionTag::InterpLower(n) => n as f64 - 1.0,
            RegionTag::CriticalBand(n) => n as f64 - 0.5,
            RegionTag::InterpUpper(n) | RegionTag::Core(n) => n as f64,
        }
    }

    /// Short name without the level.
    pub fn kind(&self) -> &'static str {
        match self {
            RegionTag::InnerCore => "InnerCore",
            RegionTag::InterpLower(_) => "InterpLower",
            RegionTag::CriticalBand(_) => "CriticalBand",
            RegionTag::InterpUpper(_) => "InterpUpper",
            RegionTag::Core(_) => "Core",
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionTag::InnerCore => f.write_str("InnerCore"),
            other => write!(f, "{}({})", other.kind(), other.level()),
        }
    }
}

/// The tile containing `p`. Boundary moduli belong to the closed tiles.
pub fn classify(p: &LPoint, ctx: &Construction) -> Result<RegionTag> {
    if let Some(n) = ctx.unordered_at() {
        return Err(Error::UnorderedRadii { n });
    }
    let top = ctx.max_level();
    let h = |n: usize| ctx.half_width(n).clone();
    let two_h = |n: usize| {
        let v = ctx.half_width(n);
        v.add_exact(v)
    };
    if cmp_modulus(p, top, &two_h(top), ctx) == Ordering::Greater {
        return Err(Error::BeyondMaxLevel { max_level: top });
    }
    let above_p = |n: usize| cmp_modulus(p, n, &two_h(n).neg(), ctx) == Ordering::Greater;
    if !above_p(2) {
        return Ok(RegionTag::InnerCore);
    }
    // Largest n with |z| > P_n.
    let (mut lo, mut hi) = (2, top);
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if above_p(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let n = lo;
    if cmp_modulus(p, n, &h(n).neg(), ctx) == Ordering::Less {
        return Ok(RegionTag::InterpLower(n));
    }
    if cmp_modulus(p, n, &h(n), ctx) != Ordering::Greater {
        return Ok(RegionTag::CriticalBand(n));
    }
    if cmp_modulus(p, n, &two_h(n), ctx) == Ordering::Less {
        return Ok(RegionTag::InterpUpper(n));
    }
    Ok(RegionTag::Core(n))
}

/// Evaluates `g`. The result is placed at the level nearest its modulus and
/// rounded to the working precision.
pub fn eval_g(v: &LValue, ctx: &Construction) -> Result<LValue> {
    let p = match v {
        LValue::Zero => return Ok(LValue::Zero),
        LValue::Point(p) => p,
    };
    let tag = classify(p, ctx)?;
    eval_tagged(p, tag, ctx)
}

/// Evaluates `g` on a point already known to lie in `tag`.
pub(crate) fn eval_tagged(p: &LPoint, tag: RegionTag, ctx: &Construction) -> Result<LValue> {
    let out = match tag {
        RegionTag::InnerCore => {
            // z² with z = R_1·e^u lands at R_2·e^{2u}.
            let q = p.rebase_unchecked(ctx, 1);
            LPoint::from_wide(2, q.s.mul_int_exact(2), 2.0 * q.theta)
        }
        RegionTag::Core(n) => {
            let q = p.rebase_unchecked(ctx, n);
            let k = n as i64 + 1;
            LPoint::from_wide(n + 1, q.s.mul_int_exact(k), k as f64 * q.theta)
        }
        RegionTag::CriticalBand(n) => {
            let q = p.rebase_unchecked(ctx, n);
            if q.s.is_zero() && q.theta == 0.0 {
                return Ok(LValue::Zero);
            }
            let minus_r = LPoint::new(n, 0.0, PI);
            let diff = match ladd(&q, &minus_r, ctx)? {
                LValue::Point(d) => d,
                LValue::Zero => return Ok(LValue::Zero),
            };
            let s = diff
                .s
                .add_exact(&q.s.mul_int_exact(n as i64))
                .add_f64_exact(log_neg_c(n));
            LPoint::from_wide(n + 1, s, PI + diff.theta + n as f64 * q.theta)
        }
        RegionTag::InterpLower(_) | RegionTag::InterpUpper(_) => band_value(p, tag, ctx),
    };
    Ok(LValue::Point(out.normalized(ctx).rounded(ctx.prec())))
}

/// The interpolating map on an open band. Fails unless `p` lies in `band`.
pub fn interpolate_band(p: &LPoint, ctx: &Construction, band: RegionTag) -> Result<LPoint> {
    if !band.is_band() || classify(p, ctx)? != band {
        return Err(Error::OutsideBand { band });
    }
    Ok(band_value(p, band, ctx).normalized(ctx).rounded(ctx.prec()))
}

fn band_value(p: &LPoint, band: RegionTag, ctx: &Construction) -> LPoint {
    let n = band.level();
    let q = p.rebase_unchecked(ctx, n);
    let h = ctx.half_width(n);
    let upper = matches!(band, RegionTag::InterpUpper(_));
    let k = if upper { n + 1 } else { n };
    let t = ramp_position(&q.s, h, upper, ctx.prec());
    let ramp = t * band_delta(n, upper, q.s.to_f64(), q.theta);
    let s = q.s.mul_int_exact(k as i64).add_f64_exact(ramp.re);
    LPoint::from_wide(n + 1, s, k as f64 * q.theta + ramp.im)
}

/// `t ∈ [0, 1]`: 1 at the critical band edge, 0 at the power-map edge.
fn ramp_position(s: &Wide, h: &Wide, upper: bool, prec: usize) -> f64 {
    let two_h = h.add_exact(h);
    let num = if upper {
        two_h.sub_exact(s)
    } else {
        s.add_exact(&two_h)
    };
    num.div(h, prec).to_f64().clamp(0.0, 1.0)
}

/// Log-ratio of the critical-band polynomial to the power branch, at
/// `u = s + iθ` (rescaled by `R_n`).
///
/// Lower band: `log(−c_n) + Log(1 − e^u)`; upper band:
/// `log(−c_n) + iπ + Log(1 − e^{−u})`. Both logs stay in the right half-plane
/// on their bands, so the principal branch is continuous.
pub fn band_delta(n: usize, upper: bool, s: f64, theta: f64) -> Complex64 {
    let (x, phi) = if upper { (-s, -theta) } else { (s, theta) };
    // Log(1 − e^{x + iφ}) for x < 0.
    let r = x.exp();
    let re = 0.5 * (r * r - 2.0 * r * phi.cos()).ln_1p();
    let im = (-r * phi.sin()).atan2(1.0 - r * phi.cos());
    let shift = if upper { PI } else { 0.0 };
    Complex64::new(log_neg_c(n) + re, im + shift)
}

/// Bounds of an interpolation band in `s` relative to `R_n`.
pub fn band_bounds(ctx: &Construction, band: RegionTag) -> Result<(f64, f64)> {
    let n = band.level();
    if n < 2 || n > ctx.max_level() {
        return Err(Error::LevelOutOfRange {
            level: n,
            max: ctx.max_level(),
        });
    }
    let h = ctx.half_width_f64(n);
    match band {
        RegionTag::InterpLower(_) => Ok((-2.0 * h, -h)),
        RegionTag::InterpUpper(_) => Ok((h, 2.0 * h)),
        other => Err(Error::OutsideBand { band: other }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilatationStats {
    pub band: RegionTag,
    /// `(radial, angular)` grid size.
    pub grid: (usize, usize),
    #[serde(rename = "max_K")]
    pub max_k: f64,
    #[serde(rename = "mean_K")]
    pub mean_k: f64,
    pub max_mu: f64,
    /// Finite-difference step in log coordinates.
    pub step: f64,
}

/// Measures the dilatation of the band interpolation on a `radial × angular`
/// grid of cell centres.
pub fn estimate_dilatation(
    ctx: &Construction,
    band: RegionTag,
    radial: usize,
    angular: usize,
) -> Result<DilatationStats> {
    let (lo, hi) = band_bounds(ctx, band)?;
    let n = band.level();
    let upper = matches!(band, RegionTag::InterpUpper(_));
    let k = if upper { n + 1 } else { n } as f64;
    let h = ctx.half_width_f64(n);
    // The power branch k·u is evaluated relative to the band's lower edge so
    // the returned log-modulus stays moderate; constants do not affect μ.
    let map = move |s: f64, theta: f64| -> Result<(f64, f64)> {
        let t = if upper { (2.0 * h - s) / h } else { (s + 2.0 * h) / h };
        let d = t * band_delta(n, upper, s, theta);
        Ok((k * (s - lo) + d.re, k * theta + d.im))
    };
    estimate_dilatation_with(band, lo, hi, radial, angular, map)
}

/// Dilatation of an arbitrary map given in log coordinates,
/// `(s, θ) ↦ (log|G|, arg G)`, over the band `lo < s < hi`. The returned
/// argument must be continuous (not reduced mod 2π): the step is the same in
/// both directions and can exceed `π/k`.
///
/// With `v = log G` and `u = s + iθ`, `∂_u v = (v_s − i v_θ)/2` and
/// `∂_ū v = (v_s + i v_θ)/2`; `|μ|` is invariant under the holomorphic
/// changes of variable `w = e^u`, `G = e^v`.
pub fn estimate_dilatation_with<F>(
    band: RegionTag,
    lo: f64,
    hi: f64,
    radial: usize,
    angular: usize,
    map: F,
) -> Result<DilatationStats>
where
    F: Fn(f64, f64) -> Result<(f64, f64)> + Sync,
{
    if radial < 8 || angular < 8 {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: format!("need at least 8x8, got {radial}x{angular}"),
        });
    }
    if !(hi > lo) {
        return Err(Error::InvertedBounds {
            inner: lo,
            outer: hi,
        });
    }
    let width = hi - lo;
    let step = width / (4.0 * radial as f64);
    let dtheta = 2.0 * PI / angular as f64;
    let mus: Vec<f64> = (0..radial * angular)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / angular, idx % angular);
            let s = lo + (i as f64 + 0.5) * width / radial as f64;
            let theta = -PI + (j as f64 + 0.5) * dtheta;
            point_mu(&map, s, theta, step)
        })
        .collect::<Result<_>>()?;
    let max_mu = mus.iter().cloned().fold(0.0, f64::max);
    let k_of = |mu: f64| {
        if mu < 1.0 {
            (1.0 + mu) / (1.0 - mu)
        } else {
            f64::INFINITY
        }
    };
    let mean_k = mus.iter().map(|&m| k_of(m)).sum::<f64>() / mus.len() as f64;
    Ok(DilatationStats {
        band,
        grid: (radial, angular),
        max_k: k_of(max_mu),
        mean_k,
        max_mu,
        step,
    })
}

fn point_mu<F>(map: &F, s: f64, theta: f64, step: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<(f64, f64)>,
{
    let (sp, tp) = map(s + step, theta)?;
    let (sm, tm) = map(s - step, theta)?;
    let (ap, bp) = map(s, theta + step)?;
    let (am, bm) = map(s, theta - step)?;
    let inv = 0.5 / step;
    let v_s = Complex64::new((sp - sm) * inv, (tp - tm) * inv);
    let v_t = Complex64::new((ap - am) * inv, (bp - bm) * inv);
    let i = Complex64::i();
    let d_u = 0.5 * (v_s - i * v_t);
    let d_ubar = 0.5 * (v_s + i * v_t);
    let mag = d_u.norm();
    if mag < 1e-300 {
        return Err(Error::DegenerateJacobian { magnitude: mag });
    }
    Ok(d_ubar.norm() / mag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logplane::wrap_angle;
    use crate::construction::ConstructionParams;

    fn ctx() -> Construction {
        Construction::new(ConstructionParams::new(60.0, 0.01, 20, 64, 64).unwrap()).unwrap()
    }

    #[test]
    fn classify_examples() {
        let c = ctx();
        assert_eq!(classify(&LPoint::radius(3), &c).unwrap(), RegionTag::CriticalBand(3));
        let p2 = c.level_radii(2).unwrap().log_p;
        let half = LPoint::from_wide(0, p2.add_f64_exact(-(2f64.ln())), 0.0);
        assert_eq!(classify(&half, &c).unwrap(), RegionTag::InnerCore);
        let mid = c
            .level_radii(3)
            .unwrap()
            .log_t
            .add_exact(&c.level_radii(4).unwrap().log_p)
            .div(&Wide::from_f64(2.0), 128);
        let p = LPoint::from_wide(0, mid, 0.3);
        assert_eq!(classify(&p, &c).unwrap(), RegionTag::Core(3));
    }

    #[test]
    fn boundaries_go_to_closed_tiles() {
        let c = ctx();
        for n in 2..=20 {
            let r = c.level_radii(n).unwrap();
            let at = |s: &Wide| classify(&LPoint::from_wide(n, s.sub_exact(&r.log_r), 0.0), &c).unwrap();
            assert_eq!(at(&r.log_q), RegionTag::CriticalBand(n));
            assert_eq!(at(&r.log_s), RegionTag::CriticalBand(n));
            assert_eq!(at(&r.log_t), RegionTag::Core(n));
            let expected_p = if n == 2 { RegionTag::InnerCore } else { RegionTag::Core(n - 1) };
            assert_eq!(at(&r.log_p), expected_p);
        }
        let beyond = LPoint::new(20, 2.0 * c.half_width_f64(20) + 1.0, 0.0);
        assert!(matches!(classify(&beyond, &c), Err(Error::BeyondMaxLevel { .. })));
    }

    #[test]
    fn unordered_radii_rejected() {
        let c = Construction::new(ConstructionParams::new(1.0, 0.01, 5, 16, 64).unwrap()).unwrap();
        assert!(matches!(
            classify(&LPoint::radius(2), &c),
            Err(Error::UnorderedRadii { n: 1 })
        ));
    }

    #[test]
    fn root_maps_to_zero() {
        let c = ctx();
        assert_eq!(eval_g(&LPoint::radius(4).into(), &c).unwrap(), LValue::Zero);
        assert_eq!(eval_g(&LValue::Zero, &c).unwrap(), LValue::Zero);
    }

    #[test]
    fn core_step_on_outer_circle() {
        let c = ctx();
        for n in [2, 5, 9] {
            let h = c.half_width(n);
            let p = LPoint::from_wide(n, h.add_exact(h), 0.0);
            let g = eval_g(&p.into(), &c).unwrap();
            let got = g.point().unwrap().rebase(&c, n + 1).unwrap().s.to_f64();
            let expected = (n as f64 + 1.0) * 2.0 * c.half_width_f64(n);
            assert!((got - expected).abs() < 1e-9 * expected, "n = {n}");
        }
    }

    #[test]
    fn band_edges_match_neighbours() {
        let c = ctx();
        let n = 3;
        let h = c.half_width(n).clone();
        let eps = Wide::from_f64(1e-7);
        for theta in [0.0, 1.0, -2.5, PI] {
            // Q_n from inside the lower band vs critical band.
            let q = h.neg();
            let inside = LPoint::from_wide(n, q.sub_exact(&eps), theta);
            let at = LPoint::from_wide(n, q.clone(), theta);
            let a = eval_g(&inside.into(), &c).unwrap();
            let b = eval_g(&at.into(), &c).unwrap();
            let (a, b) = (a.point().unwrap(), b.point().unwrap());
            let b = b.rebase(&c, a.level).unwrap();
            assert!((a.s.to_f64() - b.s.to_f64()).abs() < 1e-5);
            assert!(wrap_angle(a.theta - b.theta).abs() < 1e-5);
        }
    }

    #[test]
    fn interpolate_rejects_outside_points() {
        let c = ctx();
        let err = interpolate_band(&LPoint::radius(3), &c, RegionTag::InterpLower(3)).unwrap_err();
        assert_eq!(err, Error::OutsideBand { band: RegionTag::InterpLower(3) });
        let inside = LPoint::new(3, -1.5 * c.half_width_f64(3), 0.2);
        assert!(interpolate_band(&inside, &c, RegionTag::InterpLower(3)).is_ok());
    }

    #[test]
    fn dilatation_controls() {
        let holo = estimate_dilatation_with(RegionTag::InterpLower(3), 0.0, 1.0, 8, 8, |s, t| {
            Ok((3.0 * s, 3.0 * t))
        })
        .unwrap();
        assert!(holo.max_k - 1.0 < 1e-9);
        // The conjugate map has no holomorphic part at all.
        let anti = estimate_dilatation_with(RegionTag::InterpLower(3), 0.0, 1.0, 8, 8, |s, t| Ok((s, -t)));
        assert!(matches!(anti, Err(Error::DegenerateJacobian { .. })));
        let near_anti = estimate_dilatation_with(RegionTag::InterpLower(3), 0.0, 1.0, 8, 8, |s, t| {
            Ok((s, -0.999 * t))
        })
        .unwrap();
        assert!(near_anti.max_mu > 0.99 && near_anti.max_k > 1000.0);
        // u + k·ū has |μ| = k exactly.
        let k = 0.25;
        let mixed = estimate_dilatation_with(RegionTag::InterpLower(3), 0.0, 1.0, 8, 8, |s, t| {
            Ok(((1.0 + k) * s, (1.0 - k) * t))
        })
        .unwrap();
        assert!((mixed.max_mu - k).abs() < 1e-9);
        let small = estimate_dilatation_with(RegionTag::InterpLower(3), 0.0, 1.0, 4, 8, |s, t| Ok((s, t)));
        assert!(small.is_err());
        let degenerate = estimate_dilatation_with(RegionTag::InterpLower(3), 0.0, 1.0, 8, 8, |_, _| Ok((1.0, 1.0)));
        assert!(matches!(degenerate, Err(Error::DegenerateJacobian { .. })));
    }

    #[test]
    fn band_dilatation_is_small() {
        let c = ctx();
        let stats = estimate_dilatation(&c, RegionTag::InterpLower(3), 16, 16).unwrap();
        assert!(stats.max_k >= 1.0 && stats.max_k < 1.25, "{stats:?}");
        assert!(stats.mean_k <= stats.max_k);
        let json = serde_json::to_value(&stats).unwrap();
        assert!(json.get("max_K").is_some());
    }

    #[test]
    fn tag_helpers() {
        assert_eq!(RegionTag::InterpLower(3).band_index(), Some(2));
        assert_eq!(RegionTag::InterpUpper(3).band_index(), Some(3));
        assert_eq!(RegionTag::Core(3).band_index(), None);
        assert_eq!(RegionTag::InterpLower(4).to_string(), "InterpLower(4)");
        assert_eq!(RegionTag::InnerCore.to_string(), "InnerCore");
    }
}
