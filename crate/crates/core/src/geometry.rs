//! Curves with continuous argument, winding numbers, annulus moduli and
//! hyperbolic lengths in round annuli.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::Construction;
use crate::error::{Error, Result};
use crate::logplane::{wrap_angle, LPoint, LValue};
use crate::qgmap::eval_g;
use crate::wide::Wide;

/// Default cap on the number of segments produced by [`push_curve`].
pub const DEFAULT_REFINE_LIMIT: usize = 1 << 20;

/// A polyline in log coordinates. Every vertex carries a lift; for closed
/// curves the final vertex repeats the first with lift shifted by `2πw`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub vertices: Vec<LPoint>,
    pub closed: bool,
}

impl Curve {
    /// The circle `|z| = R_level·e^s` traversed once counterclockwise,
    /// starting at `θ = −π`, with `segments` segments.
    pub fn circle(level: usize, s: Wide, segments: usize) -> Curve {
        let segments = segments.max(3);
        let vertices = (0..=segments)
            .map(|j| {
                let lift = -PI + 2.0 * PI * j as f64 / segments as f64;
                LPoint::with_lift(level, s.clone(), lift)
            })
            .collect();
        Curve {
            vertices,
            closed: true,
        }
    }

    /// Radial segment at fixed argument from offset `s0` to `s1`.
    pub fn radial(level: usize, s0: f64, s1: f64, theta: f64, segments: usize) -> Curve {
        let segments = segments.max(1);
        let vertices = (0..=segments)
            .map(|j| {
                let s = s0 + (s1 - s0) * j as f64 / segments as f64;
                LPoint::with_lift(level, Wide::from_f64(s), theta)
            })
            .collect();
        Curve {
            vertices,
            closed: false,
        }
    }

    /// All vertices expressed at `level` (exact).
    pub fn rebased(&self, ctx: &Construction, level: usize) -> Curve {
        Curve {
            vertices: self.vertices.iter().map(|v| v.rebase_unchecked(ctx, level)).collect(),
            closed: self.closed,
        }
    }

    /// Splits every segment in two (at the log-coordinate midpoint).
    pub fn refined(&self) -> Curve {
        let mut vertices = Vec::with_capacity(2 * self.vertices.len());
        for pair in self.vertices.windows(2) {
            vertices.push(pair[0].clone());
            vertices.push(midpoint(&pair[0], &pair[1]));
        }
        if let Some(last) = self.vertices.last() {
            vertices.push(last.clone());
        }
        Curve {
            vertices,
            closed: self.closed,
        }
    }

    /// Adds `shift` to every argument.
    pub fn rotated(&self, shift: f64) -> Curve {
        Curve {
            vertices: self
                .vertices
                .iter()
                .map(|v| LPoint::with_lift(v.level, v.s.clone(), v.arg() + shift))
                .collect(),
            closed: self.closed,
        }
    }

    pub fn level(&self) -> Option<usize> {
        self.vertices.first().map(|v| v.level)
    }
}

/// Midpoint in `(s, lift)`; both points must share a level.
fn midpoint(a: &LPoint, b: &LPoint) -> LPoint {
    let s = a.s.add_exact(&b.s).div(&Wide::from_f64(2.0), a.s.precision().max(b.s.precision()).max(64) + 64);
    LPoint::with_lift(a.level, s, 0.5 * (a.arg() + b.arg()))
}

/// `(lift(end) − lift(start)) / 2π`, rounded.
pub fn winding_number(c: &Curve) -> Result<i64> {
    if !c.closed {
        return Err(Error::NotClosed);
    }
    let (Some(first), Some(last)) = (c.vertices.first(), c.vertices.last()) else {
        return Ok(0);
    };
    let turns = (last.arg() - first.arg()) / (2.0 * PI);
    let w = turns.round();
    if (turns - w).abs() >= 1e-6 {
        return Err(Error::NotClosed);
    }
    Ok(w as i64)
}

/// Image of `c` under `g`, refined so that consecutive image arguments differ
/// by less than `π/2`, each accepted segment's image turns consistently
/// through its midpoint, and source segments are short relative to the local
/// degree. Images are expressed at the level of the first
/// image vertex.
pub fn push_curve(c: &Curve, ctx: &Construction, refine_limit: usize) -> Result<Curve> {
    let Some(level) = c.level() else {
        return Ok(c.clone());
    };
    let src = c.rebased(ctx, level);
    let images: Vec<LPoint> = src
        .vertices
        .par_iter()
        .map(|v| image_point(v, ctx))
        .collect::<Result<_>>()?;
    let out_level = images[0].level;
    let image_at = |p: &LPoint| -> Result<LPoint> { Ok(image_point(p, ctx)?.rebase_unchecked(ctx, out_level)) };
    let images: Vec<LPoint> = images.into_iter().map(|p| p.rebase_unchecked(ctx, out_level)).collect();

    let mut out: Vec<LPoint> = Vec::with_capacity(images.len());
    let mut lift = images[0].theta;
    out.push(LPoint::with_lift(out_level, images[0].s.clone(), lift));
    let mut segments = 0usize;
    for i in 0..src.vertices.len().saturating_sub(1) {
        // Depth-first bisection; the stack holds (source, image) pairs still to visit.
        let mut stack = vec![(src.vertices[i + 1].clone(), images[i + 1].clone())];
        let mut a = (src.vertices[i].clone(), images[i].clone());
        while let Some(b) = stack.pop() {
            let step = wrap_angle(b.1.theta - a.1.theta);
            let mid_src = midpoint(&a.0, &b.0);
            let mid_img = image_at(&mid_src)?;
            let half1 = wrap_angle(mid_img.theta - a.1.theta);
            let half2 = wrap_angle(b.1.theta - mid_img.theta);
            let consistent = (half1 + half2 - step).abs() < 1e-9 && half1.abs() < PI / 2.0 && half2.abs() < PI / 2.0;
            // Local degree is at most level + 1, so short source segments
            // cannot alias whole turns of the image.
            let span = (b.0.s.sub(&a.0.s, 64).to_f64()).hypot(b.0.arg() - a.0.arg());
            let short = span * (level as f64 + 2.0) < PI / 4.0;
            if step.abs() < PI / 2.0 && consistent && short {
                segments += 1;
                if segments > refine_limit {
                    return Err(Error::RefinementExhausted { limit: refine_limit });
                }
                lift += step;
                out.push(LPoint::with_lift(out_level, b.1.s.clone(), lift));
                a = b;
            } else {
                if stack.len() + segments > refine_limit {
                    return Err(Error::RefinementExhausted { limit: refine_limit });
                }
                stack.push(b);
                stack.push((mid_src, mid_img));
            }
        }
    }
    Ok(Curve {
        vertices: out,
        closed: c.closed,
    })
}

fn image_point(p: &LPoint, ctx: &Construction) -> Result<LPoint> {
    let plain = LPoint::from_wide(p.level, p.s.clone(), p.theta);
    match eval_g(&plain.into(), ctx)? {
        LValue::Point(q) => Ok(q),
        LValue::Zero => Err(Error::CatastrophicCancellation { residual: 0.0 }),
    }
}

/// `ann(R_level·e^{log_inner}, R_level·e^{log_outer})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundAnnulus {
    pub level: usize,
    pub log_inner: f64,
    pub log_outer: f64,
}

impl RoundAnnulus {
    pub fn new(level: usize, log_inner: f64, log_outer: f64) -> Result<Self> {
        if !(log_outer > log_inner) {
            return Err(Error::InvertedBounds {
                inner: log_inner,
                outer: log_outer,
            });
        }
        Ok(RoundAnnulus {
            level,
            log_inner,
            log_outer,
        })
    }

    /// `ann(Q_n, S_n)` at level `n`.
    pub fn critical(ctx: &Construction, n: usize) -> Result<Self> {
        let h = ctx.half_width_f64(n);
        Self::new(n, -h, h)
    }

    /// `L = log(outer/inner)`.
    pub fn width(&self) -> f64 {
        self.log_outer - self.log_inner
    }

    pub fn modulus(&self) -> f64 {
        self.width() / (2.0 * PI)
    }
}

/// `log(outer/inner)/2π`.
pub fn annulus_modulus(log_inner: f64, log_outer: f64) -> Result<f64> {
    RoundAnnulus::new(0, log_inner, log_outer).map(|a| a.modulus())
}

/// Whether an image annulus respects the `K`-quasiconformal modulus bound
/// `mod(image) ≤ K·mod(source)`.
pub fn within_distortion(source_modulus: f64, image_modulus: f64, k: f64) -> bool {
    image_modulus <= k * source_modulus
}

/// Hyperbolic density of `ann(1, e^L)` in log coordinates: `π / (L·sin(πx/L))`.
pub fn hyperbolic_density_log(x: f64, width: f64) -> Result<f64> {
    if !(x > 0.0 && x < width) {
        return Err(Error::OutsideAnnulus { x, width });
    }
    Ok(PI / ((PI * x / width).sin() * width))
}

/// Hyperbolic length of `c` in `a`, by the trapezoid rule on each segment with
/// the number of sub-intervals doubled until the total changes by less than
/// `1e-6` relative. Vertices must be at the annulus level.
pub fn hyperbolic_length(c: &Curve, a: &RoundAnnulus) -> Result<f64> {
    let width = a.width();
    let mut segs = Vec::with_capacity(c.vertices.len());
    for v in &c.vertices {
        if v.level != a.level {
            return Err(Error::LevelMismatch {
                expected: a.level,
                found: v.level,
            });
        }
        let x = v.s.to_f64() - a.log_inner;
        hyperbolic_density_log(x, width)?;
        segs.push((x, v.arg()));
    }
    let total = |m: usize| -> Result<f64> {
        let mut sum = 0.0;
        for pair in segs.windows(2) {
            let ((x0, t0), (x1, t1)) = (pair[0], pair[1]);
            let len = (x1 - x0).hypot(t1 - t0);
            if len == 0.0 {
                continue;
            }
            let mut acc = 0.5 * (hyperbolic_density_log(x0, width)? + hyperbolic_density_log(x1, width)?);
            for j in 1..m {
                let x = x0 + (x1 - x0) * j as f64 / m as f64;
                acc += hyperbolic_density_log(x, width)?;
            }
            sum += acc * len / m as f64;
        }
        Ok(sum)
    };
    let mut m = 1;
    let mut prev = total(m)?;
    loop {
        m *= 2;
        let next = total(m)?;
        if (next - prev).abs() <= 1e-6 * next.abs() || m >= 1 << 20 {
            return Ok(next);
        }
        prev = next;
    }
}

/// `π²/(K·(k−1)!) · (n−1)!/√(γ·n!)`, evaluated in log form.
pub fn growth_lower_bound(gamma: f64, k: usize, dilatation: f64, n: usize) -> f64 {
    let ln_fact = |m: usize| (1..=m).map(|i| (i as f64).ln()).sum::<f64>();
    let log = 2.0 * PI.ln() - dilatation.ln() - ln_fact(k - 1) + ln_fact(n - 1)
        - 0.5 * (gamma.ln() + ln_fact(n));
    log.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: usize,
    pub lower_bound: f64,
    /// Winding of a circle pushed `n − k` times from level `k`, when refinement
    /// stayed within its limit.
    pub winding_measured: Option<u128>,
    /// `(n−1)!/(k−1)!`.
    pub winding_floor: u128,
}

/// Lower-bound sequence for hyperbolic lengths of pushed curves, alongside
/// measured windings of a circle in `ann(T_k, P_{k+1})` pushed forward.
pub fn length_growth_experiment(
    ctx: &Construction,
    k: usize,
    dilatation: f64,
    n_max: usize,
    refine_limit: usize,
) -> Result<Vec<GrowthRow>> {
    if k < 2 || k >= n_max || n_max > ctx.max_level() {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("need 2 <= k < n_max <= {}, got k={k}, n_max={n_max}", ctx.max_level()),
        });
    }
    let lo = 2.0 * ctx.half_width_f64(k);
    let hi = ctx.log_r_gap(k + 1, k).to_f64() - 2.0 * ctx.half_width_f64(k + 1);
    let mut curve = Some(Curve::circle(k, Wide::from_f64(0.5 * (lo + hi)), 16));
    let mut rows = Vec::new();
    for n in k..=n_max {
        if n > k {
            curve = curve.and_then(|c| push_curve(&c, ctx, refine_limit).ok());
        }
        let measured = curve
            .as_ref()
            .and_then(|c| winding_number(c).ok())
            .map(|w| w as u128);
        rows.push(GrowthRow {
            n,
            lower_bound: growth_lower_bound(ctx.gamma(), k, dilatation, n),
            winding_measured: measured,
            winding_floor: ctx.factorial(n - 1) / ctx.factorial(k - 1),
        });
    }
    Ok(rows)
}
