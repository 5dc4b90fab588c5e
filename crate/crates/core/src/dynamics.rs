//! Orbits of `g`: escape classification, the wandering-disk chain, the
//! limit functions `h_n`, and band-visit checks.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{c_coefficient, Construction};
use crate::error::{Error, Result};
use crate::logplane::{cmp_modulus, LPoint, LValue};
use crate::qgmap::{classify, eval_g, eval_tagged, RegionTag};
use crate::report::VerificationReport;
use crate::wide::Wide;

#[derive(Debug, Clone, PartialEq)]
pub enum StopReason {
    Budget,
    BeyondMaxLevel,
    ReachedZero,
    /// Evaluation failed, e.g. a point indistinguishable from a root.
    Failed(Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    /// `points[0]` is the seed; `points[i+1] = g(points[i])`.
    pub points: Vec<LValue>,
    /// `tags[i]` is the tile of `points[i]`; the last point is untagged.
    pub tags: Vec<RegionTag>,
    /// Visits per interpolation region `E_j`, keyed by `j`.
    pub band_visits: BTreeMap<usize, usize>,
    pub stopped: StopReason,
}

impl OrbitRecord {
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn max_band_visits(&self) -> usize {
        self.band_visits.values().copied().max().unwrap_or(0)
    }
}

/// Applies `g` up to `steps` times.
pub fn iterate(start: &LValue, ctx: &Construction, steps: usize) -> OrbitRecord {
    let mut rec = OrbitRecord {
        points: vec![start.clone()],
        tags: Vec::new(),
        band_visits: BTreeMap::new(),
        stopped: StopReason::Budget,
    };
    let mut current = start.clone();
    for _ in 0..steps {
        let next = match &current {
            LValue::Zero => {
                rec.tags.push(RegionTag::InnerCore);
                rec.points.push(LValue::Zero);
                rec.stopped = StopReason::ReachedZero;
                return rec;
            }
            LValue::Point(p) => {
                let tag = match classify(p, ctx) {
                    Ok(t) => t,
                    Err(Error::BeyondMaxLevel { .. }) => {
                        rec.stopped = StopReason::BeyondMaxLevel;
                        return rec;
                    }
                    Err(e) => {
                        rec.stopped = StopReason::Failed(e);
                        return rec;
                    }
                };
                rec.tags.push(tag);
                if let Some(j) = tag.band_index() {
                    *rec.band_visits.entry(j).or_insert(0) += 1;
                }
                match eval_tagged(p, tag, ctx) {
                    Ok(v) => v,
                    Err(e) => {
                        rec.stopped = StopReason::Failed(e);
                        return rec;
                    }
                }
            }
        };
        rec.points.push(next.clone());
        if next.is_zero() {
            rec.stopped = StopReason::ReachedZero;
            return rec;
        }
        current = next;
    }
    rec
}

/// `ξ_n = n R_n / (n+1)` as a leveled point (`ξ_1 = 0`).
pub fn xi(n: usize) -> LValue {
    if n <= 1 {
        return LValue::Zero;
    }
    let nf = n as f64;
    LPoint::new(n, (nf / (nf + 1.0)).ln(), 0.0).into()
}

/// Checks `g(∂D_n) ⊂ D_{n+1}` and the derivative bound on `∂D_n` for
/// `n_from ≤ n ≤ n_to`, where `D_n = D(ξ_n, δR_n/n⁴)`.
///
/// Recorded families: `disk_center` and `disk_chain` (relative margin
/// `1 − |G(w) − ξ_{n+1}/R_{n+1}| / (δ/(n+1)⁴)`), and `disk_derivative`
/// (`log((2δ/n²)|c_n|) − log|G'|`). Since `D_n` lies in the critical band,
/// `G'(w) = c_n(n+1)w^{n−1}(w − ξ_n/R_n)` is evaluated in factored form;
/// difference quotients of `G` cannot resolve it in double precision once
/// the disk radius drops below about `1e-8`.
pub fn check_disk_chain(
    ctx: &Construction,
    delta: f64,
    n_from: usize,
    n_to: usize,
    samples: usize,
) -> Result<VerificationReport> {
    if n_from < 2 || n_from > n_to || n_to + 1 > ctx.max_level() {
        return Err(Error::InvalidParameter {
            name: "levels",
            reason: format!(
                "need 2 <= n_from <= n_to <= {}, got {n_from}..={n_to}",
                ctx.max_level() - 1
            ),
        });
    }
    if !(delta > 0.0 && delta < 1.0) || samples == 0 {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("need 0 < delta < 1 and samples > 0, got {delta}, {samples}"),
        });
    }
    for n in n_from..=n_to {
        if ctx.disk_in_band_margin(n, delta) <= 0.0 {
            return Err(Error::SampleOutsideBand { n });
        }
    }
    let per_level: Vec<Result<[(f64, bool); 3]>> = (n_from..=n_to)
        .into_par_iter()
        .map(|n| disk_level(ctx, delta, n, samples))
        .collect();
    let mut report = VerificationReport::new(ctx.gamma(), delta);
    for (n, row) in (n_from..=n_to).zip(per_level) {
        let [center, chain, deriv] = row?;
        report.push("disk_center", n, center.0, center.1);
        report.push("disk_chain", n, chain.0, chain.1);
        report.push("disk_derivative", n, deriv.0, deriv.1);
    }
    Ok(report)
}

/// `|G(w) − x|` for `G(w) = g(R_n w)/R_{n+1}` and a real `x > 0`, computed
/// as `x·|e^{log G − log x} − 1|` so that nearby values do not cancel.
fn image_distance(ctx: &Construction, n: usize, w: Complex64, x: f64) -> Result<f64> {
    let p = LPoint::new(n, w.norm().ln(), w.arg());
    match eval_g(&p.into(), ctx)? {
        LValue::Zero => Ok(x),
        LValue::Point(q) => {
            let a = q.rebase_unchecked(ctx, n + 1).s.add_f64_exact(-x.ln()).to_f64();
            let b = q.theta;
            let half = (0.5 * b).sin();
            let re = a.exp_m1() * b.cos() - 2.0 * half * half;
            let im = a.exp() * b.sin();
            Ok(x * re.hypot(im))
        }
    }
}

fn disk_level(ctx: &Construction, delta: f64, n: usize, samples: usize) -> Result<[(f64, bool); 3]> {
    let nf = n as f64;
    let center = Complex64::new(nf / (nf + 1.0), 0.0);
    let radius = delta / nf.powi(4);
    let target = (nf + 1.0) / (nf + 2.0);
    let target_radius = delta / (nf + 1.0).powi(4);
    let rel = |w: Complex64| -> Result<f64> { Ok(1.0 - image_distance(ctx, n, w, target)? / target_radius) };

    let center_margin = rel(center)?;
    let mut chain = f64::INFINITY;
    let mut deriv = f64::INFINITY;
    let log_neg_c = (-c_coefficient(n)).ln();
    let log_bound = (2.0 * delta / (nf * nf)).ln() + log_neg_c;
    for j in 0..samples {
        let phi = 2.0 * PI * j as f64 / samples as f64;
        let w = center + Complex64::from_polar(radius, phi);
        chain = chain.min(rel(w)?);
        let log_gp = log_neg_c + (nf + 1.0).ln() + (nf - 1.0) * w.norm().ln() + radius.ln();
        deriv = deriv.min(log_bound - log_gp);
    }
    let tol = ctx.tolerance(n);
    Ok([
        (center_margin, center_margin > tol),
        (chain, chain > tol),
        (deriv, deriv > tol),
    ])
}

/// Sampled estimate of `log M(r, g^m)` on the circle `|z| = R_level·e^s`.
///
/// Returns the image point of largest modulus found; its `theta` is the
/// image argument. After the uniform scan the best sample is refined by
/// golden-section search on the angle.
pub fn log_max_modulus(
    ctx: &Construction,
    level: usize,
    s: f64,
    iterations: usize,
    samples: usize,
) -> Result<LPoint> {
    if samples == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "need at least one sample".into(),
        });
    }
    let start = LPoint::new(level, s, 0.0);
    if level > ctx.max_level() {
        return Err(Error::LevelOutOfRange {
            level,
            max: ctx.max_level(),
        });
    }
    let image = |theta: f64| -> Result<Option<LPoint>> {
        let mut v: LValue = LPoint { theta, ..start.clone() }.into();
        for _ in 0..iterations {
            v = eval_g(&v, ctx)?;
        }
        Ok(match v {
            LValue::Zero => None,
            LValue::Point(p) => Some(p.normalized(ctx)),
        })
    };
    let score = |p: &Option<LPoint>| -> f64 {
        p.as_ref()
            .map(|q| q.rebase_unchecked(ctx, level).s.to_f64())
            .unwrap_or(f64::NEG_INFINITY)
    };
    let step = 2.0 * PI / samples as f64;
    let scanned: Vec<Result<Option<LPoint>>> = (0..samples)
        .into_par_iter()
        .map(|j| image(-PI + step * (j as f64 + 0.5)))
        .collect();
    let mut best: Option<(f64, LPoint)> = None;
    for (j, r) in scanned.into_iter().enumerate() {
        if let Some(p) = r? {
            let theta = -PI + step * (j as f64 + 0.5);
            let better = match &best {
                None => true,
                Some((_, b)) => cmp_modulus(&p, b.level, &b.s, ctx) == Ordering::Greater,
            };
            if better {
                best = Some((theta, p));
            }
        }
    }
    let Some((theta0, mut best_p)) = best else {
        return Err(Error::InvalidParameter {
            name: "log_r",
            reason: "every sampled image is zero".into(),
        });
    };
    if iterations == 0 || samples < 3 {
        return Ok(best_p);
    }
    // Golden-section search on [θ0 − step, θ0 + step].
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (theta0 - step, theta0 + step);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (image(c)?, image(d)?);
    for _ in 0..40 {
        if score(&fc) > score(&fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = image(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = image(d)?;
        }
    }
    for cand in [fc, fd].into_iter().flatten() {
        if cmp_modulus(&cand, best_p.level, &best_p.s, ctx) == Ordering::Greater {
            best_p = cand;
        }
    }
    Ok(best_p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EscapeClass {
    FastEscaping { lag: usize, witnessed_to: usize },
    Escaping { witnessed_to: usize },
    Bounded { witnessed_to: usize },
    Undetermined,
}

impl std::fmt::Display for EscapeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EscapeClass::FastEscaping { lag, witnessed_to } => {
                write!(f, "FAST(L={lag}) witnessed_to={witnessed_to}")
            }
            EscapeClass::Escaping { witnessed_to } => write!(f, "ESCAPING witnessed_to={witnessed_to}"),
            EscapeClass::Bounded { witnessed_to } => write!(f, "BOUNDED witnessed_to={witnessed_to}"),
            EscapeClass::Undetermined => f.write_str("UNDETERMINED"),
        }
    }
}

/// Classifies the orbit of `start` with respect to fast escape.
///
/// The images of `D = ann(S_1, Q_2)` satisfy `gⁿ(D) ⊂ ann(S_{n+1}, Q_{n+2})`,
/// whose filled hull lies in `D(0, S_{n+2})`. A point is reported as
/// fast escaping with lag `L` when `log|g^{n+L}(z)| > log S_{n+2}` for every
/// `n` from 1 to `witnessed_to`; the smallest such `L ≤ budget/2` is used.
pub fn classify_escape(start: &LValue, ctx: &Construction, budget: usize) -> EscapeClass {
    if budget < 3 {
        return EscapeClass::Undetermined;
    }
    let orbit = iterate(start, ctx, budget);
    match orbit.stopped {
        StopReason::ReachedZero => return EscapeClass::Bounded { witnessed_to: budget },
        StopReason::Failed(_) => return EscapeClass::Undetermined,
        _ => {}
    }
    let points: Vec<&LPoint> = orbit.points.iter().filter_map(LValue::point).collect();
    let last = points.len() - 1;
    if orbit.stopped == StopReason::Budget {
        let t2 = ctx.level_radii(2).map(|r| r.log_t.sub_exact(&r.log_r));
        if let Ok(t2) = t2 {
            if points.iter().all(|p| cmp_modulus(p, 2, &t2, ctx) == Ordering::Less) {
                return EscapeClass::Bounded { witnessed_to: budget };
            }
        }
    }
    for lag in 1..=budget / 2 {
        if last < lag + 1 {
            break;
        }
        let horizon = last - lag;
        let ok = (1..=horizon).all(|n| {
            let level = n + 2;
            if level > ctx.table_top() {
                return false;
            }
            let log_s = ctx.half_width(level).clone();
            cmp_modulus(points[n + lag], level, &log_s, ctx) == Ordering::Greater
        });
        if ok {
            return EscapeClass::FastEscaping {
                lag,
                witnessed_to: horizon,
            };
        }
    }
    if orbit.stopped == StopReason::BeyondMaxLevel {
        EscapeClass::Escaping { witnessed_to: last }
    } else {
        EscapeClass::Undetermined
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probe {
    /// A point `R_m·e^{s+iθ}` of `ann(T_m, P_{m+1})`.
    AnnulusPoint { s: f64, theta: f64 },
    /// The critical point `ξ_l`, `l ∈ {m, m+1}`.
    DiskCenter(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HnRow {
    pub n: usize,
    pub log_abs_h: f64,
    /// `log(|z|/R_m)` for annulus probes; the limiting value for disk probes.
    pub reference: f64,
}

/// `log|h_n(z)| = (m!/n!)·(log|g^{n−m}(z)| − log R_n)` for `m ≤ n ≤ n_max`.
pub fn hn_experiment(ctx: &Construction, m: usize, probe: Probe, n_max: usize) -> Result<Vec<HnRow>> {
    if m < 2 || m >= n_max || n_max > ctx.max_level() {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: format!("need 2 <= m < n_max <= {}, got m={m}, n_max={n_max}", ctx.max_level()),
        });
    }
    let (start, reference) = match probe {
        Probe::AnnulusPoint { s, theta } => {
            let lo = 2.0 * ctx.half_width_f64(m);
            let hi = ctx.log_r_gap(m + 1, m).to_f64() - 2.0 * ctx.half_width_f64(m + 1);
            if !(s >= lo && s <= hi) || theta.abs() >= PI {
                return Err(Error::InvalidParameter {
                    name: "probe",
                    reason: format!("annulus probe needs {lo} <= s <= {hi} off the slit"),
                });
            }
            (LValue::from(LPoint::new(m, s, theta)), s)
        }
        Probe::DiskCenter(l) => {
            if l != m && l != m + 1 {
                return Err(Error::InvalidParameter {
                    name: "probe",
                    reason: format!("disk probe needs l in {{{m}, {}}}, got {l}", m + 1),
                });
            }
            let limit = if l == m { 0.0 } else { ctx.gamma() * ctx.factorial(m) as f64 };
            (xi(l), limit)
        }
    };
    let orbit = iterate(&start, ctx, n_max - m);
    if let StopReason::Failed(e) = orbit.stopped {
        return Err(e);
    }
    let prec = ctx.prec().max(128);
    let mut rows = Vec::new();
    for (j, v) in orbit.points.iter().enumerate() {
        let n = m + j;
        let p = v.point().ok_or(Error::InvalidParameter {
            name: "probe",
            reason: "orbit reached zero".into(),
        })?;
        // m!/n! = 1 / ((m+1)(m+2)···n)
        let s_n = p.rebase_unchecked(ctx, n).s;
        let ratio = Wide::from_u128(ctx.factorial(n) / ctx.factorial(m));
        rows.push(HnRow {
            n,
            log_abs_h: s_n.div(&ratio, prec).to_f64(),
            reference,
        });
    }
    if rows.len() < n_max - m + 1 {
        return Err(Error::BeyondMaxLevel {
            max_level: ctx.max_level(),
        });
    }
    Ok(rows)
}

/// Iterates every seed and checks that no orbit visits an interpolation
/// region `E_j` twice. The margin is `1.5 − max visits` (positive iff at most
/// one visit); orbits also record the smallest stage advance per step under
/// `level_advance` when they have at least two tagged points.
pub fn check_band_visits(ctx: &Construction, seeds: &[LValue], steps: usize) -> Result<VerificationReport> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter {
            name: "seeds",
            reason: "need at least one seed".into(),
        });
    }
    let orbits: Vec<OrbitRecord> = seeds.par_iter().map(|s| iterate(s, ctx, steps)).collect();
    let mut report = VerificationReport::new(ctx.gamma(), ctx.params().delta);
    for (i, orbit) in orbits.iter().enumerate() {
        let visits = orbit.max_band_visits();
        report.push("band_visits", i, 1.5 - visits as f64, visits <= 1);
    }
    Ok(report)
}

/// Smallest stage advance between consecutive tagged points, if any.
pub fn min_stage_advance(orbit: &OrbitRecord) -> Option<f64> {
    orbit
        .tags
        .windows(2)
        .map(|w| w[1].stage() - w[0].stage())
        .reduce(f64::min)
}
