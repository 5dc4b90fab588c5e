//! Radii, coefficients and admissibility checks for the piecewise map.
//!
//! Everything is kept in natural-log scale. With `γ = log R_1` the reference
//! radii satisfy `log R_{n+1} − log R_n = γ·n!`, so `log R_n = γ·A_n` with the
//! integer `A_n = 1 + Σ_{k<n} k!`. Because `γ` is an `f64` and `A_n` an exact
//! integer, the table of `log R_n` is stored exactly; only the band half-widths
//! `√(γ·n!)` are rounded to the working precision.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::VerificationReport;
use crate::wide::Wide;

/// Largest supported `max_level`; factorials up to `(max_level + 2)!` must fit in `u128`.
pub const MAX_SUPPORTED_LEVEL: usize = 30;

/// Upper end of the doubling search in [`gamma_threshold`].
pub const GAMMA_CAP: f64 = 1e6;

/// Resolution of the bisection in [`Construction::delta_threshold`].
pub const DELTA_RESOLUTION: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    /// `γ = log R_1`.
    pub gamma: f64,
    /// Disk radius factor: `D_n = D(ξ_n, δ R_n / n⁴)`.
    pub delta: f64,
    /// Deepest level with materialized radii.
    pub max_level: usize,
    /// Boundary sampling budget per sampled check.
    pub samples: usize,
    /// Significand width of the wide-real arithmetic.
    pub sig_bits: usize,
}

impl ConstructionParams {
    pub const DEFAULT_DELTA: f64 = 0.01;
    pub const DEFAULT_SAMPLES: usize = 256;
    pub const DEFAULT_SIG_BITS: usize = 64;

    /// Validating constructor.
    pub fn new(
        gamma: f64,
        delta: f64,
        max_level: usize,
        samples: usize,
        sig_bits: usize,
    ) -> Result<Self> {
        let p = ConstructionParams {
            gamma,
            delta,
            max_level,
            samples,
            sig_bits,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with the default `γ` (10% above the admissibility threshold).
    pub fn with_default_gamma(max_level: usize) -> Result<Self> {
        let gamma = default_gamma(max_level)?;
        Self::new(
            gamma,
            Self::DEFAULT_DELTA,
            max_level,
            Self::DEFAULT_SAMPLES,
            Self::DEFAULT_SIG_BITS,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        // γ = 1 is accepted: it is a valid (if inadmissible) construction.
        if !(self.gamma.is_finite() && self.gamma >= 1.0) {
            return bad("gamma", format!("need gamma >= 1, got {}", self.gamma));
        }
        if !(self.delta.is_finite() && self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta", format!("need 0 < delta < 1, got {}", self.delta));
        }
        if !(3..=MAX_SUPPORTED_LEVEL).contains(&self.max_level) {
            return bad(
                "max_level",
                format!("need 3 <= max_level <= {MAX_SUPPORTED_LEVEL}, got {}", self.max_level),
            );
        }
        if self.samples < 16 {
            return bad("samples", format!("need samples >= 16, got {}", self.samples));
        }
        if !(53..=4096).contains(&self.sig_bits) {
            return bad("sig_bits", format!("need 53 <= sig_bits <= 4096, got {}", self.sig_bits));
        }
        Ok(())
    }
}

/// Optional overrides read from a `key: value` configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamOverrides {
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub max_level: Option<usize>,
    pub samples: Option<usize>,
    pub sig_bits: Option<usize>,
}

impl ParamOverrides {
    /// Parses `key: value` lines. Blank lines and `#` comments are ignored;
    /// `=` is accepted as a separator too.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = ParamOverrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .or_else(|| line.split_once('='))
                .ok_or_else(|| Error::Parse(format!("line {}: expected key: value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let num_err = |e: &dyn std::fmt::Display| {
                Error::Parse(format!("line {}: bad value for {key}: {e}", lineno + 1))
            };
            match key {
                "gamma" => out.gamma = Some(value.parse().map_err(|e| num_err(&e))?),
                "delta" => out.delta = Some(value.parse().map_err(|e| num_err(&e))?),
                "max_level" => out.max_level = Some(value.parse().map_err(|e| num_err(&e))?),
                "samples" => out.samples = Some(value.parse().map_err(|e| num_err(&e))?),
                "sig_bits" => out.sig_bits = Some(value.parse().map_err(|e| num_err(&e))?),
                other => {
                    return Err(Error::Parse(format!("line {}: unknown key {other}", lineno + 1)))
                }
            }
        }
        Ok(out)
    }

    /// Layers `other` on top of `self` (values in `other` win).
    pub fn overlay(&self, other: &ParamOverrides) -> ParamOverrides {
        ParamOverrides {
            gamma: other.gamma.or(self.gamma),
            delta: other.delta.or(self.delta),
            max_level: other.max_level.or(self.max_level),
            samples: other.samples.or(self.samples),
            sig_bits: other.sig_bits.or(self.sig_bits),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LevelRadii {
    pub n: usize,
    pub log_p: Wide,
    pub log_q: Wide,
    pub log_r: Wide,
    pub log_s: Wide,
    pub log_t: Wide,
}

#[derive(Debug, Clone)]
pub struct CoeffSet {
    pub n: usize,
    /// `log a_n`; `a_n > 0`.
    pub log_a: Wide,
    /// `log |b_n|`; `b_n < 0`.
    pub log_abs_b: Wide,
    /// `c_n = b_n R_n^{n+1} / R_{n+1}`, a moderate negative number.
    pub c: f64,
    /// `log ξ_n`, or `None` for `ξ_1 = 0`.
    pub log_xi: Option<Wide>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InterpCase {
    /// Outer band `S_n < |z| < T_n`, radii above the unit circle after rescaling.
    Sharp,
    /// Inner band `P_n < |z| < Q_n`, radii below the unit circle.
    Flat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub name: &'static str,
    pub margin: f64,
}

impl Predicate {
    pub fn holds(&self) -> bool {
        self.margin > 0.0
    }
}

/// Data for interpolating `b z^k (z − ω)` against a pure power on a band,
/// in coordinates rescaled by `R_n` (so `ω = 1`).
#[derive(Debug, Clone)]
pub struct InterpolationSpec {
    pub case: InterpCase,
    pub k: usize,
    /// Principal log of `b = c_n < 0`: `(log|c_n|, π)`.
    pub log_b: (f64, f64),
    pub omega: f64,
    pub log_rho: f64,
    pub log_lambda: f64,
    /// `C♯` or `C♭` evaluated with the actual coefficient.
    pub c_value: f64,
    /// For the flat case, the coefficient-free lower bound
    /// `1 − (1/n)((1 + log(n+1))/√(γn!) + 4e^{−√(γn!)})`.
    pub c_lower_bound: Option<f64>,
    pub predicates: Vec<Predicate>,
}

impl InterpolationSpec {
    pub fn failed(&self) -> Vec<String> {
        self.predicates
            .iter()
            .filter(|p| !p.holds())
            .map(|p| p.name.to_string())
            .collect()
    }

    /// Dilatation bound `1/C` promised by the interpolation lemma.
    pub fn dilatation_bound(&self) -> f64 {
        1.0 / self.c_value
    }
}

/// `K_n = 1 + 1/n²`.
pub fn dilatation_bound(n: usize) -> f64 {
    let n = n as f64;
    1.0 + 1.0 / (n * n)
}

/// Partial product `∏_{n=1}^{N} (1 + 1/n²)`.
pub fn dilatation_product(levels: usize) -> f64 {
    (1..=levels).map(dilatation_bound).product()
}

/// `c_n = −((n+1)²/(n+2))·((n+1)/n)^n`.
pub fn c_coefficient(n: usize) -> f64 {
    -log_neg_c(n).exp()
}

/// `log(−c_n)`, computed without forming the power.
pub fn log_neg_c(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * (nf + 1.0).ln() - (nf + 2.0).ln() + nf * (1.0 / nf).ln_1p()
}

/// Smallest `γ` (to within `tol`) for which the ordering, ratio, interpolation,
/// `C♭` and absorption checks hold for every `n ≤ levels`.
pub fn gamma_threshold(levels: usize, delta: f64, tol: f64) -> Result<f64> {
    if levels < 3 {
        return Err(Error::InvalidParameter {
            name: "max_level",
            reason: format!("gamma_threshold needs N >= 3, got {levels}"),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("need tol > 0, got {tol}"),
        });
    }
    let passes = |gamma: f64| -> bool {
        let params = ConstructionParams {
            gamma,
            delta,
            max_level: levels,
            samples: 16,
            sig_bits: ConstructionParams::DEFAULT_SIG_BITS,
        };
        Construction::new(params)
            .map(|c| c.gamma_checks_pass(levels))
            .unwrap_or(false)
    };

    let mut lo = 1.0;
    if passes(lo) {
        return Ok(lo);
    }
    let mut hi = 2.0;
    while !passes(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > GAMMA_CAP {
            return Err(Error::NoBracket { cap: GAMMA_CAP });
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if passes(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Every check is monotone in γ; spot-check that above the threshold.
    for factor in [1.01, 1.5, 2.0, 10.0] {
        if !passes(hi * factor) {
            return Err(Error::HypothesisViolated(vec![format!(
                "monotonicity in gamma broken at {}",
                hi * factor
            )]));
        }
    }
    Ok(hi)
}

/// Default `γ`: 10% above [`gamma_threshold`].
pub fn default_gamma(levels: usize) -> Result<f64> {
    Ok(gamma_threshold(levels, ConstructionParams::DEFAULT_DELTA, 1e-3)? * 1.1)
}

/// Tables derived from a parameter set. Immutable and cheap to share.
#[derive(Debug, Clone)]
pub struct Construction {
    params: ConstructionParams,
    /// Exact `log R_n` for `0 ≤ n ≤ max_level + 2`.
    log_r: Vec<Wide>,
    /// `√(γ·n!)`, rounded to the working precision (index 0 unused but filled).
    half: Vec<Wide>,
    half_f64: Vec<f64>,
    factorial: Vec<u128>,
    /// First level at which the radius chain is not strictly increasing.
    unordered_at: Option<usize>,
}

impl Construction {
    /// Builds the tables. Only the hard limits on `max_level` and `sig_bits`
    /// are enforced here, so inadmissible parameters can still be explored.
    pub fn new(params: ConstructionParams) -> Result<Self> {
        if !(1..=MAX_SUPPORTED_LEVEL).contains(&params.max_level) {
            return Err(Error::InvalidParameter {
                name: "max_level",
                reason: format!("need 1 <= max_level <= {MAX_SUPPORTED_LEVEL}"),
            });
        }
        if params.sig_bits < 53 || !params.gamma.is_finite() || params.gamma <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: "need finite gamma > 0 and sig_bits >= 53".into(),
            });
        }
        let top = params.max_level + 2;
        let prec = params.sig_bits;
        let gamma = Wide::from_f64(params.gamma);

        let mut factorial = Vec::with_capacity(top + 1);
        let mut f: u128 = 1;
        for n in 0..=top {
            if n > 0 {
                f *= n as u128;
            }
            factorial.push(f);
        }
        // A_0 = 0, A_n = 1 + Σ_{k=1}^{n-1} k! = A_{n-1} + (n-1)!.
        let mut log_r = Vec::with_capacity(top + 1);
        let mut a: u128 = 0;
        for n in 0..=top {
            if n > 0 {
                a += factorial[n - 1];
            }
            log_r.push(gamma.mul_exact(&Wide::from_u128(a)));
        }
        let half: Vec<Wide> = factorial
            .iter()
            .map(|&f| gamma.mul_exact(&Wide::from_u128(f)).sqrt(prec))
            .collect();
        let half_f64 = half.iter().map(Wide::to_f64).collect();

        let mut c = Construction {
            params,
            log_r,
            half,
            half_f64,
            factorial,
            unordered_at: None,
        };
        c.unordered_at = (1..=c.params.max_level).find(|&n| c.ordering_gap(n).is_negative() || c.ordering_gap(n).is_zero());
        Ok(c)
    }

    pub fn params(&self) -> &ConstructionParams {
        &self.params
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma
    }

    pub fn max_level(&self) -> usize {
        self.params.max_level
    }

    /// Working precision in bits.
    pub fn prec(&self) -> usize {
        self.params.sig_bits
    }

    /// Highest level with a tabulated `log R_n`.
    pub fn table_top(&self) -> usize {
        self.log_r.len() - 1
    }

    pub fn factorial(&self, n: usize) -> u128 {
        self.factorial[n]
    }

    /// Exact `log R_n` (internal tables extend two levels past `max_level`).
    pub fn log_r(&self, n: usize) -> &Wide {
        &self.log_r[n]
    }

    /// Exact `log R_a − log R_b`.
    pub fn log_r_gap(&self, a: usize, b: usize) -> Wide {
        self.log_r[a].sub_exact(&self.log_r[b])
    }

    /// `√(γ·n!)`.
    pub fn half_width(&self, n: usize) -> &Wide {
        &self.half[n]
    }

    pub fn half_width_f64(&self, n: usize) -> f64 {
        self.half_f64[n]
    }

    /// `None` if the radius chain is strictly ordered through `max_level`.
    pub fn unordered_at(&self) -> Option<usize> {
        self.unordered_at
    }

    fn check_level(&self, n: usize, min: usize) -> Result<()> {
        if n < min || n > self.params.max_level {
            return Err(Error::LevelOutOfRange {
                level: n,
                max: self.params.max_level,
            });
        }
        Ok(())
    }

    pub fn level_radii(&self, n: usize) -> Result<LevelRadii> {
        self.check_level(n, 1)?;
        Ok(self.radii_unchecked(n))
    }

    /// Radii for any tabulated level, including the two past `max_level`.
    pub(crate) fn radii_unchecked(&self, n: usize) -> LevelRadii {
        let r = &self.log_r[n];
        let h = &self.half[n];
        let h2 = h.add_exact(h);
        LevelRadii {
            n,
            log_p: r.sub_exact(&h2),
            log_q: r.sub_exact(h),
            log_r: r.clone(),
            log_s: r.add_exact(h),
            log_t: r.add_exact(&h2),
        }
    }

    pub fn coeffs(&self, n: usize) -> Result<CoeffSet> {
        self.check_level(n, 1)?;
        // a_n = 1 / R_{n-1}^n.
        let log_a = self.log_r[n - 1].mul_int_exact(-(n as i64));
        let log_abs_b = log_a.add_f64_exact(log_neg_c(n));
        let log_xi = (n >= 2).then(|| {
            let nf = n as f64;
            self.log_r[n].add_f64_exact((nf / (nf + 1.0)).ln())
        });
        Ok(CoeffSet {
            n,
            log_a,
            log_abs_b,
            c: c_coefficient(n),
            log_xi,
        })
    }

    /// Hypotheses of the interpolation lemma on the band of level `n`, in
    /// log form. Fails with the names of the violated predicates.
    pub fn interp_spec(&self, n: usize, case: InterpCase) -> Result<InterpolationSpec> {
        self.check_level(n, 2)?;
        let spec = self.interp_spec_unchecked(n, case);
        let failed = spec.failed();
        if failed.is_empty() {
            Ok(spec)
        } else {
            Err(Error::HypothesisViolated(failed))
        }
    }

    pub(crate) fn interp_spec_unchecked(&self, n: usize, case: InterpCase) -> InterpolationSpec {
        let h = self.half_f64[n];
        let k = n as f64;
        let log_neg_c = log_neg_c(n);
        match case {
            InterpCase::Flat => {
                // |log(−bω)| with −bω = −c_n > 0.
                let c_value = 1.0 - (log_neg_c.abs() / h + 4.0 * (-h).exp()) / k;
                let c_lower = 1.0 - ((1.0 + (k + 1.0).ln()) / h + 4.0 * (-h).exp()) / k;
                InterpolationSpec {
                    case,
                    k: n,
                    log_b: (log_neg_c, PI),
                    omega: 1.0,
                    log_rho: -h,
                    log_lambda: -2.0 * h,
                    c_value,
                    c_lower_bound: Some(c_lower),
                    predicates: vec![
                        // |ω| ≥ 2ρ  ⇔  log 2 + log ρ ≤ 0
                        Predicate { name: "omega_ge_2rho", margin: h - std::f64::consts::LN_2 },
                        Predicate { name: "rho_ge_e_lambda", margin: h - 1.0 },
                        Predicate { name: "c_flat_positive", margin: c_value },
                    ],
                }
            }
            InterpCase::Sharp => {
                let abs_log_b = log_neg_c.hypot(PI);
                let c_value = 1.0 - (abs_log_b / h + 4.0 * (-h).exp()) / (k + 1.0);
                InterpolationSpec {
                    case,
                    k: n,
                    log_b: (log_neg_c, PI),
                    omega: 1.0,
                    log_rho: h,
                    log_lambda: 2.0 * h,
                    c_value,
                    c_lower_bound: None,
                    predicates: vec![
                        Predicate { name: "rho_ge_2omega", margin: h - std::f64::consts::LN_2 },
                        Predicate { name: "lambda_ge_e_rho", margin: h - 1.0 },
                        Predicate { name: "c_sharp_positive", margin: c_value },
                    ],
                }
            }
        }
    }

    /// `log P_{n+1} − log T_n = γ·n! − 2√(γ(n+1)!) − 2√(γ·n!)`.
    fn ordering_gap(&self, n: usize) -> Wide {
        let h = &self.half[n];
        let h1 = &self.half[n + 1];
        self.log_r_gap(n + 1, n)
            .sub_exact(&h.add_exact(h))
            .sub_exact(&h1.add_exact(h1))
    }

    /// Rounding allowance for margins at level `n`: ten times the accumulated
    /// ulp bound of the largest band quantity involved.
    pub fn tolerance(&self, n: usize) -> f64 {
        let m = (n + 2).min(self.table_top());
        let scale = Wide::from_f64(self.half_f64[m] * (m as f64));
        10.0 * (m as f64) * scale.ulp(self.prec().max(53))
    }

    /// Upper absorption margin at level `n`:
    /// `(n+1)√(γ(n+1)!) − √(γ(n+2)!) − log(2e(n+2))`.
    pub fn absorption_upper_margin(&self, n: usize) -> f64 {
        let nf = n as f64;
        let lhs = self.half[n + 1].mul_int_exact(n as i64 + 1);
        lhs.sub(&self.half[n + 2], self.prec()).to_f64() - (2.0 * E * (nf + 2.0)).ln()
    }

    /// Lower absorption margin: `min_{|z|=S_n} log|g| − log S_{n+1}`.
    pub fn absorption_lower_margin(&self, n: usize) -> f64 {
        let h = self.half_f64[n];
        let h1 = self.half_f64[n + 1];
        if n == 1 {
            // g = a_1 z² on |z| = S_1.
            return 2.0 * h - h1;
        }
        // log|c_n| + log(e^h − 1) + n·h − h_{n+1}, with the big terms in wide form.
        let big = self.half[n].mul_int_exact(n as i64 + 1).sub(&self.half[n + 1], self.prec());
        big.to_f64() + log_neg_c(n) + (-(-h).exp()).ln_1p()
    }

    /// Analytic disk-chain margin `−log(2δe(n+1)⁵/n⁶)`.
    pub fn delta_chain_margin(n: usize, delta: f64) -> f64 {
        let nf = n as f64;
        -((2.0 * delta * E).ln() + 5.0 * (nf + 1.0).ln() - 6.0 * nf.ln())
    }

    /// Margin for `D_n ⊂ ann(Q_n, R_n)`, in nats.
    pub fn disk_in_band_margin(&self, n: usize, delta: f64) -> f64 {
        let nf = n as f64;
        let centre = nf / (nf + 1.0);
        let radius = delta / nf.powi(4);
        let upper = -(centre + radius).ln();
        let lower = if centre > radius {
            (centre - radius).ln() + self.half_f64[n]
        } else {
            f64::MIN
        };
        upper.min(lower)
    }

    /// Runs the logged inequality families for every applicable `n ≤ levels`.
    pub fn verify_inequalities(&self, levels: usize) -> Result<VerificationReport> {
        if levels > self.params.max_level {
            return Err(Error::LevelOutOfRange {
                level: levels,
                max: self.params.max_level,
            });
        }
        let mut report = VerificationReport::new(self.params.gamma, self.params.delta);
        self.push_gamma_checks(&mut report, levels);
        let delta = self.params.delta;
        for n in 2..=levels {
            let tol = self.tolerance(n);
            let m = Self::delta_chain_margin(n, delta);
            report.push("delta_chain", n, m, m > tol);
            let m = self.disk_in_band_margin(n, delta);
            report.push("disk_in_band", n, m, m > tol);
        }
        Ok(report)
    }

    /// The families that depend on `γ` alone: everything except the disk checks.
    fn push_gamma_checks(&self, report: &mut VerificationReport, levels: usize) {
        for n in 1..=levels {
            let tol = self.tolerance(n);
            let h = self.half_f64[n];
            let ordering = self.ordering_gap(n).to_f64().min(h);
            report.push("ordering", n, ordering, ordering > tol);
            report.push("ratio_e", n, h - 1.0, h - 1.0 > tol);
            if n >= 2 {
                for case in [InterpCase::Flat, InterpCase::Sharp] {
                    let spec = self.interp_spec_unchecked(n, case);
                    let m = spec
                        .predicates
                        .iter()
                        .map(|p| p.margin)
                        .fold(f64::INFINITY, f64::min);
                    let name = match case {
                        InterpCase::Flat => "lemma_flat",
                        InterpCase::Sharp => "lemma_sharp",
                    };
                    report.push(name, n, m, m > tol);
                    if case == InterpCase::Flat {
                        // 1 − C♭ ≤ 1/((n−1)²+1), in log form.
                        let deficit = 1.0 - spec.c_lower_bound.unwrap_or(f64::MIN);
                        let m = if deficit > 0.0 {
                            -(((n - 1) * (n - 1)) as f64 + 1.0).ln() - deficit.ln()
                        } else {
                            f64::INFINITY
                        };
                        report.push("c_flat_bound", n, m, m > tol);
                    }
                }
            }
            let m = self.absorption_upper_margin(n);
            report.push("absorption", n, m, m > tol);
            let m = self.absorption_lower_margin(n);
            report.push("absorption_lower", n, m, m > tol);
        }
    }

    fn gamma_checks_pass(&self, levels: usize) -> bool {
        let mut r = VerificationReport::new(self.params.gamma, self.params.delta);
        self.push_gamma_checks(&mut r, levels);
        r.overall
    }

    /// Largest `δ` (to [`DELTA_RESOLUTION`]) for which the analytic disk chain
    /// holds for `2 ≤ n ≤ levels` and sampled disk boundaries map inside the
    /// next disk.
    pub fn delta_threshold(&self, levels: usize) -> Result<f64> {
        if levels > self.params.max_level {
            return Err(Error::LevelOutOfRange {
                level: levels,
                max: self.params.max_level,
            });
        }
        let sampled_to = levels.min(self.params.max_level - 1);
        let passes = |delta: f64| -> Result<bool> {
            let analytic = (2..=levels).all(|n| {
                Self::delta_chain_margin(n, delta) >= 0.0 && self.disk_in_band_margin(n, delta) > 0.0
            });
            if !analytic {
                return Ok(false);
            }
            match crate::dynamics::check_disk_chain(self, delta, 2, sampled_to, self.params.samples) {
                Ok(r) => Ok(r.overall),
                Err(Error::SampleOutsideBand { .. }) => Ok(false),
                Err(e) => Err(e),
            }
        };
        let mut lo = DELTA_RESOLUTION;
        let mut hi = 1.0;
        if !passes(lo)? {
            return Err(Error::HypothesisViolated(vec![format!(
                "disk chain fails already at delta = {lo}"
            )]));
        }
        while hi - lo > DELTA_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            if passes(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}
