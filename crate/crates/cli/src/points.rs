//! Textual inputs: points, probes and colorings.

use wanderlab::dynamics::Probe;
use wanderlab::{xi, Coloring, Construction, LPoint, LValue};

/// Argument used for `ann:<n>`; off the real axis so no slit is involved.
const ANNULUS_THETA: f64 = 0.5;

/// Parses `L<level>:<s>:<theta>`, `xi:<n>`, `ann:<n>` (the log-midpoint of
/// `ann(S_n, Q_{n+1})`) or `0` for the origin.
pub fn parse_point(text: &str, ctx: &Construction) -> Result<LValue, String> {
    let text = text.trim();
    if text == "0" || text.eq_ignore_ascii_case("zero") {
        return Ok(LValue::Zero);
    }
    if let Some(n) = text.strip_prefix("xi:") {
        let n = parse_level(n, text)?;
        if !(2..=ctx.max_level()).contains(&n) {
            return Err(format!("xi:<n> needs 2 <= n <= {}, got {n}", ctx.max_level()));
        }
        return Ok(xi(n));
    }
    if let Some(n) = text.strip_prefix("ann:") {
        let n = parse_level(n, text)?;
        if !(1..ctx.max_level()).contains(&n) {
            return Err(format!("ann:<n> needs 1 <= n < {}, got {n}", ctx.max_level()));
        }
        let lo = ctx.half_width_f64(n);
        let hi = ctx.log_r_gap(n + 1, n).to_f64() - ctx.half_width_f64(n + 1);
        return Ok(LPoint::new(n, 0.5 * (lo + hi), ANNULUS_THETA).into());
    }
    let p: LPoint = text.parse().map_err(|e| format!("{e}"))?;
    if p.level > ctx.max_level() {
        return Err(format!("level {} exceeds max-level {}", p.level, ctx.max_level()));
    }
    Ok(p.into())
}

fn parse_level(n: &str, whole: &str) -> Result<usize, String> {
    n.parse().map_err(|_| format!("bad level in {whole:?}"))
}

/// Parses `disk:<l>`, `ann:<s>:<theta>` or `ann`.
pub fn parse_probe(text: &str, ctx: &Construction, m: usize) -> Result<Probe, String> {
    let bad = || format!("expected disk:<l>, ann:<s>:<theta> or ann, got {text:?}");
    if let Some(l) = text.strip_prefix("disk:") {
        return Ok(Probe::DiskCenter(l.parse().map_err(|_| bad())?));
    }
    if text == "ann" {
        if m == 0 || m >= ctx.max_level() {
            return Err(format!("m = {m} out of range"));
        }
        let lo = 2.0 * ctx.half_width_f64(m);
        let hi = ctx.log_r_gap(m + 1, m).to_f64() - 2.0 * ctx.half_width_f64(m + 1);
        return Ok(Probe::AnnulusPoint {
            s: 0.5 * (lo + hi),
            theta: ANNULUS_THETA,
        });
    }
    let rest = text.strip_prefix("ann:").ok_or_else(bad)?;
    let (s, theta) = rest.split_once(':').ok_or_else(bad)?;
    Ok(Probe::AnnulusPoint {
        s: s.parse().map_err(|_| bad())?,
        theta: theta.parse().map_err(|_| bad())?,
    })
}

/// Parses `region`, `levels:<steps>`, `disk` or `disk:<delta>`.
pub fn parse_coloring(text: &str, default_delta: f64) -> Result<Coloring, String> {
    let bad = || format!("expected region, levels:<steps> or disk[:<delta>], got {text:?}");
    match text {
        "region" => Ok(Coloring::RegionTag),
        "disk" => Ok(Coloring::DiskChain { delta: default_delta }),
        _ => {
            if let Some(steps) = text.strip_prefix("levels:") {
                Ok(Coloring::LevelsAdvanced {
                    steps: steps.parse().map_err(|_| bad())?,
                })
            } else if let Some(delta) = text.strip_prefix("disk:") {
                let delta: f64 = delta.parse().map_err(|_| bad())?;
                if !(delta > 0.0 && delta < 1.0) {
                    return Err(format!("disk delta must lie in (0, 1), got {delta}"));
                }
                Ok(Coloring::DiskChain { delta })
            } else {
                Err(bad())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wanderlab::ConstructionParams;

    fn ctx() -> Construction {
        Construction::new(ConstructionParams::new(60.0, 0.01, 20, 64, 64).unwrap()).unwrap()
    }

    #[test]
    fn point_forms() {
        let c = ctx();
        assert_eq!(parse_point("0", &c).unwrap(), LValue::Zero);
        assert_eq!(parse_point("xi:3", &c).unwrap(), xi(3));
        let p = parse_point("L2:1.5:-0.25", &c).unwrap();
        assert_eq!(p, LPoint::new(2, 1.5, -0.25).into());
        let a = parse_point("ann:1", &c).unwrap();
        let a = a.point().unwrap();
        assert!(a.s_f64() > c.half_width_f64(1));
        assert!(parse_point("xi:1", &c).is_err());
        assert!(parse_point("xi:99", &c).is_err());
        assert!(parse_point("L25:0:0", &c).is_err());
        assert!(parse_point("nonsense", &c).is_err());
    }

    #[test]
    fn probe_forms() {
        let c = ctx();
        assert_eq!(parse_probe("disk:3", &c, 2).unwrap(), Probe::DiskCenter(3));
        assert_eq!(
            parse_probe("ann:50:0.1", &c, 2).unwrap(),
            Probe::AnnulusPoint { s: 50.0, theta: 0.1 }
        );
        assert!(matches!(parse_probe("ann", &c, 2).unwrap(), Probe::AnnulusPoint { .. }));
        assert!(parse_probe("disk:x", &c, 2).is_err());
    }

    #[test]
    fn coloring_forms() {
        assert_eq!(parse_coloring("region", 0.01).unwrap(), Coloring::RegionTag);
        assert_eq!(parse_coloring("levels:3", 0.01).unwrap(), Coloring::LevelsAdvanced { steps: 3 });
        assert_eq!(parse_coloring("disk", 0.02).unwrap(), Coloring::DiskChain { delta: 0.02 });
        assert_eq!(parse_coloring("disk:0.03", 0.01).unwrap(), Coloring::DiskChain { delta: 0.03 });
        assert!(parse_coloring("disk:2", 0.01).is_err());
        assert!(parse_coloring("plasma", 0.01).is_err());
    }
}
