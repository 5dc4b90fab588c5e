//! Command drivers. Each returns its textual output; files are written here,
//! on the calling thread.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use wanderlab::construction::default_gamma;
use wanderlab::dynamics::{check_band_visits, check_disk_chain, hn_experiment};
use wanderlab::geometry::length_growth_experiment;
use wanderlab::qgmap::estimate_dilatation;
use wanderlab::render::{render_band, tag_csv, write_ppm};
use wanderlab::{
    classify, classify_escape, dilatation_bound, gamma_threshold, iterate, xi, Construction, Error, LPoint, LValue,
    RasterSpec, RegionTag, VerificationReport,
};

use crate::args::{Command, Experiment};
use crate::manifest::RunManifest;
use crate::points::{parse_coloring, parse_point, parse_probe};

/// Deepest level whose bands enter the dilatation summary of `verify`.
const VERIFY_DILATATION_TOP: usize = 12;
/// Grid used for the dilatation summary of `verify`.
const VERIFY_DILATATION_GRID: usize = 64;
/// Seeds in `ann(S_1, Q_2)` for the band-visit check: radial × angular grid.
const VERIFY_SEED_GRID: (usize, usize) = (4, 8);
const VERIFY_ORBIT_STEPS: usize = 30;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags or inputs: exit 2.
    Usage(String),
    /// A library error during the run: exit 1.
    Runtime(Error),
    /// The run completed and some check failed: exit 1.
    Checks(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) | Failure::Checks(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Checks(m) => f.write_str(m),
            Failure::Runtime(e) => e.fmt(f),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::LevelOutOfRange { .. } | Error::Parse(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other),
        }
    }
}

/// Writes `text` to `out`, or prints it when no path is given.
fn emit(text: &str, out: Option<&Path>, manifest: &mut RunManifest) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::Runtime(e.into()))?;
            manifest.outputs.push(path.to_path_buf());
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn name(command: &Command) -> &'static str {
    match command {
        Command::Verify { .. } => "verify",
        Command::Orbit { .. } => "orbit",
        Command::Escape { .. } => "escape",
        Command::Experiment { kind } => match kind {
            Experiment::Hn { .. } => "experiment hn",
            Experiment::Growth { .. } => "experiment growth",
            Experiment::Dilatation { .. } => "experiment dilatation",
        },
        Command::Render { .. } => "render",
        Command::Threshold { .. } => "threshold",
    }
}

pub fn run(command: &Command, ctx: &Construction, manifest: &mut RunManifest) -> Result<(), Failure> {
    match command {
        Command::Verify { out } => verify(ctx, out.as_deref(), manifest),
        Command::Orbit { point, steps, out } => {
            manifest.seeds.push(point.clone());
            let start = parse_point(point, ctx).map_err(Failure::Usage)?;
            emit(&orbit_csv(ctx, &start, *steps), out.as_deref(), manifest)
        }
        Command::Escape { point, budget } => {
            manifest.seeds.push(point.clone());
            let start = parse_point(point, ctx).map_err(Failure::Usage)?;
            println!("{}", classify_escape(&start, ctx, *budget));
            Ok(())
        }
        Command::Experiment { kind } => experiment(ctx, kind, manifest),
        Command::Render {
            level,
            coloring,
            width,
            height,
            out,
            tags_csv,
        } => {
            let coloring = parse_coloring(coloring, ctx.params().delta).map_err(Failure::Usage)?;
            let spec = RasterSpec::new(*level, *width, *height, coloring);
            let img = render_band(ctx, &spec)?;
            write_ppm(&img, out)?;
            manifest.outputs.push(out.clone());
            if let Some(path) = tags_csv {
                emit(&tag_csv(ctx, &spec)?, Some(path), manifest)?;
            }
            Ok(())
        }
        Command::Threshold { tol } => {
            if !(*tol > 0.0) {
                return Err(Failure::Usage(format!("tol must be positive, got {tol}")));
            }
            let levels = ctx.max_level();
            let g = gamma_threshold(levels, ctx.params().delta, *tol)?;
            println!("gamma_threshold({levels}) = {g:.6}");
            println!("default_gamma({levels}) = {:.6}", default_gamma(levels)?);
            println!("delta_threshold(gamma = {:.6}) = {:.6}", ctx.gamma(), ctx.delta_threshold(levels)?);
            Ok(())
        }
    }
}

fn verify(ctx: &Construction, out: Option<&Path>, manifest: &mut RunManifest) -> Result<(), Failure> {
    let report = verify_report(ctx, manifest)?;
    emit(&(report.to_json() + "\n"), out, manifest)?;
    let total = report.checks.len();
    match report.first_failure() {
        None => {
            eprintln!("verify: all {total} checks pass");
            Ok(())
        }
        Some(c) => {
            let failed = report.failures().count();
            Err(Failure::Checks(format!(
                "verify: {failed} of {total} checks fail; first: {} at n={} (margin {:e})",
                c.name, c.n, c.margin
            )))
        }
    }
}

/// Inequality families, the sampled disk chain, band visits and measured
/// band dilatation. Errors in the sampled stages are recorded as failed checks.
fn verify_report(ctx: &Construction, manifest: &mut RunManifest) -> Result<VerificationReport, Failure> {
    let levels = ctx.max_level();
    let p = ctx.params();
    let mut report = ctx.verify_inequalities(levels)?;

    match check_disk_chain(ctx, p.delta, 2, levels - 1, p.samples) {
        Ok(r) => report.merge(r),
        Err(e) => {
            eprintln!("verify: disk chain: {e}");
            report.push("disk_chain", 0, f64::MIN, false);
        }
    }

    let seeds = band_visit_seeds(ctx);
    manifest.seeds.extend(seeds.iter().map(LValue::to_string));
    match check_band_visits(ctx, &seeds, VERIFY_ORBIT_STEPS) {
        Ok(r) => report.merge(r),
        Err(e) => {
            eprintln!("verify: band visits: {e}");
            report.push("band_visits", 0, f64::MIN, false);
        }
    }

    for n in 2..=VERIFY_DILATATION_TOP.min(levels - 1) {
        for band in [RegionTag::InterpLower(n), RegionTag::InterpUpper(n)] {
            match estimate_dilatation(ctx, band, VERIFY_DILATATION_GRID, VERIFY_DILATATION_GRID) {
                Ok(stats) => {
                    let margin = dilatation_bound(n) - stats.max_k;
                    report.push("dilatation", n, margin, margin > 0.0);
                    report.dilatation.push(stats);
                }
                Err(e) => {
                    eprintln!("verify: dilatation of {band}: {e}");
                    report.push("dilatation", n, f64::MIN, false);
                }
            }
        }
    }
    Ok(report)
}

/// `ξ_2` and a deterministic grid in `ann(S_1, Q_2)`.
fn band_visit_seeds(ctx: &Construction) -> Vec<LValue> {
    let lo = ctx.half_width_f64(1);
    let hi = ctx.log_r_gap(2, 1).to_f64() - ctx.half_width_f64(2);
    let (radial, angular) = VERIFY_SEED_GRID;
    let mut seeds = vec![xi(2)];
    for i in 0..radial {
        let s = lo + (i as f64 + 0.5) / radial as f64 * (hi - lo);
        for j in 0..angular {
            let theta = -PI + (j as f64 + 0.5) * 2.0 * PI / angular as f64;
            seeds.push(LPoint::new(1, s, theta).into());
        }
    }
    seeds
}

/// Rows `step,level,s,theta,tag`; the origin has empty coordinates and the
/// final point is tagged when it lies within the table.
fn orbit_csv(ctx: &Construction, start: &LValue, steps: usize) -> String {
    let orbit = iterate(start, ctx, steps);
    let mut out = String::from("step,level,s,theta,tag\n");
    for (i, v) in orbit.points.iter().enumerate() {
        let tag = match (orbit.tags.get(i), v) {
            (Some(t), _) => t.to_string(),
            (None, LValue::Zero) => "Zero".to_string(),
            (None, LValue::Point(p)) => classify(p, ctx).map(|t| t.to_string()).unwrap_or_else(|_| "Beyond".into()),
        };
        match v {
            LValue::Zero => writeln!(out, "{i},,,,{tag}"),
            LValue::Point(p) => writeln!(out, "{i},{},{:.16e},{:.16e},{tag}", p.level, p.s_f64(), p.theta),
        }
        .expect("writing to a String");
    }
    out
}

fn experiment(ctx: &Construction, kind: &Experiment, manifest: &mut RunManifest) -> Result<(), Failure> {
    match kind {
        Experiment::Hn { m, probe, n_max, out } => {
            manifest.seeds.push(probe.clone());
            let probe = parse_probe(probe, ctx, *m).map_err(Failure::Usage)?;
            let mut csv = String::from("n,value,reference\n");
            for r in hn_experiment(ctx, *m, probe, *n_max)? {
                writeln!(csv, "{},{:.16e},{:.16e}", r.n, r.log_abs_h, r.reference).expect("writing to a String");
            }
            emit(&csv, out.as_deref(), manifest)
        }
        Experiment::Growth {
            k,
            dilatation,
            n_max,
            refine_limit,
            out,
        } => {
            if !(*dilatation >= 1.0) {
                return Err(Failure::Usage(format!("K must be at least 1, got {dilatation}")));
            }
            let mut csv = String::from("n,lower_bound,winding_measured,winding_floor\n");
            for r in length_growth_experiment(ctx, *k, *dilatation, *n_max, *refine_limit)? {
                let measured = r.winding_measured.map(|w| w.to_string()).unwrap_or_default();
                writeln!(csv, "{},{:.16e},{measured},{}", r.n, r.lower_bound, r.winding_floor)
                    .expect("writing to a String");
            }
            emit(&csv, out.as_deref(), manifest)
        }
        Experiment::Dilatation {
            from,
            to,
            radial,
            angular,
            out,
        } => {
            if *from < 2 || from > to || *to >= ctx.max_level() {
                return Err(Failure::Usage(format!(
                    "need 2 <= from <= to < max-level = {}, got {from}..={to}",
                    ctx.max_level()
                )));
            }
            let mut csv = String::from("band,n,max_K,mean_K,max_mu,step\n");
            for n in *from..=*to {
                for band in [RegionTag::InterpLower(n), RegionTag::InterpUpper(n)] {
                    let s = estimate_dilatation(ctx, band, *radial, *angular)?;
                    writeln!(
                        csv,
                        "{},{n},{:.16e},{:.16e},{:.16e},{:.16e}",
                        band.kind(),
                        s.max_k,
                        s.mean_k,
                        s.max_mu,
                        s.step
                    )
                    .expect("writing to a String");
                }
            }
            emit(&csv, out.as_deref(), manifest)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wanderlab::ConstructionParams;

    fn ctx() -> Construction {
        Construction::new(ConstructionParams::new(60.0, 0.01, 12, 64, 64).unwrap()).unwrap()
    }

    #[test]
    fn failures_map_to_exit_codes() {
        let usage: Failure = Error::InvalidParameter { name: "m", reason: String::new() }.into();
        assert_eq!(usage.exit_code(), 2);
        let runtime: Failure = Error::BeyondMaxLevel { max_level: 3 }.into();
        assert_eq!(runtime.exit_code(), 1);
        assert!(runtime.to_string().starts_with("BeyondMaxLevel"));
        assert_eq!(Failure::Checks(String::new()).exit_code(), 1);
    }

    #[test]
    fn orbit_of_the_origin_is_zero() {
        let csv = orbit_csv(&ctx(), &LValue::Zero, 3);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("step,level,s,theta,tag"));
        assert!(lines.all(|l| l.ends_with(",,,,Zero") || l.ends_with(",,,,InnerCore")));
    }

    #[test]
    fn critical_orbit_rows() {
        let c = ctx();
        let csv = orbit_csv(&c, &xi(2), 4);
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), 5);
        for (i, row) in rows.iter().enumerate() {
            let fields: Vec<&str> = row.split(',').collect();
            assert_eq!(fields[0], i.to_string());
            assert_eq!(fields[4], format!("CriticalBand({})", i + 2));
        }
    }

    #[test]
    fn seeds_lie_in_the_base_annulus() {
        let c = ctx();
        let seeds = band_visit_seeds(&c);
        assert_eq!(seeds.len(), 1 + VERIFY_SEED_GRID.0 * VERIFY_SEED_GRID.1);
        for s in &seeds[1..] {
            let p = s.point().unwrap();
            assert!(p.s_f64() > c.half_width_f64(1));
        }
    }
}
