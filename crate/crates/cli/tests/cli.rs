//! End-to-end runs of the `wanderlab` binary.

use std::path::Path;
use std::process::{Command, Output};

fn wanderlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wanderlab"))
        .args(args)
        .env_remove("WANDERLAB_SIG_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn verify_passes_at_default_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = wanderlab(&["verify", "--max-level", "15", "--out", path_arg(&report)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["overall"], true);
    assert_eq!(json["schema"], 1);
    let names: Vec<&str> = json["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    for family in ["ordering", "absorption", "delta_chain", "disk_chain", "band_visits", "dilatation"] {
        assert!(names.contains(&family), "{family} missing");
    }
    assert!(!json["dilatation"].as_array().unwrap().is_empty());
}

#[test]
fn verify_fails_on_ordering_at_gamma_one() {
    let o = wanderlab(&["verify", "--gamma", "1", "--max-level", "10"]);
    assert_eq!(o.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["overall"], false);
    let first = json["checks"].as_array().unwrap().iter().find(|c| c["pass"] == false).unwrap();
    assert_eq!((first["name"].as_str(), first["n"].as_u64()), (Some("ordering"), Some(1)));
    assert!(stderr(&o).contains("first: ordering at n=1"));
}

#[test]
fn invalid_flags_are_usage_errors() {
    for args in [
        &["verify", "--gamma", "-3"][..],
        &["verify", "--delta", "1.5"],
        &["verify", "--max-level", "2"],
        &["verify", "--no-such-flag"],
        &["escape", "--point", "L1:zero:0"],
        &["render", "--coloring", "plasma", "--out", "unused.ppm"],
        &["experiment", "hn", "--m", "30"],
    ] {
        let o = wanderlab(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    let o = wanderlab(&["verify", "--gamma", "-3"]);
    assert!(stderr(&o).contains("InvalidParameter"));
}

#[test]
fn bad_environment_precision_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_wanderlab"))
        .args(["escape", "--point", "xi:2"])
        .env("WANDERLAB_SIG_BITS", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn escape_verdicts() {
    let o = wanderlab(&["escape", "--point", "xi:2", "--budget", "30"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("FAST(L=1)"), "{}", stdout(&o));
    for point in ["L0:0:0", "0"] {
        let o = wanderlab(&["escape", "--point", point, "--budget", "30"]);
        assert!(stdout(&o).starts_with("BOUNDED"), "{point}: {}", stdout(&o));
    }
    let o = wanderlab(&["escape", "--point", "ann:1"]);
    assert!(stdout(&o).starts_with("FAST(L=1)"), "{}", stdout(&o));
}

#[test]
fn hn_disk_probe_converges_to_gamma_times_two() {
    let o = wanderlab(&["--gamma", "60", "experiment", "hn", "--m", "2", "--probe", "disk:3", "--n-max", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("n,value,reference"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[1], f[2])
        })
        .collect();
    assert_eq!(rows.len(), 11);
    let limit = 120.0;
    for (value, reference) in &rows {
        assert!((reference - limit).abs() < 1e-9);
        assert!(*value <= limit);
    }
    let errors: Vec<f64> = rows.iter().map(|(v, _)| limit - v).collect();
    assert!(errors.windows(2).all(|w| w[1] <= w[0]), "{errors:?}");
    assert!(errors[errors.len() - 1] < 1e-6, "{errors:?}");
}

#[test]
fn orbit_csv_follows_the_critical_chain() {
    let o = wanderlab(&["orbit", "--point", "xi:2", "--steps", "4"]);
    let out = stdout(&o);
    let tags: Vec<&str> = out.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(tags, ["CriticalBand(2)", "CriticalBand(3)", "CriticalBand(4)", "CriticalBand(5)", "CriticalBand(6)"]);
}

#[test]
fn experiments_write_csv_tables() {
    let dir = tempfile::tempdir().unwrap();
    let growth = dir.path().join("growth.csv");
    let o = wanderlab(&["--gamma", "60", "experiment", "growth", "--n-max", "6", "--out", path_arg(&growth)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&growth).unwrap();
    let windings: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(windings, ["1", "3", "12", "60", "360"]);

    let o = wanderlab(&["--gamma", "60", "experiment", "dilatation", "--from", "2", "--to", "3", "--radial", "16", "--angular", "16"]);
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("band,n,max_K,mean_K,max_mu,step"));
    assert_eq!(out.lines().count(), 5);
    for row in out.lines().skip(1) {
        let k: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((1.0..1.5).contains(&k), "{row}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let report = dir.path().join(format!("report-{tag}.json"));
        let image = dir.path().join(format!("band-{tag}.ppm"));
        let tags = dir.path().join(format!("tags-{tag}.csv"));
        let o = wanderlab(&["verify", "--max-level", "12", "--out", path_arg(&report)]);
        assert_eq!(o.status.code(), Some(0));
        let o = wanderlab(&[
            "--max-level",
            "12",
            "render",
            "--coloring",
            "disk",
            "--width",
            "200",
            "--height",
            "100",
            "--out",
            path_arg(&image),
            "--tags-csv",
            path_arg(&tags),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let orbit = wanderlab(&["orbit", "--point", "L1:30:0.25", "--steps", "10"]);
        [report, image, tags].map(|p| std::fs::read(p).unwrap()).to_vec().into_iter().chain([orbit.stdout]).collect::<Vec<_>>()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn manifest_lists_existing_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.json");
    let image = dir.path().join("band.ppm");
    let o = wanderlab(&[
        "--manifest",
        path_arg(&manifest),
        "render",
        "--width",
        "64",
        "--height",
        "32",
        "--out",
        path_arg(&image),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["command"], "render");
    let outputs = m["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 1);
    for p in outputs {
        assert!(Path::new(p.as_str().unwrap()).exists());
    }
    let ppm = std::fs::read(&image).unwrap();
    assert!(ppm.starts_with(b"P6\n64 32\n255\n"));
}

#[test]
fn config_file_and_environment_layer_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("params.conf");
    std::fs::write(&config, "# test\ngamma: 61.5\nmax_level = 12\n").unwrap();
    let manifest = dir.path().join("m.json");
    let o = Command::new(env!("CARGO_BIN_EXE_wanderlab"))
        .args(["--config", path_arg(&config), "--manifest", path_arg(&manifest), "--max-level", "11"])
        .args(["escape", "--point", "xi:2"])
        .env("WANDERLAB_SIG_BITS", "96")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["params"]["gamma"], 61.5);
    assert_eq!(m["params"]["max_level"], 11);
    assert_eq!(m["params"]["sig_bits"], 96);
    assert_eq!(m["seeds"][0], "xi:2");
}

#[test]
fn threshold_reports_both_thresholds() {
    let o = wanderlab(&["threshold", "--max-level", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let value = |prefix: &str| -> f64 {
        let line = out.lines().find(|l| l.starts_with(prefix)).unwrap();
        line.rsplit(" = ").next().unwrap().parse().unwrap()
    };
    assert!((value("gamma_threshold") - 54.3).abs() < 0.5);
    assert!((value("default_gamma") - 1.1 * value("gamma_threshold")).abs() < 0.1);
    assert!((0.02..=0.0485).contains(&value("delta_threshold")));
}
