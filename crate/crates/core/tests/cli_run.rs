use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use uavjam::cli::{self, RunFlags, RunManifest, Topology};
use uavjam::scenario::{self, ScenarioConfig};
use uavjam::Error;

const POSITIONS: &str =
    r#""fixed_positions": [{"x": 10, "y": 10}, {"x": 35, "y": 5}, {"x": 15, "y": 30}, {"x": 40, "y": 25}]"#;
const SMALL_GA: &str =
    r#""ga": {"population_size": 12, "max_generations": 4, "inner_population_size": 8, "inner_max_generations": 4}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uavjam"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run_bin(args: &[&str]) -> Output {
    let out = bin().args(args).env("RUST_LOG", "warn").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap()
}

#[test]
fn same_seed_gives_identical_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        &format!(r#"{{"kind": "fixed_area", {SMALL_GA}}}"#),
    );
    let dirs: Vec<PathBuf> = ["a", "b", "c"].iter().map(|d| tmp.path().join(d)).collect();
    for (k, d) in dirs.iter().enumerate() {
        let mut args = vec![
            "run",
            cfg.to_str().unwrap(),
            "--seed",
            "42",
            "--out",
            d.to_str().unwrap(),
        ];
        if k == 2 {
            args.push("--sequential");
        }
        run_bin(&args);
    }
    for d in &dirs[1..] {
        assert_eq!(read(&dirs[0], "convergence.csv"), read(d, "convergence.csv"));
        assert_eq!(read(&dirs[0], "topology_0.json"), read(d, "topology_0.json"));
        assert_eq!(read(&dirs[0], "topology_0.svg"), read(d, "topology_0.svg"));
    }
    for f in ["manifest.json", "timing.csv"] {
        assert!(dirs[0].join(f).is_file());
    }
}

#[test]
fn csv_rows_follow_generations_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "m.json",
        &format!(r#"{{"kind": "moving", "motion": {{"n_windows": 3}}, {SMALL_GA}}}"#),
    );
    let out = tmp.path().join("out");
    run_bin(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let csv = String::from_utf8(read(&out, "convergence.csv")).unwrap();
    for w in 0..3 {
        let topo: Topology = serde_json::from_slice(&read(&out, &format!("topology_{w}.json"))).unwrap();
        let rows = csv.lines().skip(1).filter(|l| l.starts_with(&format!("{w},"))).count();
        assert_eq!(rows, topo.generations_run + 1);
        assert_eq!(topo.area_origin.x, 15.0 * w as f64);
        assert!(out.join(format!("topology_{w}.svg")).is_file());
    }
}

#[test]
fn topology_rederives_from_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        &format!(r#"{{"kind": "fixed_area", {SMALL_GA}}}"#),
    );
    let out = tmp.path().join("o");
    run_bin(&[
        "run",
        cfg.to_str().unwrap(),
        "--seed",
        "5",
        "--omni",
        "--out",
        out.to_str().unwrap(),
    ]);
    let manifest: RunManifest = serde_json::from_slice(&read(&out, "manifest.json")).unwrap();
    assert_eq!(manifest.rng_seed, 5);
    assert!(manifest.config.omnidirectional);
    let again = scenario::run(&manifest.config).unwrap();
    let topo: Topology = serde_json::from_slice(&read(&out, "topology_0.json")).unwrap();
    let snap = &again.windows[0].snapshot;
    assert_eq!(topo.of, snap.of);
    assert_eq!(topo.capacity_bps, snap.capacity);
    assert_eq!(topo.e2e_bps, snap.routing.e2e_rows());
}

#[test]
fn compare_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let stat = write_config(
        tmp.path(),
        "s.json",
        &format!(r#"{{"kind": "static", {POSITIONS}, "ga": {{"population_size": 20, "max_generations": 10}}}}"#),
    );
    let area = write_config(
        tmp.path(),
        "f.json",
        &format!(r#"{{"kind": "fixed_area", {SMALL_GA}}}"#),
    );
    let beam = tmp.path().join("beam");
    let omni = tmp.path().join("omni");
    let beam2 = tmp.path().join("beam2");
    let other = tmp.path().join("other");
    let flags = RunFlags {
        seed: Some(1),
        ..RunFlags::default()
    };
    let omni_flags = RunFlags {
        omni: true,
        ..flags.clone()
    };
    let parsed = cli::parse_config(&stat).unwrap();
    cli::run(&parsed, &stat, &beam, &flags).unwrap();
    cli::run(&parsed, &stat, &beam2, &flags).unwrap();
    cli::run(&parsed, &stat, &omni, &omni_flags).unwrap();
    cli::run(&cli::parse_config(&area).unwrap(), &area, &other, &flags).unwrap();

    let same = cli::compare(&beam, &beam2).unwrap();
    assert_eq!(same.of_ratio, 1.0);
    assert!(same.deltas.iter().all(|d| d.delta() == 0.0));
    assert_eq!(same.deltas.len(), 11);

    let c = cli::compare(&beam, &omni).unwrap();
    assert!(c.of_ratio > 1.0);
    assert!(c.a.e2e_avg_bps > c.b.e2e_avg_bps);

    assert!(matches!(cli::compare(&beam, &other), Err(Error::Compare(_))));

    // zero objective in the denominator
    let topo_path = omni.join("topology_0.json");
    let mut topo: Topology = serde_json::from_slice(&fs::read(&topo_path).unwrap()).unwrap();
    topo.of = 0.0;
    fs::write(&topo_path, serde_json::to_string(&topo).unwrap()).unwrap();
    assert_eq!(cli::compare(&beam, &omni).unwrap().of_ratio, f64::INFINITY);

    let out = run_bin(&["compare", beam.to_str().unwrap(), beam2.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("OF ratio A/B: 1.000000e0"));
}

#[test]
fn validate_reports_bad_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let good = write_config(tmp.path(), "g.json", r#"{"kind": "fixed_area"}"#);
    let out = run_bin(&["validate", good.to_str().unwrap()]);
    let printed: ScenarioConfig = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(printed, ScenarioConfig::new(scenario::ScenarioKind::FixedArea));

    let bad = write_config(
        tmp.path(),
        "b.json",
        r#"{"kind": "fixed_area", "grid": {"spacing": 0}}"#,
    );
    let out = bin().args(["validate", bad.to_str().unwrap()]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("spacing"));

    let out = bin().args(["validate", "/no/such/file.json"]).output().unwrap();
    assert!(!out.status.success());

    let missing = write_config(tmp.path(), "s.json", r#"{"kind": "static"}"#);
    let out = bin().args(["validate", missing.to_str().unwrap()]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).contains("fixed_positions"));
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "json") {
            cli::parse_config(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            seen += 1;
        }
    }
    assert_eq!(seen, 4);
    let s = cli::parse_config(&dir.join("static.json")).unwrap();
    assert_eq!(s.fixed_positions.unwrap(), scenario::default_fixed_positions());
}

#[test]
fn output_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        &format!(r#"{{"kind": "static", {POSITIONS}, "ga": {{"population_size": 6, "max_generations": 2}}}}"#),
    );
    let out = tmp.path().join("from-env");
    let run = bin()
        .args(["run", cfg.to_str().unwrap()])
        .env("UAVJAM_OUT", &out)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap();
    assert!(run.status.success());
    assert!(out.join("convergence.csv").is_file());
}

#[test]
fn unwritable_output_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", &format!(r#"{{"kind": "static", {POSITIONS}}}"#));
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = bin()
        .args([
            "run",
            cfg.to_str().unwrap(),
            "--out",
            blocker.join("sub").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
