use std::path::Path;
use std::process::{Command, Output};

use horolab::distributions::{decay_report, invariant_distributions, DEFAULT_KERNEL_TOL};
use horolab::random::TestFunctions;
use horolab::rep::{build_rep, RepParams, Space};
use horolab_cli::report::{write_atomic, DecayCsvRow};
use horolab_cli::{run, ExperimentConfig, RunReport};

fn horolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horolab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = r#"
schema_version = 1
seed = 3
ops = ["solve", "split", "decay"]
const_cohomology = true

[[components]]
mu = 5.0
theta = 0.25
k = 8
"#;

#[test]
fn acceptance_preset_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("acc");
    let o = horolab(&["run", "--preset", "acceptance", "--quiet", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["report.json", "timing.json", "ratios.csv", "decay_0.csv", "decay_2.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let report: RunReport = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert!(report.passed);
    assert_eq!(report.components.len(), 3);
}

#[test]
fn empty_components_is_a_schema_violation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "schema_version = 1\ncomponents = []\n");
    let o = horolab(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema violation"));
}

#[test]
fn zero_casimir_reports_component_index() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!("{SMALL}\n[[components]]\nmu = 0.0\ntheta = 5.0\nk = 8\n");
    let cfg = write_config(dir.path(), &body);
    let o = horolab(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("component 1"), "{err}");
    assert!(err.to_lowercase().contains("casimir"), "{err}");
    match ExperimentConfig::parse(&body).unwrap_err() {
        horolab_cli::CliError::Component { index: 1, source } => {
            assert!(matches!(source, horolab::LabError::InvalidCasimir { .. }))
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unreadable_or_malformed_config_exits_2() {
    assert_eq!(horolab(&["run", "--config", "/nonexistent/config.toml"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "schema_version = \"one\"\n");
    assert_eq!(horolab(&["run", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let files = ["report.json", "ratios.csv", "decay_0.csv"];
    let mut snapshots = Vec::new();
    for seed in ["3", "3", "4"] {
        let o = horolab(&["run", "--quiet", "--config", &cfg, "--seed", seed, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        snapshots.push(files.map(|f| std::fs::read(out.join(f)).unwrap()));
    }
    assert_eq!(snapshots[0], snapshots[1]);
    assert_ne!(snapshots[0][0], snapshots[2][0]);
}

#[test]
fn run_report_round_trips() {
    let cfg = ExperimentConfig::parse(SMALL).unwrap();
    let (report, _) = run(&cfg).unwrap();
    let bytes = serde_json::to_vec_pretty(&report).unwrap();
    let back: RunReport = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(back, report);
    assert_eq!(serde_json::to_vec_pretty(&back).unwrap(), bytes);
}

#[test]
fn components_override_replaces_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("o");
    let o = horolab(&[
        "run",
        "--quiet",
        "--config",
        &cfg,
        "--components",
        "5,5,8;-2,5,8,1,0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: RunReport = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.components.len(), 2);
    assert_eq!(report.components[1].config.s, 0.5);
    assert_eq!(horolab(&["run", "--config", &cfg, "--components", "5,5"]).status.code(), Some(2));
}

#[test]
fn const_cohomology_prints_dimension_four() {
    let o = horolab(&["const-cohomology"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().next() == Some("dim 4"), "{text}");
    for label in ["F:V1", "F:U2", "Y:U1", "Y:V2"] {
        assert!(text.contains(label));
    }
    let o = horolab(&["const-cohomology", "--convention", "display", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim"], 4);
}

#[test]
fn sweep_emits_stability_columns() {
    let o = horolab(&["sweep", "--op", "split", "--levels", "8,16", "--orders", "0,1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let headers: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert!(headers.contains(&"change_log10".to_string()) && headers.contains(&"stable".to_string()));
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    // Two orders, four rows per order, two levels.
    assert_eq!(rows.len(), 16);
    let change = headers.iter().position(|h| h == "change_log10").unwrap();
    assert!(rows[..8].iter().all(|r| r[change].is_empty()));
    assert!(rows[8..].iter().all(|r| !r[change].is_empty()));
}

#[test]
fn decay_csv_matches_library() {
    let o = horolab(&["--quiet", "decay", "--mu", "0.25", "--r", "0", "--k", "16", "--seed", "2"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["n", "pairing", "envelope", "ratio"]);
    let rows: Vec<DecayCsvRow> = rdr.deserialize().map(Result::unwrap).collect();

    let rep = std::sync::Arc::new(build_rep(RepParams::new(0.25, 16)).unwrap());
    let ds = invariant_distributions(&rep, 1.0, DEFAULT_KERNEL_TOL).unwrap();
    let probe = TestFunctions::new(2).vector(&rep, Space::Padded, 0);
    let report = decay_report(&ds, &probe, 0.0).unwrap();
    assert_eq!(rows.len(), report.rows.len());
    for (a, b) in rows.iter().zip(&report.rows) {
        assert_eq!((a.n, a.pairing, a.envelope, a.ratio), (b.n, b.pairing, b.envelope, b.ratio));
    }
}

#[test]
fn invalid_casimir_on_subcommand_exits_2() {
    let o = horolab(&["build-rep", "--mu", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = horolab(&["build-rep", "--mu", "-2", "--k", "8"]);
    assert!(o.status.success());
}

#[test]
fn atomic_write_leaves_only_the_target() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested").join("x.json");
    write_atomic(&path, b"first").unwrap();
    write_atomic(&path, b"second").unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), b"second");
    let entries: Vec<_> = std::fs::read_dir(path.parent().unwrap()).unwrap().collect();
    assert_eq!(entries.len(), 1);
}
