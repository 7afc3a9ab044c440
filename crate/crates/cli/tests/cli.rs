use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wegnerlab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_wegner(out: &Path, extra: &[&str]) -> Output {
    let cfg = configs().join("certified_d1.json");
    let mut args = vec![
        "wegner",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--override",
        "samples=100",
        "--override",
        "sides=[8]",
        "--override",
        "h2.side=8",
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn wegner_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = small_wegner(dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("wegner.csv")).unwrap();
    assert!(csv.starts_with("mode,d,l,bc,E,eps,M,mean_trace,se,ucl99,bound,constant,pass,config_hash"));
    // 3 energies x 3 epsilons at a single side
    assert_eq!(csv.lines().count(), 1 + 9);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "wegner");
    assert_eq!(manifest["seed"], 20240501);
    assert_eq!(manifest["config"]["samples"], 100);
}

#[test]
fn outputs_are_identical_across_runs_and_worker_counts() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(small_wegner(a.path(), &[]).status.success());
    assert!(small_wegner(b.path(), &[]).status.success());
    assert!(run(&[
        "--workers",
        "3",
        "wegner",
        "--config",
        configs().join("certified_d1.json").to_str().unwrap(),
        "--out",
        c.path().to_str().unwrap(),
        "--override",
        "samples=100",
        "--override",
        "sides=[8]",
        "--override",
        "h2.side=8",
    ])
    .status
    .success());
    for name in ["wegner.csv", "h2.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(name)).unwrap());
        assert_eq!(x, std::fs::read(c.path().join(name)).unwrap());
    }
}

#[test]
fn zero_alpha0_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = small_wegner(dir.path(), &["--override", "alpha.entries.0.alpha=0.0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("alpha_0"), "{}", stderr(&o));
}

#[test]
fn schema_errors_name_the_field() {
    let cfg = configs().join("certified_d1.json");
    let o = run(&["validate", "--config", cfg.to_str().unwrap(), "--override", "samples=\"many\""]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("samples"), "{}", stdout(&o));
}

#[test]
fn step_vector_grows_linearly() {
    let dir = tempfile::tempdir().unwrap();
    let alpha = configs().join("step.json");
    let o = run(&[
        "toeplitz",
        "--alpha",
        alpha.to_str().unwrap(),
        "--sides",
        "4,8,16,32",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(dir.path().join("toeplitz.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    let slope: f64 = rows[0][4].parse().unwrap();
    assert!((slope - 1.0).abs() < 1e-9, "slope {slope}");
    // the step vector has α* = 1, so no certificate column
    assert!(rows.iter().all(|row| row[3].is_empty()));
}

#[test]
fn clean_configs_have_no_diagnostics() {
    for name in ["certified_d1.json", "volume_factor_d1.json", "averaging.json"] {
        let cfg = configs().join(name);
        let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", stdout(&o));
        assert_eq!(stdout(&o).trim(), "ok: no diagnostics", "{name}");
    }
}

#[test]
fn missing_initial_scale_constants_only_warn() {
    let cfg = configs().join("tails_d1.json");
    let o = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.starts_with("warning: q1")), "{text}");
}

#[test]
fn ids_in_uniform_mode_is_a_warning() {
    let cfg = configs().join("uniform_d1.json");
    let o = run(&[
        "validate",
        "--config",
        cfg.to_str().unwrap(),
        "--override",
        r#"ids={"side":16,"e_min":0.0,"e_max":2.0,"h":0.1}"#,
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("warning: mode: Lipschitz check is excluded"), "{}", stdout(&o));
}

#[test]
fn eps_u_above_threshold_is_a_warning() {
    let cfg = configs().join("tails_d1.json");
    let o = run(&[
        "validate",
        "--config",
        cfg.to_str().unwrap(),
        "--override",
        r#"u_minus={"d":1,"entries":[{"k":[1],"alpha":1.0}]}"#,
        "--override",
        "eps_u=0.5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("exceeds E/(8 omega_plus N)"), "{}", stdout(&o));
}

#[test]
fn tails_run_records_wilson_intervals() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("tails_d1.json");
    let o = run(&[
        "tails",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--override",
        "samples=200",
        "--override",
        "energies=[0.5]",
        "--seed",
        "5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(dir.path().join("tails.csv")).unwrap();
    for row in r.records().map(Result::unwrap) {
        let (p, lo, hi): (f64, f64, f64) = (row[4].parse().unwrap(), row[5].parse().unwrap(), row[6].parse().unwrap());
        assert!(lo <= p && p <= hi);
    }
}
