use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_floquet-dtc");

fn run(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).current_dir(dir).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write_config(dir: &Path, doc: Value) -> String {
    let path = dir.join("run.json");
    fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    path.display().to_string()
}

fn small_config() -> Value {
    json!({
        "lattice": "square(2,2)",
        "theta_x": "0.9pi",
        "n_steps": 8,
        "n_traj": 6,
        "p": 0.3,
        "seed": 4,
        "observables": ["z_avg", {"snapshot": [0, 8]}, {"otoc": {"j": 0, "k": 2}}],
        "regions": ["all", "bulk"],
    })
}

#[test]
fn simulate_writes_outputs_and_manifest_replays() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), small_config());
    let (code, stdout, stderr) = run(tmp.path(), &["simulate", "--config", &cfg, "--out", "a"]);
    assert_eq!(code, 0, "{stderr}");
    let report: Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(report["command"], "simulate");
    for f in ["series.csv", "snapshots.csv", "lattice.json", "manifest.json"] {
        assert!(tmp.path().join("a").join(f).exists(), "{f}");
    }
    let series = fs::read_to_string(tmp.path().join("a/series.csv")).unwrap();
    assert!(series.starts_with("step,observable,region,mean,stderr\n"));
    assert!(series.contains(",otoc,j0_k2,"));
    assert!(series.contains(",z_avg,bulk,"));

    let (code, _, stderr) = run(
        tmp.path(),
        &[
            "simulate",
            "--config",
            "a/manifest.json",
            "--out",
            "b",
            "--threads",
            "2",
        ],
    );
    assert_eq!(code, 0, "{stderr}");
    for f in ["series.csv", "snapshots.csv"] {
        assert_eq!(
            fs::read(tmp.path().join("a").join(f)).unwrap(),
            fs::read(tmp.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }

    let (_, _, _) = run(
        tmp.path(),
        &["simulate", "--config", &cfg, "--out", "c", "--seed", "5"],
    );
    assert_ne!(
        fs::read(tmp.path().join("a/series.csv")).unwrap(),
        fs::read(tmp.path().join("c/series.csv")).unwrap()
    );
}

#[test]
fn otoc_subcommand() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), small_config());
    let (code, _, stderr) = run(tmp.path(), &["otoc", "--config", &cfg, "--out", "o"]);
    assert_eq!(code, 0, "{stderr}");
    let text = fs::read_to_string(tmp.path().join("o/otoc.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.contains(",otoc,")));

    let mut no_otoc = small_config();
    no_otoc["observables"] = json!(["z_avg"]);
    let cfg = write_config(tmp.path(), no_otoc);
    let (code, _, stderr) = run(tmp.path(), &["otoc", "--config", &cfg]);
    assert_eq!(code, 1);
    let err: Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(err["error"], "config");
}

#[test]
fn emit_circuit_reports_native_count() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        json!({"lattice": "Kagome82", "theta_x": "0.9pi", "n_steps": 1, "m_cnot": 3}),
    );
    let (code, _, stderr) = run(tmp.path(), &["emit-circuit", "--config", &cfg, "--out", "."]);
    assert_eq!(code, 0, "{stderr}");
    let text = fs::read_to_string(tmp.path().join("circuit.txt")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# cycle model=Ising"));
    assert_eq!(lines.next().unwrap(), "# native_gates=426 m_cnot=3");
    assert_eq!(lines.filter(|l| l.starts_with("RX ")).count(), 82);
}

#[test]
fn fit_and_mitigate_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let mut raw = String::from("step,observable,region,mean,stderr\n");
    let mut reference = raw.clone();
    for n in 0..30 {
        let ideal = if n % 2 == 0 {
            0.8f64.powi(n / 2)
        } else {
            -(0.8f64.powi(n / 2))
        };
        let f = 0.97f64.powi(n);
        raw.push_str(&format!("{n},z_avg,all,{},0\n", f * ideal));
        reference.push_str(&format!(
            "{n},z_avg,all,{},0\n",
            f * if n % 2 == 0 { 1.0 } else { -1.0 }
        ));
    }
    fs::write(tmp.path().join("raw.csv"), &raw).unwrap();
    fs::write(tmp.path().join("ref.csv"), &reference).unwrap();

    let (code, _, stderr) = run(
        tmp.path(),
        &["fit", "--input", "raw.csv", "--magnitude", "--model", "single"],
    );
    assert_eq!(code, 0, "{stderr}");
    let fit: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("fit.json")).unwrap()).unwrap();
    assert_eq!(fit["model"], "single");
    let eta = fit["params"]["eta"].as_f64().unwrap();
    assert!((eta - 0.97 * 0.8f64.sqrt()).abs() < 0.02, "{eta}");

    let (code, _, stderr) = run(
        tmp.path(),
        &["mitigate", "--input", "raw.csv", "--reference", "ref.csv"],
    );
    assert_eq!(code, 0, "{stderr}");
    let text = fs::read_to_string(tmp.path().join("mitigated.csv")).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    for (n, rec) in rows.records().enumerate() {
        let rec = rec.unwrap();
        let got: f64 = rec[3].parse().unwrap();
        let ideal = 0.8f64.powi(n as i32 / 2) * if n % 2 == 0 { 1.0 } else { -1.0 };
        assert!((got - ideal).abs() < 1e-12, "step {n}");
        assert_eq!(&rec[5], "true");
    }

    let (code, _, stderr) = run(
        tmp.path(),
        &["fit", "--input", "raw.csv", "--model", "double", "--magnitude"],
    );
    assert_eq!(code, 0, "{stderr}");
    let fit: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("fit.json")).unwrap()).unwrap();
    assert_eq!(fit["model"], "double");
}

#[test]
fn theory_check_and_presets() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(tmp.path(), &["theory-check", "--out", "."]);
    assert_eq!(code, 0, "{stderr}");
    let records: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("theory_check.json")).unwrap()).unwrap();
    let records = records.as_array().unwrap();
    assert!(!records.is_empty() && records.iter().all(|r| r["pass"] == true));

    let (code, stdout, _) = run(tmp.path(), &["presets", "--out", "."]);
    assert_eq!(code, 0);
    assert!(stdout.contains("Kagome82") && stdout.contains("HeavyHex28"));
    let rows: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("presets.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 15);
}

#[test]
fn errors_are_json() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        json!({"lattice": "Honeycomb7", "theta_x": 1.0, "n_steps": 2}),
    );
    let (code, _, stderr) = run(tmp.path(), &["simulate", "--config", &cfg]);
    assert_eq!(code, 1);
    let err: Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(err["error"], "unknown_preset");
    assert!(err["message"].as_str().unwrap().contains("Kagome82"));

    let (code, _, stderr) = run(tmp.path(), &["simulate"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("\"error\""));

    let (code, _, stderr) = run(tmp.path(), &["frobnicate"]);
    assert_eq!(code, 2);
    let err: Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(err["error"], "usage");

    let (code, stdout, _) = run(tmp.path(), &["--help"]);
    assert_eq!(code, 0);
    for sub in [
        "simulate",
        "otoc",
        "theory-check",
        "fit",
        "mitigate",
        "emit-circuit",
        "presets",
    ] {
        assert!(stdout.contains(sub), "{sub}");
    }
}
