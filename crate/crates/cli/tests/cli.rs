use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn imbreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imbreg"))
        .args(args)
        .output()
        .expect("run imbreg")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn profile_counts_rows() {
    let demand = data("demand.csv");
    let v = json(&imbreg(&[
        "profile",
        "--data",
        demand.to_str().unwrap(),
        "--target",
        "demand",
    ]));
    assert_eq!(v["N"], 240);
    assert_eq!(v["p_total"], 3);
    let rare = v["nRare"].as_u64().unwrap();
    assert!(rare > 0 && rare < 240);
}

#[test]
fn relevance_with_bumps_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rel.json");
    let demand = data("demand.csv");
    let o = imbreg(&[
        "relevance",
        "--data",
        demand.to_str().unwrap(),
        "--target",
        "demand",
        "--bumps",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out);
    assert!(!v["bumps"].as_array().unwrap().is_empty());
}

#[test]
fn resample_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ro.csv");
    let tails = data("tails.csv");
    let o = imbreg(&[
        "resample",
        "--data",
        tails.to_str().unwrap(),
        "--target",
        "response",
        "--kind",
        "size=ordinal:small,medium,large",
        "--strategy",
        "ro",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let side = read_json(&dir.path().join("ro.json"));
    let rows = std::fs::read_to_string(&out).unwrap().lines().count() - 1;
    assert_eq!(side["input_size"], 200);
    assert_eq!(side["output_size"].as_u64().unwrap() as usize, rows);
    assert!(rows > 200);
    // every added row is a replica of a rare original
    assert_eq!(side["synthetic_rows"].as_u64().unwrap() as usize, rows - 200);
    // ordinal levels come back as labels
    assert!(std::fs::read_to_string(&out).unwrap().contains(",medium,"));
}

#[test]
fn evaluate_with_control_points() {
    let dir = tempfile::tempdir().unwrap();
    let preds = dir.path().join("p.csv");
    let cps = dir.path().join("cps.csv");
    std::fs::write(&preds, "y_true,y_pred\n1,1.5\n2,2\n3,2.5\n8,7\n9,9.5\n").unwrap();
    std::fs::write(&cps, "y,rel,deriv\n0,0,0\n10,1,0\n").unwrap();
    let v = json(&imbreg(&[
        "evaluate",
        "--predictions",
        preds.to_str().unwrap(),
        "--control-points",
        cps.to_str().unwrap(),
        "--curve-step",
        "0.25",
    ]));
    assert!((v["mse"].as_f64().unwrap() - 0.35).abs() < 1e-12);
    assert!((v["mae"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(v["ser_curve"]["knots"].as_array().unwrap().len(), 5);
    assert!(v["f1"].as_f64().is_some());
}

#[test]
fn errors_exit_nonzero_with_message() {
    let o = imbreg(&["profile", "--data", "/nonexistent.csv", "--target", "y"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.json");
    std::fs::write(&cfg, r#"{"datasets": [], "bogus": 1}"#).unwrap();
    let o = imbreg(&[
        "bench",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));

    let demand = data("demand.csv");
    let o = imbreg(&[
        "profile",
        "--data",
        demand.to_str().unwrap(),
        "--target",
        "demand",
        "--kind",
        "site",
    ]);
    assert!(!o.status.success());
}

#[test]
fn bench_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.json");
    let demand = data("demand.csv");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "datasets": [{"path": demand, "target": "demand"}],
            "strategies": ["none", {"condition": "RU", "grid": [{"rates": "balance"}]}],
            "folds": 3,
            "repeats": 1,
        })
        .to_string(),
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = imbreg(&[
        "bench",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "runs.json",
        "wins.csv",
        "ranks.csv",
        "sizes.csv",
        "failures.csv",
        "timings.csv",
    ] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    assert_eq!(read_json(&out.join("runs.json")).as_array().unwrap().len(), 6);
}
