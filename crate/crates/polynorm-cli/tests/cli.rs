//! End-to-end tests that drive the installed binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polynorm-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polynorm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn construct_is_deterministic_and_writes_sidecar() {
    let dir = workdir("construct");
    let a = dir.join("a.poly");
    let b = dir.join("b.poly");
    for path in [&a, &b] {
        let out = run(&[
            "construct",
            "--kind",
            "unimodular",
            "--m",
            "2",
            "--n",
            "4",
            "--seed",
            "7",
            "--rounds",
            "1",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b);
    assert!(dir.join("a.poly.meta").exists());
    let meta = std::fs::read_to_string(dir.join("a.poly.meta")).unwrap();
    assert!(meta.contains("created_unix"));
}

#[test]
fn norms_exact_spread_and_error_paths() {
    let dir = workdir("norms");
    let poly = dir.join("spread.poly");
    let out = run(&[
        "construct",
        "--kind",
        "spread",
        "--m",
        "2",
        "--n",
        "4",
        "--out",
        poly.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = run(&["norms", "--poly", poly.to_str().unwrap(), "--p", "2", "--r", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("supnorm_lower 0.5"), "{text}");
    assert!(text.contains("supnorm_upper 0.5"), "{text}");
    assert!(text.contains("exact-spread"), "{text}");

    // Zero polynomial: all norms zero, exit 0.
    let zero = dir.join("zero.poly");
    std::fs::write(&zero, "2 3\n").unwrap();
    let out = run(&["norms", "--poly", zero.to_str().unwrap(), "--p", "2", "--r", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("coeff_norm 0"));

    // Bad header: exit 2 with the line number.
    let bad = dir.join("bad.poly");
    std::fs::write(&bad, "2\n1 1 1 0\n").unwrap();
    let out = run(&["norms", "--poly", bad.to_str().unwrap(), "--p", "2", "--r", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));
}

#[test]
fn fit_passes_and_gates() {
    let dir = workdir("fit");
    let csv = dir.join("synthetic.csv");
    let mut text = String::from("kind,m,n,p,r,family,certified_lower,empirical,upper_cert,seed,status\n");
    for n in [4u32, 8, 16, 32] {
        text.push_str(&format!("A,2,{n},2,1,spread,1,{},10,0,ok\n", n * n));
    }
    std::fs::write(&csv, text).unwrap();

    let out = run(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--predicted",
        "2",
        "--tol",
        "0.01",
        "--gate",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!((v["slope"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(v["status"], "pass");

    let out = run(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--predicted",
        "1",
        "--tol",
        "0.1",
        "--gate",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // Without --gate a failed prediction still exits 0.
    let out = run(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--predicted",
        "1",
        "--tol",
        "0.1",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["status"], "fail");
}

#[test]
fn sweep_to_fit_pipeline_region_b() {
    let dir = workdir("pipeline");
    let csv = dir.join("sweep.csv");
    let out = run(&[
        "sweep",
        "--kind",
        "A",
        "--m",
        "2",
        "--p",
        "3",
        "--r",
        "1",
        "--family",
        "spread",
        "--n-list",
        "6,12,24,48",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = run(&[
        "fit",
        "--input",
        csv.to_str().unwrap(),
        "--predicted",
        "0.666667",
        "--tol",
        "0.05",
        "--gate",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    // Byte-identical rerun of the same sweep.
    let csv2 = dir.join("sweep2.csv");
    let out = run(&[
        "sweep",
        "--kind",
        "A",
        "--m",
        "2",
        "--p",
        "3",
        "--r",
        "1",
        "--family",
        "spread",
        "--n-list",
        "6,12,24,48",
        "--out",
        csv2.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&csv2).unwrap());
}

#[test]
fn chi_sweep_emits_parseable_jsonl() {
    let out = run(&[
        "sweep",
        "--kind",
        "chi",
        "--m",
        "2",
        "--p",
        "2",
        "--q",
        "2",
        "--n-list",
        "3,6",
        "--trials",
        "1",
        "--starts",
        "8",
        "--max-iters",
        "100",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["chi_lower"].as_f64().unwrap() > 0.0);
        assert!(v["chi_lower"].as_f64().unwrap() <= v["bridge_upper"].as_f64().unwrap());
        assert_eq!(v["status"], "exact");
    }
}

#[test]
fn regions_grid_has_expected_shape() {
    let out = run(&["regions", "--kind", "A", "--m", "2", "--grid", "21"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 21 * 21);
    assert_eq!(lines[0], "m,inv_p,inv_r,labels,exponent,status");
    // Degree 2 is fully classified: no UNKNOWN label anywhere.
    assert!(!text.contains("UNKNOWN"));

    let out = run(&["regions", "--kind", "chi", "--m", "3", "--grid", "11"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1 + 11 * 11);
}

#[test]
fn vn_nilpotent_certified_ratio_bounded() {
    let out = run(&[
        "vn",
        "--family",
        "nilpotent",
        "--m",
        "2",
        "--n-list",
        "2,4",
        "--p",
        "2",
        "--q",
        "2",
        "--poly-family",
        "unimodular",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut rows = text.lines();
    assert_eq!(
        rows.next().unwrap(),
        "family,m,n,d,p,q,ratio_certified,ratio_empirical,Ip_value"
    );
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        let certified: f64 = fields[6].parse().unwrap();
        let ip: f64 = fields[8].parse().unwrap();
        assert!(certified <= 1.0 + 1e-9);
        assert!(ip <= 1.0 + 1e-9);
    }
}

#[test]
fn bayart_gate_passes_on_clean_draws() {
    let out = run(&[
        "bayart",
        "--m",
        "2",
        "--n",
        "3",
        "--count",
        "2",
        "--samples",
        "5000",
        "--gate",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    for line in stdout(&out).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["pass"], true);
    }
}

#[test]
fn config_file_supplies_and_rejects_keys() {
    let dir = workdir("config");
    let cfg = dir.join("exp.cfg");
    std::fs::write(
        &cfg,
        "seed = 3\n[estimate]\nkind = A\nm = 2\nn = 4\np = 2\nr = 1\nfamily = spread\n",
    )
    .unwrap();
    let out = run(&["estimate", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("A,2,4,2,1,spread"), "{text}");
    assert!(text.contains(",3,ok"), "seed from config: {text}");

    // Flags override config: n comes from the flag.
    let out = run(&["estimate", "--config", cfg.to_str().unwrap(), "--n", "6"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("A,2,6,2,1,spread"));

    // Unknown keys are rejected up front.
    std::fs::write(&cfg, "[estimate]\nkind = A\nm = 2\nn = 4\np = 2\nr = 1\nbogus = 1\n").unwrap();
    let out = run(&["estimate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus"), "{}", stderr(&out));
}

#[test]
fn capacity_cap_env_and_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_polynorm"))
        .args(["construct", "--kind", "ones", "--m", "3", "--n", "50", "--out", "/dev/null"])
        .env("POLYNORM_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("capacity"), "{}", stderr(&out));

    // Flag overrides the environment.
    let dir = workdir("cap");
    let path = dir.join("ones.poly");
    let out = Command::new(env!("CARGO_BIN_EXE_polynorm"))
        .args([
            "construct",
            "--kind",
            "ones",
            "--m",
            "2",
            "--n",
            "6",
            "--cap",
            "1000",
            "--out",
            path.to_str().unwrap(),
        ])
        .env("POLYNORM_CAP", "3")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn estimate_b_consistency_row() {
    let out = run(&[
        "estimate", "--kind", "B", "--m", "2", "--n", "4", "--p", "2", "--r", "2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    let certified: f64 = fields[6].parse().unwrap();
    let upper: f64 = fields[8].parse().unwrap();
    assert!(certified <= 1.0 + 1e-9); // r ≤ p' keeps B at 1
    assert_eq!(upper, 1.0);
}
