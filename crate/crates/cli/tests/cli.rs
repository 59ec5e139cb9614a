use std::process::{Command, Output};

fn symwit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symwit")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = symwit(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn error_kind(out: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(v["message"].is_string());
    v["error"].as_str().unwrap().to_owned()
}

#[test]
fn tolerance_of_catalog_witness() {
    assert_eq!(stdout(&["tolerance", "--witness", "WP_D63"]).trim(), "0.4063");
    assert_eq!(stdout(&["witness", "tolerance", "--witness", "WP_D63"]).trim(), "0.4063");
}

#[test]
fn settings_bound() {
    assert_eq!(stdout(&["settings-bound", "--n", "6"]).trim(), "N=6 L=188 L′=145");
    let v: serde_json::Value = serde_json::from_str(&stdout(&["--format", "json", "settings-bound", "--n", "4"])).unwrap();
    assert_eq!(v["L"], 64);
    assert_eq!(v["L_prime"], 49);
}

#[test]
fn fidelity_curve_bound_is_below_fidelity() {
    let csv = stdout(&["fidelity-curve", "--witness", "WP3_D42", "--grid", "11"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p,fidelity,witness_value,bound"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 11);
    for r in rows {
        assert!(r[3] <= r[1] + 1e-9, "{r:?}");
    }
}

#[test]
fn unknown_witness_is_an_input_error() {
    let out = symwit(&["tolerance", "--witness", "NOPE"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "input");
}

#[test]
fn unsupported_format_is_a_usage_error() {
    let out = symwit(&["--format", "csv", "witness", "show", "WP_D63"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "usage");
    let out = symwit(&["dicke", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "usage");
}

#[test]
fn simulate_then_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("counts.ndjson");
    let data = data.to_str().unwrap();
    let args = ["--seed", "3", "simulate", "--witness", "WP3_D42", "--p", "0.1", "--shots", "20000", "--out", data];
    assert!(symwit(&args).status.success());
    let first = std::fs::read(data).unwrap();
    assert!(symwit(&args).status.success());
    assert_eq!(std::fs::read(data).unwrap(), first);

    let json = stdout(&["--seed", "1", "--format", "json", "eval-counts", "--witness", "WP3_D42", "--data", data]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let exact: f64 = stdout(&["--format", "json", "witness", "eval", "WP3_D42", "--p", "0.1"]).trim().parse::<serde_json::Value>().unwrap()["value"]
        .as_f64()
        .unwrap();
    let value = v["witness_value"].as_f64().unwrap();
    let se = v["standard_error"].as_f64().unwrap();
    assert!(se > 0.0);
    assert!((value - exact).abs() < 5.0 * se, "{value} vs {exact} ± {se}");
}

#[test]
fn config_file_sets_the_sign_map() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("counts.ndjson");
    let data = data.to_str().unwrap();
    assert!(symwit(&["simulate", "--witness", "WP3_D42", "--shots", "5000", "--out", data]).status.success());
    let config = dir.path().join("run.conf");
    std::fs::write(&config, "# flip the first qubit\nsign_map = -+++\nbootstrap_resamples = 200\n").unwrap();
    let config = config.to_str().unwrap();
    let eval = ["--format", "json", "eval-counts", "--witness", "WP3_D42", "--data", data];
    let plain = stdout(&eval);
    let from_config = stdout(&[&["--config", config][..], &eval[..]].concat());
    let from_flag = stdout(&[&eval[..], &["--sign-map", "-+++"][..]].concat());
    let value = |s: &str| serde_json::from_str::<serde_json::Value>(s).unwrap()["witness_value"].as_f64().unwrap();
    assert_eq!(value(&from_config), value(&from_flag));
    assert_ne!(value(&from_config), value(&plain));

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "unknown_key = 1\n").unwrap();
    let out = symwit(&["--config", bad.to_str().unwrap(), "settings-bound", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "usage");
}

#[test]
fn outputs_are_byte_stable() {
    for args in [
        &["--format", "json", "compile", "--witness", "WP3_D63"][..],
        &["--format", "csv", "q-scan", "--n", "4", "--m", "1", "--q-step", "1"][..],
        &["--format", "json", "witness", "show", "WI3_D41"][..],
    ] {
        assert_eq!(symwit(args).stdout, symwit(args).stdout);
    }
}
