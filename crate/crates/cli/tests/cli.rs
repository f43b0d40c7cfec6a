use std::process::{Command, Output};

fn kramers(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kramers"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header names and numeric rows of a CSV with `#` comment lines.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|f| f.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn moments_both_routes_match_published_values() {
    let text = stdout(&kramers(&["moments", "--order", "6", "--route", "both"]));
    let (header, rows) = parse_csv(&text);
    assert_eq!(header[0], "n");
    assert_eq!(rows.len(), 6);
    let v = |n: usize| rows[n - 1][1];
    assert!((v(1) - 0.582).abs() < 1e-3);
    assert!((v(2) - 3.0 / 14.0).abs() < 1e-8);
    assert!((v(3) - 0.115).abs() < 1e-3);
    assert!((v(4) - 43.0 / 588.0).abs() < 1e-8);
    assert!((v(5) - 0.051).abs() < 1e-3);
    assert!((v(6) - 857.0 / 22638.0).abs() < 1e-8);
    for (i, name) in header.iter().enumerate() {
        if name.ends_with("_difference") {
            assert!(rows.iter().all(|r| r[i].abs() < 1e-6), "{name}");
        }
    }
}

#[test]
fn single_route_has_four_columns() {
    let (header, rows) = parse_csv(&stdout(&kramers(&["moments", "--order", "3", "--route", "integral"])));
    assert_eq!(header, ["n", "v", "x", "x_star"]);
    assert!((rows[0][2] - 1.0).abs() < 1e-8);
}

#[test]
fn every_column_has_a_formula_line() {
    for cmd in [
        ["dispersion-table", "--points", "5"],
        ["xfunction-table", "--points", "5"],
    ] {
        let text = stdout(&kramers(&cmd));
        let (header, rows) = parse_csv(&text);
        assert_eq!(rows.len(), 5);
        for name in &header {
            assert!(text.lines().any(|l| l.starts_with(&format!("# {name}: "))), "{name}");
        }
    }
}

#[test]
fn dispersion_table_columns() {
    let (header, rows) = parse_csv(&stdout(&kramers(&["dispersion-table", "--points", "9"])));
    assert_eq!(header, ["mu", "lambda", "im_part", "theta", "zeta"]);
    let centre = &rows[4];
    assert_eq!(centre[0], 0.0);
    assert_eq!(centre[1], 1.0);
    assert!(rows
        .iter()
        .filter(|r| r[0] > 0.0)
        .all(|r| r[4] > -std::f64::consts::PI && r[4] < 0.0));
}

#[test]
fn kv_table_decreases_between_the_asymptotes() {
    let text = stdout(&kramers(&[
        "kv-table",
        "--alpha-min",
        "-10",
        "--alpha-max",
        "40",
        "--steps",
        "51",
    ]));
    let (header, rows) = parse_csv(&text);
    assert_eq!(rows.len(), 51);
    let kv = header.iter().position(|h| h == "kv").unwrap();
    let slip = header.iter().position(|h| h == "kv_classical_slip").unwrap();
    let wall = header.iter().position(|h| h == "kv_classical_wall").unwrap();
    assert!(rows.windows(2).all(|w| w[1][kv] < w[0][kv]));
    assert!((rows[0][kv] / rows[0][slip] - 1.0).abs() < 1e-4);
    assert!((rows[0][wall] - 0.83853).abs() < 1e-5);
    let last = &rows[50];
    let degenerate = rows[0][slip] / std::f64::consts::PI.sqrt() * (8.0 / 3.0) / 40f64.sqrt();
    assert!((last[kv] / degenerate - 1.0).abs() < 0.02);
}

#[test]
fn fermi_table_identities() {
    let (_, rows) = parse_csv(&stdout(&kramers(&[
        "fermi-table",
        "--alpha-min",
        "-5",
        "--alpha-max",
        "5",
        "--steps",
        "11",
    ])));
    for r in rows {
        assert!((r[4] / (2.0 * r[2]) - 1.0).abs() < 1e-9);
        assert!((r[3] / (0.75 * r[1]) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn profile_starts_at_wall_velocity_and_defect_decays() {
    let (_, rows) = parse_csv(&stdout(&kramers(&["profile", "--xmax", "5", "--points", "11"])));
    assert!((rows[0][1] - 0.2f64.sqrt()).abs() < 5e-4);
    assert!(rows.windows(2).all(|w| w[1][2].abs() < w[0][2].abs()));
}

#[test]
fn distribution_at_the_wall() {
    let (_, rows) = parse_csv(&stdout(&kramers(&["distribution", "--x", "0", "--points", "20"])));
    assert_eq!(rows.len(), 20);
    let scale = rows.iter().map(|r| r[1].abs()).fold(0.0, f64::max);
    assert!(rows.iter().filter(|r| r[0] > 0.0).all(|r| r[1].abs() < 1e-7 * scale));
    assert!(rows.iter().filter(|r| r[0] < 0.0).all(|r| r[1] > 0.0));
}

#[test]
fn json_table_format() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&kramers(&[
        "dispersion-table",
        "--points",
        "3",
        "--format",
        "json",
    ])))
    .unwrap();
    assert_eq!(v["columns"].as_array().unwrap().len(), 5);
    assert_eq!(v["rows"][1][1], 1.0);
}

#[test]
fn precision_controls_digits() {
    let text = stdout(&kramers(&["dispersion-table", "--points", "1", "--precision", "4"]));
    let (_, rows) = parse_csv(&text);
    assert_eq!(rows[0][0], 0.0);
    let text = stdout(&kramers(&["dispersion-table", "--points", "2", "--precision", "4"]));
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("3.333e-1,"), "{last}");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = kramers(&["dispersion-table", "--points", "4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let (_, rows) = parse_csv(&std::fs::read_to_string(path).unwrap());
    assert_eq!(rows.len(), 4);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = ["profile", "--xmax", "3", "--points", "31"];
    let one = stdout(&kramers(&[&args[..], &["--threads", "1"]].concat()));
    let many = stdout(&kramers(&[&args[..], &["--threads", "8"]].concat()));
    let again = stdout(&kramers(&[&args[..], &["--threads", "8"]].concat()));
    assert_eq!(one, many);
    assert_eq!(many, again);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["moments", "--order", "0"][..],
        &["profile", "--precision", "3"],
        &["profile", "--precision", "18"],
        &["no-such-command"],
        &["oracle", "--ordinates", "5"],
        &["kv-table", "--steps", "0"],
        &["profile", "--rel-tol", "-1"],
    ] {
        let out = kramers(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = kramers(&["profile", "--precision", "3"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--precision"));
}

#[test]
fn oracle_report_is_json() {
    let out = kramers(&["oracle", "--ordinates", "16", "--cells", "400", "--xmax", "15"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["slip"]["oracle"].as_f64().unwrap() - 0.582).abs() < 2e-3);
    assert!((v["wall_velocity"]["oracle"].as_f64().unwrap() - 0.4472).abs() < 4e-3);
    assert!(v["profile_comparison"]["max_relative_deviation"].as_f64().unwrap() < 5e-3);
}

#[test]
fn verify_passes_and_is_deterministic() {
    let first = kramers(&["verify", "--threads", "1"]);
    assert_eq!(first.status.code(), Some(0));
    let second = kramers(&["verify", "--threads", "8"]);
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("V2 = 3/14"));
    assert!(text.trim_end().ends_with("0 failed"));
}

#[test]
fn tolerance_flags_are_applied() {
    let args = ["profile", "--xmax", "2", "--points", "3"];
    let (_, default) = parse_csv(&stdout(&kramers(&args)));
    let (_, loose) = parse_csv(&stdout(&kramers(
        &[&args[..], &["--rel-tol", "1e-6", "--abs-tol", "1e-8"]].concat(),
    )));
    for (a, b) in default.iter().zip(&loose) {
        assert!((a[1] - b[1]).abs() < 1e-5);
    }
}
