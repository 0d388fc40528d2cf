//! The binary end to end: exit codes, table shape, determinism, config layering.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dirac-gaps"));
    c.env_remove("DIRAC_GAPS_PRECISION").env_remove("DIRAC_GAPS_REL_TOL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(Result::unwrap).collect()
}

#[test]
fn walks_listing_examples() {
    let o = run(&["walks", "--n", "3", "--r", "1", "--kind", "X"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("steps (2,2,-2,2,2)"), "{s}");
    assert!(s.contains("1 walk "), "{s}");

    let s = stdout(&run(&["walks", "--n", "4", "--r", "0", "--kind", "X"]));
    assert!(s.contains("0 walks"), "{s}");

    let s = stdout(&run(&["walks", "--n", "5", "--nu", "1", "--kind", "W"]));
    assert!(s.contains("2 walks"), "{s}");
    assert!(s.contains("steps (2,-2)") && s.contains("steps (-2,2)"), "{s}");
}

#[test]
fn walks_sum_is_the_crossing_term() {
    // sigma_0^+(3, 0) for (1,2,3,4) is A B^2 / 16 = 2
    let s = stdout(&run(&["walks", "--n", "3", "--r", "0", "--kind", "X", "--pot", "1,2,3,4"]));
    assert!(s.contains("sum 2.0000000000000000000e0 0.0000000000000000000e0i"), "{s}");
}

#[test]
fn walks_past_cap_is_an_argument_error() {
    let o = run(&["walks", "--n", "31", "--r", "3", "--kind", "X"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn even_matrix_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    let o = run(&["gaps", "--pot", "1,2,3,4", "--n", "4:4", "--method", "matrix", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 1);
    let gamma_abs: f64 = rows[0][9].parse().unwrap();
    assert!(gamma_abs < 1e-25);
    assert_eq!(&rows[0][14], "ok");
}

#[test]
fn odd_and_even_rows_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = run(&["gaps", "--pot", "1,1,1,1", "--n", "3:9", "--method", "both", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let header = std::fs::read_to_string(&out).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, dirac_gaps_cli::table::HEADER.join(","));
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 14);
    for r in &rows {
        let n: i64 = r[0].parse().unwrap();
        let gamma_abs: f64 = r[9].parse().unwrap();
        if n % 2 == 0 {
            assert!(gamma_abs < 1e-30, "n={n}");
            assert!(r[11].is_empty());
        } else {
            assert!(gamma_abs > 1e-9, "n={n}");
            let ratio: f64 = r[11].parse().unwrap();
            assert!((ratio - 1.0).abs() < 0.5, "n={n} ratio {ratio}");
        }
        // 30 significant digits by default
        assert_eq!(r[3].split('e').next().unwrap().replace(['-', '.'], "").len(), 30);
    }
}

#[test]
fn zero_coefficient_asym_is_an_argument_error() {
    let o = run(&["gaps", "--pot", "1,1,1,0", "--method", "asym", "--n", "5:5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("is zero"));
}

#[test]
fn bad_arguments_exit_two() {
    for args in [
        &["gaps", "--pot", "1,1,1"][..],
        &["gaps", "--pot", "1,1,1,1 + 2i"],
        &["gaps", "--n", "-2:2"],
        &["gaps", "--method", "newton"],
        &["gaps", "--precision", "16"],
        &["walks", "--n", "3", "--kind", "Z"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn non_convergence_exits_three_with_status_row() {
    let o = run(&["gaps", "--pot", "1,2,3,4", "--n", "5:5", "--method", "series", "--digits", "6"]);
    assert_eq!(o.status.code(), Some(3));
    let s = stdout(&o);
    let row = s.lines().nth(1).unwrap();
    assert!(row.starts_with("5,series,256,"));
    assert!(row.contains("error: root iteration"), "{row}");
}

#[test]
fn identical_inputs_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("d{k}.json"));
        let o = run(&["gaps", "--pot", "1.5-0.5i,1,i,2", "--n", "9:10", "--method", "both", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        bytes.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    let v: serde_json::Value = serde_json::from_slice(&bytes[0]).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["n"], 9);
    assert_eq!(rows[1]["method"], "matrix");
}

#[test]
fn precision_layering() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"potential": "1,2,3,4", "n_range": "11:11", "precision_bits": 192, "digits": 12}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let bits_of = |o: Output| -> String {
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o).lines().nth(1).unwrap().split(',').nth(2).unwrap().to_string()
    };
    assert_eq!(bits_of(run(&["gaps", "--config", cfg])), "192");
    let env = bin().args(["gaps", "--config", cfg]).env("DIRAC_GAPS_PRECISION", "160").output().unwrap();
    assert_eq!(bits_of(env), "160");
    let flag = bin()
        .args(["gaps", "--config", cfg, "--precision", "128"])
        .env("DIRAC_GAPS_PRECISION", "160")
        .output()
        .unwrap();
    assert_eq!(bits_of(flag), "128");
}

#[test]
fn asym_rows_center_on_prediction() {
    let s = stdout(&run(&["gaps", "--pot", "1,2,3,4", "--n", "5:5", "--method", "asym", "--digits", "10"]));
    let row: Vec<&str> = s.lines().nth(1).unwrap().split(',').collect();
    let lm: f64 = row[3].parse().unwrap();
    let lp: f64 = row[5].parse().unwrap();
    assert!(((lm + lp) / 2.0 - 5.96).abs() < 1e-9);
    assert_eq!(row[9], row[10]);
}

#[test]
fn quick_verify_passes() {
    let o = run(&["verify", "--quick"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().filter(|l| l.starts_with("PASS")).count(), 3, "{s}");
}
