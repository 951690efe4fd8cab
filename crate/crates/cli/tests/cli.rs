//! End-to-end checks of the `toe` binary: output formats, exit codes, and
//! byte-stable reference tables.

use std::process::{Command, Output};

fn toe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn toe_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toe"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn prob_prints_exact_and_float() {
    let out = toe(&["prob", "--N", "4", "--L", "4", "--L", "4", "--L", "4", "--k", "0"]);
    assert!(out.status.success());
    let s = stdout(&out);
    assert!(
        s.starts_with("1431169011017974588501/19078916984518815703125"),
        "{s}"
    );
    assert!(s.contains("0.07501"), "{s}");
}

#[test]
fn m_shorthand_expands() {
    let a = toe(&["prob", "--N", "4", "--L", "4", "--m", "3", "--k", "0"]);
    let b = toe(&["prob", "--N", "4", "--L", "4", "--L", "4", "--L", "4", "--k", "0"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn genfunc_json_coefficients() {
    let out = toe(&["genfunc", "--N", "2", "--L", "4", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["N"], 2);
    assert_eq!(v["Ls"], serde_json::json!([4]));
    assert_eq!(v["coeffs"]["0"], "11/35");
    assert_eq!(v["coeffs"]["2"], "24/35");
}

#[test]
fn parity_violation_exits_2() {
    let out = toe(&["prob", "--N", "2", "--L", "4", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("parity"), "{err}");
}

#[test]
fn unsupported_exact_exits_3_and_numeric_works() {
    let out = toe(&["prob", "--N", "2", "--L", "3", "--L", "4", "--k", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("--numeric"), "{err}");

    // the numeric route handles the same request
    let out = toe(&[
        "prob", "--N", "2", "--L", "3", "--L", "4", "--k", "2", "--numeric",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!(v > 0.5 && v < 1.0, "{v}");
}

#[test]
fn numeric_route_matches_exact_route() {
    let exact = toe(&["prob", "--N", "3", "--L", "4", "--k", "3"]);
    let exact_val: f64 = stdout(&exact)
        .split('\u{2248}')
        .nth(1)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    let numeric = toe(&["prob", "--N", "3", "--L", "4", "--k", "3", "--numeric"]);
    let numeric_val: f64 = stdout(&numeric).trim().parse().unwrap();
    assert!(
        (exact_val - numeric_val).abs() < 1e-7,
        "{exact_val} vs {numeric_val}"
    );
}

#[test]
fn expect_reports_cross_checks() {
    let out = toe(&["expect", "--N", "4", "--L", "4"]);
    assert!(out.status.success());
    let s = stdout(&out);
    assert!(s.starts_with("688/385"), "{s}");
    assert!(s.contains("agrees exactly"), "{s}");
}

#[test]
fn table_is_byte_stable_and_correct() {
    let a = toe(&["table"]);
    let b = toe(&["table"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let s = stdout(&a);
    assert!(s.contains("2 0 11/35 30641/128625 29654713/157565625"), "{s}");
    assert!(s.contains("2 48/35 195968/128625 255821824/157565625"), "{s}");
    assert!(s.contains("4 688/385"), "{s}");
}

#[test]
fn density_csv_shape() {
    let out = toe(&["density", "--N", "4", "--L", "4", "--grid", "11"]);
    assert!(out.status.success());
    let s = stdout(&out);
    let lines: Vec<&str> = s.trim().lines().collect();
    assert_eq!(lines[0], "x,rho_real");
    assert_eq!(lines.len(), 12);
}

#[test]
fn asym_law_csv() {
    let out = toe(&["asym", "--law", "conj2", "--alpha", "0.5", "--m", "2", "--N", "100"]);
    assert!(out.status.success());
    let s = stdout(&out);
    assert!(s.starts_with("law,x,value"), "{s}");
    assert!(s.contains("9.945"), "{s}");
    let bad = toe(&["asym", "--law", "nonsense"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn mc_outputs_are_deterministic_across_worker_counts() {
    let dir1 = std::env::temp_dir().join("toe_mc_w1");
    let dir2 = std::env::temp_dir().join("toe_mc_w2");
    for (dir, workers) in [(&dir1, "1"), (&dir2, "2")] {
        let _ = std::fs::remove_dir_all(dir);
        let out = toe_env(
            &[
                "mc",
                "--N",
                "4",
                "--L",
                "4",
                "--reps",
                "200",
                "--seed",
                "5",
                "--bins",
                "20",
                "--out",
                dir.to_str().unwrap(),
            ],
            "TOE_WORKERS",
            workers,
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["counts.csv", "reals_hist.csv", "modulus_hist.csv", "scatter.csv"] {
        let a = std::fs::read(dir1.join(file)).unwrap();
        let b = std::fs::read(dir2.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs across worker counts");
    }
    // summary differs only in the timing field
    let mut a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir1.join("summary.json")).unwrap()).unwrap();
    let mut b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir2.join("summary.json")).unwrap()).unwrap();
    a.as_object_mut().unwrap().remove("timing_seconds");
    b.as_object_mut().unwrap().remove("timing_seconds");
    assert_eq!(a, b);
}

#[test]
fn selfcheck_passes() {
    let out = toe(&["selfcheck"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(stdout(&out).contains("all checks passed"));
}
