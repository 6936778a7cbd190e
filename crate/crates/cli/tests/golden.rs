//! Byte comparison of every fixture against `tests/golden`. Set
//! `UPDATE_GOLDEN=1` to rewrite the files.

mod common;

use common::{canonical, golden_dir, run_cli, SUITE};

#[test]
fn outputs_match_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatched = Vec::new();
    for case in SUITE {
        let (code, out, err) = run_cli(case.args);
        assert_eq!(code, case.exit, "{}: {err}", case.name);
        let got = canonical(&out);
        let path = golden_dir().join(format!("{}.golden", case.name));
        if update {
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
        if got != want {
            mismatched.push(case.name);
        }
    }
    assert!(mismatched.is_empty(), "golden mismatch: {mismatched:?}");
}

#[test]
fn fixtures_carry_the_expected_values() {
    let json = |args: &[&str]| -> serde_json::Value { serde_json::from_str(&run_cli(args).1).unwrap() };
    let d = json(&["dims", "--n", "8"]);
    assert_eq!(d["payload"]["equation_dimension"], 12877);
    assert_eq!(d["payload"]["symbol_dimension"], 6434);
    assert_eq!(d["payload"]["whitney"], true);

    let b = json(&["bordism", "--preset", "torus2", "--p", "1"]);
    assert_eq!(b["payload"]["group"], "Z2^2");
    let b = json(&["bordism", "--preset", "r8", "--p", "7", "--hypothesis", "homotopy-sphere-full"]);
    assert_eq!(b["payload"]["group"], "Z2^0");
    assert_eq!(b["payload"]["unconstrained_group"], "Z2^1");
    assert_eq!(b["payload"]["classification"]["zero_crystal"], true);
    assert_eq!(b["payload"]["attractor"], "singular-global-attractor");

    let s = json(&["stability-report", "--samples", "8", "--quadrature", "32"]);
    assert_eq!(s["payload"]["tau0"], "inf");
    assert_eq!(s["payload"]["verdict"], "average-unstable");

    let v = json(&["verify-solution", "--field", "exp(x*y)", "--n", "2", "--count", "5"]);
    assert_eq!(v["verdict"], "fail");
    assert_eq!(v["payload"]["points_passed"], 0);
}

#[test]
fn characteristics_csv_ends_on_the_exact_flow() {
    let (_, out, _) = run_cli(&["characteristics", "--alpha", "1"]);
    let mut rd = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rd.headers().unwrap(), vec!["t", "x", "y", "u"]);
    let last = rd.records().last().unwrap().unwrap();
    let y: f64 = last[2].parse().unwrap();
    assert!((y - (1f64.exp() - 1.0)).abs() < 1e-8);
}

#[test]
fn brieskorn_csv_has_ten_real_columns() {
    let (_, out, _) = run_cli(&["brieskorn-sample", "--kappa", "5", "--count", "4"]);
    let mut rd = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rd.headers().unwrap().len(), 13);
    for r in rd.records() {
        let r = r.unwrap();
        assert!(r[10].parse::<f64>().unwrap() < 1e-10);
        assert_eq!(&r[12], "3");
    }
}
