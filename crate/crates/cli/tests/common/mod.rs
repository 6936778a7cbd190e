#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

/// One CLI invocation with a fixed expected exit status.
pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

pub const SUITE: &[Case] = &[
    Case { name: "dims_8", args: &["dims", "--n", "8"], exit: 0 },
    Case { name: "bordism_torus2", args: &["bordism", "--preset", "torus2", "--p", "1"], exit: 0 },
    Case { name: "bordism_rp3", args: &["bordism", "--preset", "rp3", "--p", "2"], exit: 0 },
    Case { name: "bordism_r2", args: &["bordism", "--preset", "r2", "--p", "1"], exit: 0 },
    Case {
        name: "bordism_r8_full",
        args: &["bordism", "--preset", "r8", "--p", "7", "--hypothesis", "homotopy-sphere-full"],
        exit: 0,
    },
    Case {
        name: "verify_product",
        args: &["verify-solution", "--field", "exp(x)*(2+sin(y))", "--n", "2", "--count", "8", "--seed", "3"],
        exit: 0,
    },
    Case {
        name: "verify_exy",
        args: &["verify-solution", "--field", "exp(x*y)", "--n", "2", "--points", "0.2,0.3;-0.5,0.7"],
        exit: 1,
    },
    Case { name: "characteristics_csv", args: &["characteristics", "--alpha", "1", "--dt", "0.05"], exit: 0 },
    Case {
        name: "characteristics_summary",
        args: &["characteristics", "--alpha", "1", "--format", "json"],
        exit: 0,
    },
    Case {
        name: "stability_unit_base",
        args: &["stability-report", "--s", "1", "--r", "0", "--samples", "8", "--quadrature", "32"],
        exit: 0,
    },
    Case {
        name: "conservation_separable",
        args: &[
            "conservation-check",
            "--form",
            r#"{"n": 2, "components": ["y*I_0_1 + I_0_2^2", "x*I_1_0 - I_2_0"]}"#,
            "--solution",
            r#"{"f": "(2+sin(x))*exp(y^2)", "count": 6, "loop": [0, 0, 1, 1]}"#,
        ],
        exit: 0,
    },
    Case {
        name: "conservation_control",
        args: &[
            "conservation-check",
            "--form",
            r#"{"n": 2, "components": ["I_0_0", "0"]}"#,
            "--solution",
            r#"{"f": "exp(x*y)", "count": 4}"#,
        ],
        exit: 1,
    },
    Case { name: "brieskorn_k1", args: &["brieskorn-sample", "--kappa", "1", "--count", "6", "--seed", "7"], exit: 0 },
    Case {
        name: "brieskorn_k28",
        args: &["brieskorn-sample", "--kappa", "28", "--count", "6", "--format", "json"],
        exit: 0,
    },
];

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_dalembert"))
}

/// Runs the binary with no config file in the environment.
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(bin())
        .args(args)
        .env_remove("DALEMBERT_CONFIG")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

/// JSON reports lose their timestamp; CSV passes through.
pub fn canonical(text: &str) -> String {
    match serde_json::from_str::<serde_json::Value>(text) {
        Ok(mut v) => {
            if let Some(o) = v.as_object_mut() {
                o.remove("timestamp");
            }
            serde_json::to_string_pretty(&v).expect("value serializes") + "\n"
        }
        Err(_) => text.to_string(),
    }
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Runs every case; returns `(name, canonical output)` or the first mismatch in exit status.
pub fn run_suite() -> Result<Vec<(&'static str, String)>, String> {
    SUITE
        .iter()
        .map(|c| {
            let (code, out, err) = run_cli(c.args);
            if code != c.exit {
                return Err(format!("{}: exit {code}, expected {} ({err})", c.name, c.exit));
            }
            Ok((c.name, canonical(&out)))
        })
        .collect()
}
