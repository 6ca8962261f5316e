//! Golden tests: every example script parses, runs with a fixed seed, and
//! produces byte-identical JSON; exit codes follow the 0/1/2/3 contract;
//! printing a parsed script and reparsing it gives the same script.
//!
//! Regenerate the golden files with `UPDATE_GOLDEN=1 cargo test -p sol-cli`.

use std::path::{Path, PathBuf};
use std::process::Command;

struct Case {
    script: &'static str,
    args: &'static [&'static str],
    exit: i32,
}

const CASES: &[Case] = &[
    Case { script: "01_symbolic_state.sol", args: &[], exit: 0 },
    Case { script: "02_rotations.sol", args: &[], exit: 0 },
    Case { script: "03_teleportation.sol", args: &[], exit: 0 },
    Case {
        script: "04_address_arithmetic.sol",
        args: &["--int-range", "-20..40"],
        exit: 0,
    },
    Case { script: "05_bloch.sol", args: &[], exit: 0 },
    // Sampling can only gather evidence for the no-cloning formula.
    Case { script: "06_no_cloning.sol", args: &["--samples", "8"], exit: 2 },
    Case { script: "07_ghz.sol", args: &["--int-range", "0..10"], exit: 0 },
    Case { script: "08_qft.sol", args: &[], exit: 0 },
    Case { script: "09_projection.sol", args: &[], exit: 0 },
    Case { script: "10_axioms.sol", args: &["--samples", "6"], exit: 2 },
    Case { script: "11_norm_trace.sol", args: &[], exit: 0 },
    // A sampled counterexample genuinely refutes the quantified claim.
    Case { script: "12_refutation.sol", args: &[], exit: 1 },
];

fn scripts_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scripts")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run_case(case: &Case) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_sol"))
        .arg("run")
        .arg(scripts_dir().join(case.script))
        .args(case.args)
        .arg("--json")
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).expect("utf-8 report");
    (stdout, out.status.code().unwrap_or(-1))
}

#[test]
fn golden_reports_are_byte_stable() {
    let update = std::env::var("UPDATE_GOLDEN").is_ok();
    for case in CASES {
        let (stdout, code) = run_case(case);
        assert_eq!(
            code, case.exit,
            "{}: expected exit {}, got {code}\n{stdout}",
            case.script, case.exit
        );
        let golden_path = golden_dir().join(case.script.replace(".sol", ".json"));
        if update {
            std::fs::write(&golden_path, &stdout).expect("write golden");
            continue;
        }
        let golden = std::fs::read_to_string(&golden_path)
            .unwrap_or_else(|_| panic!("missing golden file {golden_path:?}"));
        assert_eq!(
            stdout, golden,
            "{}: report deviates from the golden file",
            case.script
        );
    }
}

#[test]
fn reports_are_deterministic_across_runs() {
    // Two fresh processes with the same seed must agree byte for byte;
    // sampling-heavy scripts are the interesting cases.
    for case in CASES.iter().filter(|c| {
        matches!(
            c.script,
            "03_teleportation.sol" | "06_no_cloning.sol" | "07_ghz.sol"
        )
    }) {
        let (first, _) = run_case(case);
        let (second, _) = run_case(case);
        assert_eq!(first, second, "{}: nondeterministic report", case.script);
    }
}

#[test]
fn print_parse_round_trip() {
    let config = sol_core::config::Config::default();
    for case in CASES {
        let text = std::fs::read_to_string(scripts_dir().join(case.script)).unwrap();
        let script = sol_cli::parser::parse(&text, &config)
            .unwrap_or_else(|e| panic!("{}: {e}", case.script));
        let printed = script.to_string();
        let reparsed = sol_cli::parser::parse(&printed, &config)
            .unwrap_or_else(|e| panic!("{}: reparse failed: {e}\n{printed}", case.script));
        assert_eq!(script, reparsed, "{}: round trip changed the script", case.script);
    }
}

#[test]
fn parse_errors_carry_positions() {
    let config = sol_core::config::Config::default();
    let err = sol_cli::parser::parse("qubit q;\neval |0>_q <1|_q;\n", &config).unwrap_err();
    assert_eq!(err.line, 2, "{err}");
    let err = sol_cli::parser::parse("var x : Frob;\n", &config).unwrap_err();
    assert!(err.to_string().contains("unknown type"));
}

#[test]
fn unknown_suite_exits_three() {
    let out = Command::new(env!("CARGO_BIN_EXE_sol"))
        .args(["suite", "nonsense"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn suite_subcommand_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_sol"))
        .args(["suite", "bell", "--json"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("valid JSON suite report");
    assert_eq!(parsed["suite"], "bell");
}
