//! Command-line front end: parse `.sol` scripts, run sign checks,
//! evaluations, normal forms, entailment queries and the built-in suites.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use sol_cli::{parser, runner};
use sol_core::config::Config;
use sol_core::exec::ExecMode;

#[derive(Parser)]
#[command(name = "sol", version, about = "Symbolic operator logic checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Enumeration range for Int variables, as LO..HI.
    #[arg(long, value_parser = parse_range, default_value = "-64..64", allow_hyphen_values = true)]
    int_range: (i64, i64),
    /// Absolute tolerance for approximate comparisons.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Random samples per operator variable.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Master seed for sampling.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Dimension cap per signature side.
    #[arg(long, default_value_t = 4096)]
    max_dim: usize,
    /// Emit the report as JSON on stdout.
    #[arg(long)]
    json: bool,
    /// Force single-threaded enumeration.
    #[arg(long)]
    sequential: bool,
}

impl CommonFlags {
    fn config(&self) -> Config {
        Config {
            int_range: self.int_range,
            tol: self.tol,
            samples: self.samples,
            seed: self.seed,
            max_dim: self.max_dim,
            ..Config::default()
        }
    }

    fn mode(&self) -> ExecMode {
        if self.sequential {
            ExecMode::Sequential
        } else {
            ExecMode::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse and execute a script.
    Run {
        /// Path to the `.sol` script.
        script: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Run one built-in verification suite.
    Suite {
        /// One of: teleport, zy, bloch, nocloning, ghz, qft, projection,
        /// bell, schema, orderlaws.
        name: String,
        #[command(flatten)]
        flags: CommonFlags,
    },
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err("empty range".into());
    }
    Ok((lo, hi))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { script, flags } => run_command(&script, &flags),
        Command::Suite { name, flags } => suite_command(&name, &flags),
    }
}

fn run_command(path: &PathBuf, flags: &CommonFlags) -> ExitCode {
    let started = Instant::now();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(3);
        }
    };
    let config = flags.config();
    let script = match parser::parse(&text, &config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(3);
        }
    };
    let outcome = runner::run_script(&script, flags.mode());
    emit(&outcome, flags, started);
    ExitCode::from(outcome.exit as u8)
}

fn suite_command(name: &str, flags: &CommonFlags) -> ExitCode {
    let started = Instant::now();
    let config = flags.config();
    let Some(rep) = runner::run_suite(name, &config) else {
        eprintln!(
            "error: unknown suite {name}; available: {}",
            runner::SUITE_NAMES.join(", ")
        );
        return ExitCode::from(3);
    };
    let passed = rep.passed();
    if flags.json {
        println!("{}", serde_json::to_string_pretty(&rep).expect("suite reports serialize"));
    } else {
        for e in &rep.entries {
            println!(
                "{}: {} ({} cases, {} failures){}",
                e.name,
                if e.failures == 0 { "pass" } else { "FAIL" },
                e.cases,
                e.failures,
                e.detail.as_deref().map(|d| format!(" - {d}")).unwrap_or_default()
            );
        }
        eprintln!("suite {name}: {} in {:.2?}", if passed { "pass" } else { "FAIL" }, started.elapsed());
    }
    ExitCode::from(if passed { 0 } else { 1 })
}

fn emit(outcome: &runner::RunOutcome, flags: &CommonFlags, started: Instant) {
    if flags.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&outcome.report).expect("reports serialize")
        );
    } else {
        for d in &outcome.report.directives {
            let detail = d
                .detail
                .as_ref()
                .and_then(|v| summary_line(d.kind, v))
                .map(|s| format!(" - {s}"))
                .unwrap_or_default();
            println!("[line {:>3}] {:<9} {}{}", d.line, d.kind, d.verdict, detail);
        }
        eprintln!(
            "overall: {} (exit {}) in {:.2?}",
            outcome.report.overall,
            outcome.exit,
            started.elapsed()
        );
    }
}

fn summary_line(kind: &str, detail: &serde_json::Value) -> Option<String> {
    match kind {
        "assert" | "entail" => {
            let stats = detail.get("stats")?;
            let mut s = format!(
                "{} of {} states satisfy the theory",
                stats.get("sigma_satisfying").and_then(|v| v.as_u64()).unwrap_or(0),
                stats.get("state_space").and_then(|v| v.as_u64()).unwrap_or(0),
            );
            if let Some(r) = detail.get("reason").and_then(|v| v.as_str()) {
                s = format!("{s}; {r}");
            }
            if let Some(w) = detail.get("witness") {
                s = format!("{s}; witness at index {}", w.get("index").and_then(|v| v.as_u64()).unwrap_or(0));
            }
            Some(s)
        }
        "eval" => Some(detail.get("signature")?.as_str()?.to_string()),
        "sign" => detail
            .get("signature")
            .and_then(|v| v.as_str())
            .map(|s| s.to_string())
            .or_else(|| detail.get("message").and_then(|v| v.as_str()).map(|s| s.to_string())),
        "normalize" => Some(detail.get("display")?.as_str()?.to_string()),
        "suite" => {
            let entries = detail.get("entries")?.as_array()?;
            let cases: u64 = entries
                .iter()
                .filter_map(|e| e.get("cases").and_then(|v| v.as_u64()))
                .sum();
            let failures: u64 = entries
                .iter()
                .filter_map(|e| e.get("failures").and_then(|v| v.as_u64()))
                .sum();
            Some(format!("{cases} checks, {failures} failures"))
        }
        "let" => detail.get("value").and_then(|v| v.as_str()).map(|s| s.to_string()),
        _ => None,
    }
}
