//! Directive execution and report assembly.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value as Json};

use sol_core::classical::{eval_expr, State};
use sol_core::config::Config;
use sol_core::exec::ExecMode;
use sol_core::report::SuiteReport;
use sol_core::semantics::{check_signing, eval_operator, Context, Evaled};
use sol_core::sol::{
    check_entailment, CheckOptions, CheckResult, EntailmentQuery, Verdict,
};
use sol_core::stdlib::{self, resolve_defs, TeleportMutation};

use crate::script::{Directive, Script};

/// Exit codes: 0 all valid/pass, 1 some refuted/fail, 2 some unknown,
/// 3 error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Unknown,
    Fail,
    Error,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Unknown => "unknown",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

#[derive(Serialize)]
pub struct DirectiveReport {
    pub kind: &'static str,
    pub line: usize,
    pub status: &'static str,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Json>,
}

#[derive(Serialize)]
pub struct Report {
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub directives: Vec<DirectiveReport>,
    pub overall: &'static str,
}

#[derive(Serialize)]
pub struct ConfigEcho {
    pub int_range: (i64, i64),
    pub tol: f64,
    pub max_dim: usize,
    pub samples: usize,
    pub seed: u64,
}

pub struct RunOutcome {
    pub report: Report,
    pub exit: i32,
}

fn verdict_status(v: Verdict) -> Status {
    match v {
        Verdict::Valid => Status::Ok,
        Verdict::Unknown => Status::Unknown,
        Verdict::Refuted => Status::Fail,
    }
}

fn complex_json(c: num_complex::Complex64) -> Json {
    json!([c.re, c.im])
}

fn matrix_json(e: &Evaled) -> Json {
    let rows: Vec<Json> = (0..e.mat.rows())
        .map(|i| {
            let row: Vec<Json> = (0..e.mat.cols()).map(|j| complex_json(e.mat.get(i, j))).collect();
            Json::Array(row)
        })
        .collect();
    json!({
        "signature": e.signature().to_string(),
        "rows": e.mat.rows(),
        "cols": e.mat.cols(),
        "entries": rows,
    })
}

fn check_json(out: &CheckResult) -> Json {
    let mut detail = json!({
        "exact": out.exact,
        "stats": serde_json::to_value(&out.stats).expect("stats serialize"),
    });
    if let Some(reason) = &out.reason {
        detail["reason"] = json!(reason);
    }
    if let Some(w) = &out.witness {
        let sigma: Vec<Json> = w
            .context
            .sigma
            .scalars()
            .iter()
            .map(|(n, v)| json!({ "var": n.to_string(), "value": v.to_string() }))
            .collect();
        let eta: Vec<Json> = w
            .eta_labels
            .iter()
            .map(|(n, l)| json!({ "opvar": n.to_string(), "sample": l }))
            .collect();
        detail["witness"] = json!({
            "index": w.index,
            "state": sigma,
            "valuation": eta,
        });
    }
    detail
}

fn suite_json(rep: &SuiteReport) -> Json {
    serde_json::to_value(rep).expect("suite reports serialize")
}

/// Runs a parsed script against its structures.
pub fn run_script(script: &Script, mode: ExecMode) -> RunOutcome {
    let qs = &script.quantum;
    let config = &qs.base.config;
    let mut pinned: BTreeSet<Arc<str>> = BTreeSet::new();
    let mut base: State = qs.base.default_state();
    let mut assumes = Vec::new();
    let mut directives = Vec::new();
    let mut worst = Status::Ok;

    for d in &script.directives {
        let (status, verdict, detail) = execute(
            d,
            qs,
            config,
            &mut pinned,
            &mut base,
            &mut assumes,
            mode,
        );
        worst = worst.max(status);
        directives.push(DirectiveReport {
            kind: d.kind(),
            line: d.line(),
            status: status.name(),
            verdict,
            detail,
        });
    }

    let overall = match worst {
        Status::Ok => "valid",
        Status::Unknown => "unknown",
        Status::Fail => "refuted",
        Status::Error => "error",
    };
    let exit = match worst {
        Status::Ok => 0,
        Status::Fail => 1,
        Status::Unknown => 2,
        Status::Error => 3,
    };
    RunOutcome {
        report: Report {
            config: ConfigEcho {
                int_range: config.int_range,
                tol: config.tol,
                max_dim: config.max_dim,
                samples: config.samples,
                seed: config.seed,
            },
            warnings: script.warnings.clone(),
            directives,
            overall,
        },
        exit,
    }
}

fn execute(
    d: &Directive,
    qs: &sol_core::semantics::QuantumStructure,
    config: &Config,
    pinned: &mut BTreeSet<Arc<str>>,
    base: &mut State,
    assumes: &mut Vec<sol_core::classical::Formula>,
    mode: ExecMode,
) -> (Status, String, Option<Json>) {
    match d {
        Directive::Let { name, cell, value, .. } => {
            let v = match eval_expr(&qs.base, base, value) {
                Ok(v) => v,
                Err(e) => return (Status::Error, "error".into(), Some(json!(e.to_string()))),
            };
            match cell {
                None => {
                    *base = base.update(name.clone(), v);
                    pinned.insert(name.clone());
                }
                Some(subs) => {
                    match base.update_cell(name, subs, v) {
                        Some(next) => *base = next,
                        None => {
                            return (
                                Status::Error,
                                "error".into(),
                                Some(json!(format!("no cell {name}{subs:?}"))),
                            )
                        }
                    }
                    pinned.insert(name.clone());
                }
            }
            (Status::Ok, "ok".into(), Some(json!({ "value": v.to_string() })))
        }
        Directive::Assume { formula, .. } => {
            assumes.push(formula.clone());
            (Status::Ok, "ok".into(), None)
        }
        Directive::Assert { goal, .. } => {
            let mut query = EntailmentQuery::new(assumes.clone(), Vec::new(), goal.clone());
            query.pinned = pinned.clone();
            query.base = Some(base.clone());
            let out = check_entailment(qs, &query, CheckOptions { mode });
            (
                verdict_status(out.verdict),
                format!("{:?}", out.verdict).to_lowercase(),
                Some(check_json(&out)),
            )
        }
        Directive::Entail { sigma, gamma, goal, .. } => {
            let mut query = EntailmentQuery::new(sigma.clone(), gamma.clone(), goal.clone());
            query.pinned = pinned.clone();
            query.base = Some(base.clone());
            let out = check_entailment(qs, &query, CheckOptions { mode });
            (
                verdict_status(out.verdict),
                format!("{:?}", out.verdict).to_lowercase(),
                Some(check_json(&out)),
            )
        }
        Directive::Eval { term, .. } => {
            let ctx = Context::with_sigma(base.clone());
            let resolved = match resolve_defs(&qs.base, &ctx.sigma, term) {
                Ok(t) => t,
                Err(e) => return (Status::Error, "error".into(), Some(json!(e.to_string()))),
            };
            match eval_operator(qs, &ctx, &resolved) {
                Ok(e) => (Status::Ok, "ok".into(), Some(matrix_json(&e))),
                Err(e) => (Status::Error, "error".into(), Some(json!(e.to_string()))),
            }
        }
        Directive::Sign { term, .. } => {
            let resolved = match resolve_defs(&qs.base, base, term) {
                Ok(t) => t,
                Err(e) => return (Status::Error, "error".into(), Some(json!(e.to_string()))),
            };
            match check_signing(qs, base, &resolved) {
                Ok(sig) => (
                    Status::Ok,
                    "well-signed".into(),
                    Some(json!({ "signature": sig.to_string() })),
                ),
                Err(e) => (
                    Status::Fail,
                    "ill-signed".into(),
                    Some(json!({
                        "rule": e.rule(),
                        "message": e.to_string(),
                    })),
                ),
            }
        }
        Directive::Normalize { term, .. } => {
            let ctx = Context::with_sigma(base.clone());
            let resolved = match resolve_defs(&qs.base, &ctx.sigma, term) {
                Ok(t) => t,
                Err(e) => return (Status::Error, "error".into(), Some(json!(e.to_string()))),
            };
            match sol_core::rewrite::normalize(qs, &ctx, &resolved) {
                Ok(nf) => {
                    let dyads: Vec<Json> = nf
                        .terms
                        .iter()
                        .map(|((r, c), v)| {
                            json!({
                                "row": r.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                                "col": c.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                                "coeff": complex_json(*v),
                            })
                        })
                        .collect();
                    (
                        Status::Ok,
                        "ok".into(),
                        Some(json!({
                            "display": nf.to_string(),
                            "dyads": dyads,
                        })),
                    )
                }
                Err(e) => (Status::Error, "error".into(), Some(json!(e.to_string()))),
            }
        }
        Directive::Suite { name, .. } => match run_suite(name, config) {
            Some(rep) => {
                let status = if rep.passed() { Status::Ok } else { Status::Fail };
                let verdict = if rep.passed() { "pass" } else { "fail" };
                (status, verdict.into(), Some(suite_json(&rep)))
            }
            None => (
                Status::Error,
                "error".into(),
                Some(json!(format!("unknown suite {name}"))),
            ),
        },
    }
}

/// The named verification suites.
pub fn run_suite(name: &str, config: &Config) -> Option<SuiteReport> {
    Some(match name {
        "teleport" => stdlib::teleport_suite(config, TeleportMutation::None),
        "zy" => stdlib::zy_suite(config),
        "bloch" => stdlib::bloch_suite(config),
        "nocloning" => stdlib::no_cloning_suite(config),
        "ghz" => stdlib::ghz_suite(config),
        "qft" => stdlib::qft_suite(config),
        "projection" => stdlib::projection_suite(config),
        "bell" => stdlib::bell_suite(config),
        "schema" => sol_core::sol::schema_suite(config),
        "orderlaws" => sol_core::rewrite::order_laws_suite(config),
        _ => return None,
    })
}

pub const SUITE_NAMES: [&str; 10] = [
    "teleport",
    "zy",
    "bloch",
    "nocloning",
    "ghz",
    "qft",
    "projection",
    "bell",
    "schema",
    "orderlaws",
];
