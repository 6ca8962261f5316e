//! The entailment model checker `Σ, Γ |= A`.
//!
//! Classical states are enumerated over the declared variables (minus any
//! pinned by the caller); operator valuations range over the sample grid of
//! the free operator variables. A context satisfying the hypotheses but
//! refuting the goal is a witness; full survival of an exact enumeration is
//! `Valid`, and survival of a sampled one is `Unknown`.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::classical::{satisfies, Formula, State, StateSpace};
use crate::exec::{scan, ExecMode, ScanOutcome, Step};
use crate::semantics::{Context, QuantumStructure, Valuation};
use crate::term::OpVarDecl;

use super::formula::SolFormula;
use super::sat::{sat_sol, CheckError, Checker, Truth};

/// An entailment query: classical theory, operator theory, and goal.
#[derive(Clone, Debug)]
pub struct EntailmentQuery {
    pub sigma: Vec<Formula>,
    pub gamma: Vec<SolFormula>,
    pub goal: SolFormula,
    /// Variables excluded from enumeration; their values come from `base`.
    pub pinned: BTreeSet<Arc<str>>,
    /// Base state carrying pinned values (defaults elsewhere).
    pub base: Option<State>,
}

impl EntailmentQuery {
    pub fn new(sigma: Vec<Formula>, gamma: Vec<SolFormula>, goal: SolFormula) -> Self {
        EntailmentQuery { sigma, gamma, goal, pinned: BTreeSet::new(), base: None }
    }

    /// Validity check `|= goal`.
    pub fn validity(goal: SolFormula) -> Self {
        EntailmentQuery::new(Vec::new(), Vec::new(), goal)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Valid,
    Refuted,
    Unknown,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Stats {
    /// Size of the classical enumeration space.
    pub state_space: u64,
    /// States visited (up to and including the witness when refuted).
    pub states_enumerated: u64,
    /// States satisfying the classical theory; reported for completed scans.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_satisfying: Option<u64>,
    /// Operator valuations tried per state.
    pub eta_grid: u64,
    /// Free operator variables sampled.
    pub sampled_opvars: usize,
}

/// A refuting context, replayable through `sat_sol`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub index: u64,
    pub context: Context,
    /// Sample labels per free operator variable.
    pub eta_labels: Vec<(Arc<str>, String)>,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub verdict: Verdict,
    /// Why the verdict is `Unknown`.
    pub reason: Option<String>,
    /// Whether the whole check was sampling-free.
    pub exact: bool,
    pub witness: Option<Witness>,
    pub stats: Stats,
}

impl CheckResult {
    fn unknown(reason: impl Into<String>, stats: Stats) -> CheckResult {
        CheckResult {
            verdict: Verdict::Unknown,
            reason: Some(reason.into()),
            exact: false,
            witness: None,
            stats,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CheckOptions {
    pub mode: ExecMode,
}

enum Terminal {
    Witness(Witness),
    Error(String),
}

/// Check `query.sigma, query.gamma |= query.goal` over the declared
/// variables of the structure underlying `qs`.
pub fn check_entailment(
    qs: &QuantumStructure,
    query: &EntailmentQuery,
    opts: CheckOptions,
) -> CheckResult {
    let st = &qs.base;
    let formulas: Vec<&SolFormula> = query.gamma.iter().chain([&query.goal]).collect();
    let checker = match Checker::prepare(qs, &formulas) {
        Ok(c) => c,
        Err(e) => return CheckResult::unknown(e.to_string(), Stats::default()),
    };

    // The free operator variables of the query span the eta grid.
    let mut free_ops: Vec<Arc<OpVarDecl>> = Vec::new();
    for f in &formulas {
        for d in f.free_operator_vars() {
            if !free_ops.contains(&d) {
                free_ops.push(d);
            }
        }
    }
    let grids: Vec<&[super::samples::Sample]> = free_ops
        .iter()
        .map(|d| checker.samples_for(d).expect("prepared above"))
        .collect();
    let eta_grid: u64 = grids.iter().map(|g| g.len() as u64).product();

    let base = query.base.clone().unwrap_or_else(|| st.default_state());
    let space = match StateSpace::over(st, base, &query.pinned) {
        Ok(s) => s,
        Err(e) => {
            return CheckResult::unknown(
                e.to_string(),
                Stats { eta_grid, sampled_opvars: free_ops.len(), ..Stats::default() },
            )
        }
    };
    let total = space.size();

    let eta_at = |grid_idx: u64| -> (Valuation, Vec<(Arc<str>, String)>) {
        let mut eta = Valuation::default();
        let mut labels = Vec::new();
        let mut rem = grid_idx;
        for (decl, set) in free_ops.iter().zip(&grids).rev() {
            let n = set.len() as u64;
            let s = &set[(rem % n) as usize];
            rem /= n;
            eta = eta.update(decl.name.clone(), s.mat.clone());
            labels.push((decl.name.clone(), s.label.clone()));
        }
        labels.reverse();
        (eta, labels)
    };

    let evaluate = |index: u64| -> Step<Terminal> {
        let sigma = space.state_at(index);
        for phi in &query.sigma {
            match satisfies(st, &sigma, phi) {
                Ok(true) => {}
                Ok(false) => return Step::Skip,
                Err(e) => return Step::Terminal(Terminal::Error(e.to_string())),
            }
        }
        let mut exact = true;
        for grid_idx in 0..eta_grid.max(1) {
            let (eta, labels) = eta_at(grid_idx);
            let ctx = Context { sigma: sigma.clone(), eta };
            let mut hyp = Truth::exact(true);
            for g in &query.gamma {
                match sat_sol(&checker, &ctx, g) {
                    Ok(t) => hyp = hyp.and(t),
                    Err(e) => return Step::Terminal(Terminal::Error(e.to_string())),
                }
                if !hyp.holds && hyp.exact {
                    break;
                }
            }
            if !hyp.holds {
                // Hypotheses fail: vacuous at this valuation. An inexact
                // failure could hide a refutation, so it taints exactness.
                exact &= hyp.exact;
                continue;
            }
            match sat_sol(&checker, &ctx, &query.goal) {
                Ok(t) => {
                    if !t.holds && t.exact && hyp.exact {
                        return Step::Terminal(Terminal::Witness(Witness {
                            index,
                            context: ctx,
                            eta_labels: labels,
                        }));
                    }
                    exact &= t.holds && t.exact && hyp.exact;
                }
                Err(e) => return Step::Terminal(Terminal::Error(e.to_string())),
            }
        }
        Step::Pass { exact }
    };

    match scan(total, opts.mode, evaluate) {
        ScanOutcome::Terminal { index, value: Terminal::Witness(w) } => CheckResult {
            verdict: Verdict::Refuted,
            reason: None,
            exact: true,
            witness: Some(w),
            stats: Stats {
                state_space: total,
                states_enumerated: index + 1,
                sigma_satisfying: None,
                eta_grid: eta_grid.max(1),
                sampled_opvars: free_ops.len(),
            },
        },
        ScanOutcome::Terminal { index, value: Terminal::Error(e) } => CheckResult::unknown(
            e,
            Stats {
                state_space: total,
                states_enumerated: index + 1,
                sigma_satisfying: None,
                eta_grid: eta_grid.max(1),
                sampled_opvars: free_ops.len(),
            },
        ),
        ScanOutcome::Completed { passed, exact, .. } => {
            let stats = Stats {
                state_space: total,
                states_enumerated: total,
                sigma_satisfying: Some(passed),
                eta_grid: eta_grid.max(1),
                sampled_opvars: free_ops.len(),
            };
            if exact && free_ops.is_empty() {
                CheckResult {
                    verdict: Verdict::Valid,
                    reason: None,
                    exact: true,
                    witness: None,
                    stats,
                }
            } else {
                CheckResult {
                    verdict: Verdict::Unknown,
                    reason: Some("sampled: operator-level quantification was sampled, survival is evidence only".into()),
                    exact: false,
                    witness: None,
                    stats,
                }
            }
        }
    }
}

/// Replays a witness: the hypotheses must hold and the goal must fail.
pub fn recheck_witness(
    qs: &QuantumStructure,
    query: &EntailmentQuery,
    witness: &Witness,
) -> Result<bool, CheckError> {
    let formulas: Vec<&SolFormula> = query.gamma.iter().chain([&query.goal]).collect();
    let checker = Checker::prepare(qs, &formulas)?;
    for phi in &query.sigma {
        if !satisfies(&qs.base, &witness.context.sigma, phi)
            .map_err(CheckError::Eval)?
        {
            return Ok(false);
        }
    }
    for g in &query.gamma {
        if !sat_sol(&checker, &witness.context, g)?.holds {
            return Ok(false);
        }
    }
    Ok(!sat_sol(&checker, &witness.context, &query.goal)?.holds)
}
