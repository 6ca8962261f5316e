//! Operator-level formulas, satisfaction and the entailment model checker.

mod entail;
mod formula;
mod samples;
mod sat;
mod schema;


pub use entail::{
    check_entailment, recheck_witness, CheckOptions, CheckResult, EntailmentQuery, Stats,
    Verdict, Witness,
};
pub use formula::{subst_sol, SolFormula, SolRel};
pub use samples::{sample_set, Sample};
pub use sat::{sat_sol, CheckError, Checker, Truth};
pub use schema::{observable_def_check, schema_suite, unitary_def_check, DefCheck};
