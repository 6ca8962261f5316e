//! Built-in gates, recursive state definitions and protocol harnesses.

pub mod defs;
pub mod gates;
pub mod harness;
pub mod recursive;

pub use defs::{
    basis_state_def, bell, eqsup_def, ghz_def, projector_complement, qft_state_def,
};
pub use gates::{quantum_structure, register_builtins};
pub use harness::{
    bell_suite, bloch, bloch_reconstruct, bloch_suite, ghz_suite, no_cloning_formula,
    no_cloning_refute, no_cloning_suite, projection_suite, qft_suite, teleport_suite,
    teleport_verify, zy_decompose, zy_reconstruct, zy_suite, HarnessError, TeleportBranch,
    TeleportMutation,
};
pub use recursive::{resolve_defs, RecursiveDef, Template, UnrollError};
