//! A kernel for symbolic specification and checking of quantum data and
//! operations.
//!
//! The library is layered the same way the logic itself is:
//!
//! * [`classical`] — a typed first-order expression/formula language with
//!   finite-domain evaluation, satisfaction and substitution;
//! * [`registers`] — quantum variables, subscripted registers, distinctness
//!   formulas and grounding under a classical state;
//! * [`term`] — the formal-operator term language (kets, bras, operator
//!   variables/constants, scaling, adjoint, sum, product, tensor);
//! * [`semantics`] — ground signing judgements and dense-matrix evaluation
//!   of formal operators, together with norms, traces, operator predicates
//!   and the Löwner order;
//! * [`sol`] — operator-level logical formulas, their satisfaction, and the
//!   entailment model checker `Σ, Γ ⊨ 𝒜` over enumerated classical states
//!   and sampled operator valuations;
//! * [`rewrite`] — conditional equational rewriting and dyad normal forms;
//! * [`stdlib`] — the built-in gate table, recursive state definitions
//!   (GHZ, equal superposition, QFT data structure) and executable protocol
//!   harnesses (teleportation, Z–Y decomposition, Bloch, no-cloning).
//!
//! Entailment checking enumerates classical states; with the default
//! `parallel` feature the enumeration is partitioned across worker threads
//! with a deterministic first-witness guarantee (see [`exec`]).

pub mod classical;
pub mod config;
pub mod exec;
pub mod randgen;
pub mod registers;
pub mod report;
pub mod rewrite;
pub mod semantics;
pub mod sol;
pub mod stdlib;
pub mod term;

pub use config::Config;
