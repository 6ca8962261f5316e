//! Quantum structures, contexts, the signing judgement and matrix semantics
//! of formal operators.

mod cmatrix;
mod eigen;
mod eval;
mod functions;
mod predicates;
mod signing;

#[cfg(test)]
mod tests;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::classical::{EvalError, State, Structure, Value};
use crate::registers::{GroundRef, QuantumVarDecl, RegisterError};
use crate::term::{OpConstDecl, OpVarDecl};

pub use cmatrix::CMatrix;
pub use eigen::{hermitian_eigenvalues, is_psd, min_eigenvalue};
pub use eval::{eval_operator, permute_cols, permute_rows, scalar_value, Evaled};
pub use functions::{frobenius_norm, trace};
pub use predicates::{canonical_order, compare, check_predicate, CmpRel, PredicateKind};
pub use signing::check_signing;

/// A ground signature: concrete, pairwise-distinct registers on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSignature {
    pub dom: Vec<GroundRef>,
    pub cod: Vec<GroundRef>,
}

impl GroundSignature {
    pub fn dim_dom(&self) -> usize {
        self.dom.iter().map(|r| r.dim()).product()
    }

    pub fn dim_cod(&self) -> usize {
        self.cod.iter().map(|r| r.dim()).product()
    }
}

impl fmt::Display for GroundSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {}",
            crate::registers::display_string(&self.dom),
            crate::registers::display_string(&self.cod)
        )
    }
}

/// Matrix interpretation of an operator constant: parameter values plus the
/// per-register dimensions of the grounded domain and codomain.
pub type ConstInterp =
    Arc<dyn Fn(&[Value], &[usize], &[usize]) -> Result<CMatrix, OperatorError> + Send + Sync>;

/// A quantum structure over a classical structure: quantum variable
/// declarations plus matrix interpretations for the operator constants.
#[derive(Clone)]
pub struct QuantumStructure {
    pub base: Structure,
    qvars: Vec<Arc<QuantumVarDecl>>,
    opvars: Vec<Arc<OpVarDecl>>,
    consts: Vec<(Arc<OpConstDecl>, ConstInterp)>,
}

impl std::fmt::Debug for QuantumStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuantumStructure")
            .field("qvars", &self.qvars.len())
            .field("opvars", &self.opvars.len())
            .field("consts", &self.consts.len())
            .finish()
    }
}

impl QuantumStructure {
    /// An empty quantum structure; gates are registered separately.
    pub fn new(base: Structure) -> QuantumStructure {
        QuantumStructure { base, qvars: Vec::new(), opvars: Vec::new(), consts: Vec::new() }
    }

    pub fn declare_qvar(&mut self, decl: Arc<QuantumVarDecl>) -> Arc<QuantumVarDecl> {
        self.qvars.push(decl.clone());
        decl
    }

    pub fn declare_opvar(&mut self, decl: Arc<OpVarDecl>) -> Arc<OpVarDecl> {
        self.opvars.push(decl.clone());
        decl
    }

    pub fn register_const(&mut self, decl: Arc<OpConstDecl>, interp: ConstInterp) {
        self.consts.push((decl, interp));
    }

    pub fn lookup_qvar(&self, name: &str) -> Option<&Arc<QuantumVarDecl>> {
        self.qvars.iter().find(|d| &*d.name == name)
    }

    pub fn lookup_opvar(&self, name: &str) -> Option<&Arc<OpVarDecl>> {
        self.opvars.iter().find(|d| &*d.name == name)
    }

    pub fn lookup_const(&self, name: &str) -> Option<&Arc<OpConstDecl>> {
        self.consts.iter().find(|(d, _)| &*d.name == name).map(|(d, _)| d)
    }

    pub fn opvars(&self) -> &[Arc<OpVarDecl>] {
        &self.opvars
    }

    pub fn interp(&self, name: &str) -> Option<&ConstInterp> {
        self.consts.iter().find(|(d, _)| &*d.name == name).map(|(_, i)| i)
    }
}

/// A valuation of operator variables by matrices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Valuation {
    entries: Vec<(Arc<str>, CMatrix)>,
}

impl Valuation {
    pub fn get(&self, name: &str) -> Option<&CMatrix> {
        self.entries.iter().rev().find(|(n, _)| &**n == name).map(|(_, m)| m)
    }

    /// The updated valuation `self[X := m]`.
    pub fn update(&self, name: impl Into<Arc<str>>, m: CMatrix) -> Valuation {
        let name = name.into();
        let mut out = self.clone();
        match out.entries.iter_mut().rev().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = m,
            None => out.entries.push((name, m)),
        }
        out
    }

    pub fn entries(&self) -> &[(Arc<str>, CMatrix)] {
        &self.entries
    }
}

/// The evaluation environment: a classical state plus an operator-variable
/// valuation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Context {
    pub sigma: State,
    pub eta: Valuation,
}

impl Context {
    pub fn new(sigma: State, eta: Valuation) -> Context {
        Context { sigma, eta }
    }

    pub fn with_sigma(sigma: State) -> Context {
        Context { sigma, eta: Valuation::default() }
    }
}

/// Errors of the signing judgement; each register-discipline failure carries
/// the name of the violated rule.
#[derive(Debug, Error)]
pub enum SigningError {
    #[error("({rule}) registers not pairwise distinct: {refs}")]
    Distinctness { rule: &'static str, refs: String },
    #[error("({rule}) summand signatures disagree: {left} vs {right}")]
    SumMismatch { rule: &'static str, left: String, right: String },
    #[error("({rule}) left codomain {left} does not match right domain {right}")]
    ProductMismatch { rule: &'static str, left: String, right: String },
    #[error("({rule}) tensor operands overlap on {refs}")]
    TensorOverlap { rule: &'static str, refs: String },
    #[error("({rule}) dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { rule: &'static str, dim: usize, cap: usize },
    #[error("unresolved definition call |{0}(...)>; expand it under a state first")]
    UnresolvedDef(String),
    #[error(transparent)]
    Register(#[from] RegisterError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl SigningError {
    /// The signing rule that rejected the term, when one did.
    pub fn rule(&self) -> Option<&'static str> {
        match self {
            SigningError::Distinctness { rule, .. }
            | SigningError::SumMismatch { rule, .. }
            | SigningError::ProductMismatch { rule, .. }
            | SigningError::TensorOverlap { rule, .. }
            | SigningError::DimensionCap { rule, .. } => Some(rule),
            _ => None,
        }
    }
}

/// Errors of matrix evaluation.
#[derive(Debug, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Signing(#[from] SigningError),
    #[error("label {label} of {term} lies outside the value domain of {register}")]
    LabelOutsideDomain { term: String, label: String, register: String },
    #[error("operator variable {0} has no value in the valuation")]
    UnboundOpVar(String),
    #[error("operator constant {0} has no interpretation")]
    UnknownConst(String),
    #[error("interpretation of {name} returned {got_rows}x{got_cols}, expected {rows}x{cols}")]
    InterpShape { name: String, got_rows: usize, got_cols: usize, rows: usize, cols: usize },
    #[error("{name}: {reason}")]
    Interp { name: String, reason: String },
    #[error("trace undefined: signature {0} is not square")]
    NonSquareTrace(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl OperatorError {
    /// True for failures that poison the whole check (resource limits,
    /// missing interpretations, finite-range artifacts) rather than making a
    /// single atom false.
    pub fn is_resource(&self) -> bool {
        match self {
            OperatorError::Signing(s) => !matches!(
                s,
                SigningError::Distinctness { .. }
                    | SigningError::SumMismatch { .. }
                    | SigningError::ProductMismatch { .. }
                    | SigningError::TensorOverlap { .. }
            ),
            OperatorError::NonSquareTrace(_) => false,
            _ => true,
        }
    }
}
