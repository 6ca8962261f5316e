//! The ground signing judgement.
//!
//! `check_signing(sigma, A)` derives a ground signature for `A` under the
//! classical state `sigma`, or reports which rule rejected the term. The
//! rules are:
//!
//! * `Sign-Cons` — a scalar signs as `ε -> ε`;
//! * `Sign-Stat` — `|s>_q : σ(q) -> ε` and `<s|_q : ε -> σ(q)`;
//! * `Sign-OpV` / `Sign-OpC` — an operator variable/constant applied at
//!   `q̄ -> q̄'` signs to the grounded signature provided the distinctness
//!   formulas of both register strings hold;
//! * `Sign-Scal` / `Sign-Diag` — scaling preserves, adjoint swaps;
//! * `Sign-Add` — summands must ground to the same registers per side;
//! * `Sign-Mult` — the left codomain must ground to the right domain;
//! * `Sign-Tensor` — operand registers must be disjoint per side.
//!
//! Register-string agreement for sums and products is up to order: the
//! evaluator aligns bases by permutation, so signing compares register sets.

use crate::classical::{satisfies, State};
use crate::registers::{distinctness_formula, ground_string, GroundRef, QuantumRef};
use crate::term::FormalOp;

use super::{GroundSignature, QuantumStructure, SigningError};

pub(super) fn same_register_set(a: &[GroundRef], b: &[GroundRef]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut xs: Vec<&GroundRef> = a.iter().collect();
    let mut ys: Vec<&GroundRef> = b.iter().collect();
    xs.sort();
    ys.sort();
    xs == ys
}

pub(super) fn overlap(a: &[GroundRef], b: &[GroundRef]) -> Vec<GroundRef> {
    a.iter().filter(|r| b.contains(r)).cloned().collect()
}

fn check_distinct(
    qs: &QuantumStructure,
    sigma: &State,
    rule: &'static str,
    refs: &[QuantumRef],
) -> Result<Vec<GroundRef>, SigningError> {
    let dist = distinctness_formula(refs);
    if !satisfies(&qs.base, sigma, &dist).map_err(SigningError::Eval)? {
        let grounded = ground_string(&qs.base, sigma, refs)?;
        return Err(SigningError::Distinctness {
            rule,
            refs: crate::registers::display_string(&grounded),
        });
    }
    Ok(ground_string(&qs.base, sigma, refs)?)
}

fn check_cap(
    qs: &QuantumStructure,
    rule: &'static str,
    sig: GroundSignature,
) -> Result<GroundSignature, SigningError> {
    let cap = qs.base.config.max_dim;
    for dim in [sig.dim_dom(), sig.dim_cod()] {
        if dim > cap {
            return Err(SigningError::DimensionCap { rule, dim, cap });
        }
    }
    Ok(sig)
}

/// Derive the ground signature of `a` under `sigma`.
pub fn check_signing(
    qs: &QuantumStructure,
    sigma: &State,
    a: &FormalOp,
) -> Result<GroundSignature, SigningError> {
    match a {
        FormalOp::Scalar(_) => Ok(GroundSignature { dom: Vec::new(), cod: Vec::new() }),
        FormalOp::Ket(_, q) => {
            let g = q.ground(&qs.base, sigma)?;
            check_cap(qs, "Sign-Stat", GroundSignature { dom: vec![g], cod: Vec::new() })
        }
        FormalOp::Bra(_, q) => {
            let g = q.ground(&qs.base, sigma)?;
            check_cap(qs, "Sign-Stat", GroundSignature { dom: Vec::new(), cod: vec![g] })
        }
        FormalOp::OpVar(_, sig) => {
            let dom = check_distinct(qs, sigma, "Sign-OpV", &sig.dom)?;
            let cod = check_distinct(qs, sigma, "Sign-OpV", &sig.cod)?;
            check_cap(qs, "Sign-OpV", GroundSignature { dom, cod })
        }
        FormalOp::OpConst(_, _, sig) => {
            let dom = check_distinct(qs, sigma, "Sign-OpC", &sig.dom)?;
            let cod = check_distinct(qs, sigma, "Sign-OpC", &sig.cod)?;
            check_cap(qs, "Sign-OpC", GroundSignature { dom, cod })
        }
        FormalOp::Scale(_, inner) => check_signing(qs, sigma, inner),
        FormalOp::Adjoint(inner) => {
            let s = check_signing(qs, sigma, inner)?;
            Ok(GroundSignature { dom: s.cod, cod: s.dom })
        }
        FormalOp::Sum(x, y) => {
            let sx = check_signing(qs, sigma, x)?;
            let sy = check_signing(qs, sigma, y)?;
            if !same_register_set(&sx.dom, &sy.dom) || !same_register_set(&sx.cod, &sy.cod) {
                return Err(SigningError::SumMismatch {
                    rule: "Sign-Add",
                    left: sx.to_string(),
                    right: sy.to_string(),
                });
            }
            Ok(sx)
        }
        FormalOp::Product(x, y) => {
            let sx = check_signing(qs, sigma, x)?;
            let sy = check_signing(qs, sigma, y)?;
            if !same_register_set(&sx.cod, &sy.dom) {
                return Err(SigningError::ProductMismatch {
                    rule: "Sign-Mult",
                    left: crate::registers::display_string(&sx.cod),
                    right: crate::registers::display_string(&sy.dom),
                });
            }
            check_cap(qs, "Sign-Mult", GroundSignature { dom: sx.dom, cod: sy.cod })
        }
        FormalOp::Tensor(x, y) => {
            let sx = check_signing(qs, sigma, x)?;
            let sy = check_signing(qs, sigma, y)?;
            let clash_dom = overlap(&sx.dom, &sy.dom);
            let clash_cod = overlap(&sx.cod, &sy.cod);
            if !clash_dom.is_empty() || !clash_cod.is_empty() {
                let refs = clash_dom.iter().chain(&clash_cod);
                return Err(SigningError::TensorOverlap {
                    rule: "Sign-Tensor",
                    refs: refs.map(|r| r.to_string()).collect::<Vec<_>>().join(", "),
                });
            }
            let mut dom = sx.dom;
            dom.extend(sy.dom);
            let mut cod = sx.cod;
            cod.extend(sy.cod);
            check_cap(qs, "Sign-Tensor", GroundSignature { dom, cod })
        }
        FormalOp::DefCall(def, _) => Err(SigningError::UnresolvedDef(def.name.to_string())),
    }
}
