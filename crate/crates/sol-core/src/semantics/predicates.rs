//! Operator predicates: pure/mixed state, unitary, observable, equality and
//! the Löwner order.
//!
//! Predicates return `false` on register-discipline failures (distinctness,
//! signature mismatch); resource failures (dimension caps, missing
//! interpretations) propagate as errors.

use crate::classical::satisfies;
use crate::registers::{distinctness_formula, ground_string, GroundRef, QuantumRef};
use crate::term::FormalOp;

use super::eval::{eval_operator, Evaled};
use super::signing::same_register_set;
use super::{eigen, Context, OperatorError, QuantumStructure};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredicateKind {
    PureState,
    MixedState,
    Unitary,
    Observable,
}

impl PredicateKind {
    pub fn name(self) -> &'static str {
        match self {
            PredicateKind::PureState => "pure",
            PredicateKind::MixedState => "mixed",
            PredicateKind::Unitary => "unitary",
            PredicateKind::Observable => "obs",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpRel {
    Equal,
    Loewner,
}

/// Canonical register order: sorted by (base name, subscript values).
pub fn canonical_order(regs: &[GroundRef]) -> Vec<GroundRef> {
    let mut out = regs.to_vec();
    out.sort();
    out
}

fn eval_soft(
    qs: &QuantumStructure,
    ctx: &Context,
    a: &FormalOp,
) -> Result<Option<Evaled>, OperatorError> {
    match eval_operator(qs, ctx, a) {
        Ok(e) => Ok(Some(e)),
        Err(e) if e.is_resource() => Err(e),
        Err(_) => Ok(None),
    }
}

/// The judgement `kind(A) : regs` in a context.
pub fn check_predicate(
    qs: &QuantumStructure,
    ctx: &Context,
    kind: PredicateKind,
    a: &FormalOp,
    regs: &[QuantumRef],
) -> Result<bool, OperatorError> {
    let tol = qs.base.config.tol;
    // Dist(regs) must hold.
    let dist = distinctness_formula(regs);
    if !satisfies(&qs.base, &ctx.sigma, &dist).map_err(super::SigningError::Eval)? {
        return Ok(false);
    }
    let target = ground_string(&qs.base, &ctx.sigma, regs).map_err(super::SigningError::from)?;
    let Some(e) = eval_soft(qs, ctx, a)? else {
        return Ok(false);
    };
    // Signature must match the judgement's registers (as a set; bases are
    // aligned to the given order for the numeric test).
    let sig_ok = match kind {
        PredicateKind::PureState => same_register_set(&e.dom, &target) && e.cod.is_empty(),
        _ => same_register_set(&e.dom, &target) && same_register_set(&e.cod, &target),
    };
    if !sig_ok {
        return Ok(false);
    }
    let m = match kind {
        PredicateKind::PureState => e.reordered(&target, &[]).mat,
        _ => e.reordered(&target, &target).mat,
    };
    Ok(match kind {
        PredicateKind::PureState => (m.frobenius() - 1.0).abs() <= tol,
        PredicateKind::MixedState => {
            m.is_hermitian(tol)
                && (m.trace() - num_complex::Complex64::new(1.0, 0.0)).norm() <= tol
                && eigen::min_eigenvalue(&m) >= -tol
        }
        PredicateKind::Unitary => m.is_unitary(tol),
        PredicateKind::Observable => m.is_hermitian(tol),
    })
}

/// Equality / Löwner comparison of two operators.
///
/// Both must evaluate over the same registers per side; bases are aligned to
/// canonical order before comparing. For the Löwner order both signatures
/// must additionally be square.
pub fn compare(
    qs: &QuantumStructure,
    ctx: &Context,
    a: &FormalOp,
    b: &FormalOp,
    rel: CmpRel,
) -> Result<bool, OperatorError> {
    let tol = qs.base.config.tol;
    let (Some(ea), Some(eb)) = (eval_soft(qs, ctx, a)?, eval_soft(qs, ctx, b)?) else {
        return Ok(false);
    };
    if !same_register_set(&ea.dom, &eb.dom) || !same_register_set(&ea.cod, &eb.cod) {
        return Ok(false);
    }
    let dom = canonical_order(&ea.dom);
    let cod = canonical_order(&ea.cod);
    let ma = ea.reordered(&dom, &cod).mat;
    let mb = eb.reordered(&dom, &cod).mat;
    match rel {
        CmpRel::Equal => Ok(ma.approx_eq(&mb, tol)),
        CmpRel::Loewner => {
            if !same_register_set(&dom, &cod) {
                return Ok(false);
            }
            // Align codomain to domain order so the difference is an
            // endomorphism in one basis.
            let ma = super::eval::permute_cols(&ma, &cod, &dom);
            let mb = super::eval::permute_cols(&mb, &cod, &dom);
            let diff = mb.sub(&ma);
            Ok(eigen::is_psd(&diff, tol))
        }
    }
}
