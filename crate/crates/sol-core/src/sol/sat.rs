//! Satisfaction of operator-level formulas in a context.
//!
//! Truth values carry an exactness flag. Classical quantifiers enumerate
//! finite domains exactly; operator quantifiers range over the sample set,
//! so a universally-quantified `true` is only ever evidence (`exact =
//! false`), while a falsifying sample is a genuine refutation. Atoms whose
//! operator fails the register discipline (distinctness, signature
//! mismatch) are false; resource failures (dimension caps, range escapes)
//! propagate as errors.

use std::sync::Arc;

use thiserror::Error;

use crate::classical::EvalError;
use crate::semantics::{
    check_predicate, compare, frobenius_norm, trace, CmpRel, Context, OperatorError,
    QuantumStructure,
};
use crate::stdlib::recursive::{resolve_defs, UnrollError};
use crate::term::{FormalOp, OpVarDecl};

use super::formula::{SolFormula, SolRel};
use super::samples::{sample_set, Sample};

/// A truth value plus whether it was established without sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truth {
    pub holds: bool,
    pub exact: bool,
}

impl Truth {
    pub fn exact(holds: bool) -> Truth {
        Truth { holds, exact: true }
    }

    pub fn negate(self) -> Truth {
        Truth { holds: !self.holds, exact: self.exact }
    }

    /// Conjunction: a false conjunct established exactly makes the result
    /// exactly false; a true result is exact only if both sides are.
    pub fn and(self, other: Truth) -> Truth {
        let holds = self.holds && other.holds;
        let exact = if holds {
            self.exact && other.exact
        } else {
            (!self.holds && self.exact) || (!other.holds && other.exact)
        };
        Truth { holds, exact }
    }
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Unroll(#[from] UnrollError),
    #[error("no sample set for operator variable {0} (non-enumerable type)")]
    NoSamples(String),
}

/// Prepared checker: quantum structure plus sample sets for every operator
/// variable the query mentions. Immutable, shareable across workers.
pub struct Checker<'a> {
    pub qs: &'a QuantumStructure,
    samples: Vec<(Arc<OpVarDecl>, Vec<Sample>)>,
}

impl<'a> Checker<'a> {
    /// Prepares sample sets for all operator variables in the formulas.
    pub fn prepare(
        qs: &'a QuantumStructure,
        formulas: &[&SolFormula],
    ) -> Result<Checker<'a>, CheckError> {
        let mut samples = Vec::new();
        for f in formulas {
            for decl in f.all_operator_vars() {
                if samples.iter().any(|(d, _)| *d == decl) {
                    continue;
                }
                let set = sample_set(&qs.base, &decl)
                    .ok_or_else(|| CheckError::NoSamples(decl.name.to_string()))?;
                samples.push((decl, set));
            }
        }
        Ok(Checker { qs, samples })
    }

    pub fn samples_for(&self, decl: &OpVarDecl) -> Option<&[Sample]> {
        self.samples
            .iter()
            .find(|(d, _)| d.name == decl.name && d.dom == decl.dom && d.cod == decl.cod)
            .map(|(_, s)| s.as_slice())
    }
}

fn soft<T>(r: Result<T, OperatorError>) -> Result<Option<T>, CheckError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_resource() => Err(e.into()),
        Err(_) => Ok(None),
    }
}

fn resolve(checker: &Checker, ctx: &Context, op: &FormalOp) -> Result<FormalOp, CheckError> {
    Ok(resolve_defs(&checker.qs.base, &ctx.sigma, op)?)
}

/// Satisfaction `ctx |= f`.
pub fn sat_sol(checker: &Checker, ctx: &Context, f: &SolFormula) -> Result<Truth, CheckError> {
    let tol = checker.qs.base.config.tol;
    match f {
        SolFormula::NormCmp { op, rel, bound } => {
            let op = resolve(checker, ctx, op)?;
            let Some(v) = soft(frobenius_norm(checker.qs, ctx, &op))? else {
                return Ok(Truth::exact(false));
            };
            Ok(Truth::exact(match rel {
                SolRel::Eq => (v - bound).abs() <= tol,
                SolRel::Lt => v < bound - tol,
                SolRel::Gt => v > bound + tol,
            }))
        }
        SolFormula::TraceCmp { op, rel, bound } => {
            let op = resolve(checker, ctx, op)?;
            let Some(t) = soft(trace(checker.qs, ctx, &op))? else {
                return Ok(Truth::exact(false));
            };
            Ok(Truth::exact(match rel {
                SolRel::Eq => (t - bound).norm() <= tol,
                // Strict order on traces compares real parts and requires
                // both sides to be real within tolerance.
                SolRel::Lt => t.im.abs() <= tol && bound.im.abs() <= tol && t.re < bound.re - tol,
                SolRel::Gt => t.im.abs() <= tol && bound.im.abs() <= tol && t.re > bound.re + tol,
            }))
        }
        SolFormula::Pred { kind, op, regs } => {
            let op = resolve(checker, ctx, op)?;
            let Some(v) = soft(check_predicate(checker.qs, ctx, *kind, &op, regs))? else {
                return Ok(Truth::exact(false));
            };
            Ok(Truth::exact(v))
        }
        SolFormula::OpEq(a, b) => {
            let a = resolve(checker, ctx, a)?;
            let b = resolve(checker, ctx, b)?;
            let Some(v) = soft(compare(checker.qs, ctx, &a, &b, CmpRel::Equal))? else {
                return Ok(Truth::exact(false));
            };
            Ok(Truth::exact(v))
        }
        SolFormula::OpLeq(a, b) => {
            let a = resolve(checker, ctx, a)?;
            let b = resolve(checker, ctx, b)?;
            let Some(v) = soft(compare(checker.qs, ctx, &a, &b, CmpRel::Loewner))? else {
                return Ok(Truth::exact(false));
            };
            Ok(Truth::exact(v))
        }
        SolFormula::Not(g) => Ok(sat_sol(checker, ctx, g)?.negate()),
        SolFormula::And(a, b) => {
            let ta = sat_sol(checker, ctx, a)?;
            if !ta.holds && ta.exact {
                return Ok(ta);
            }
            Ok(ta.and(sat_sol(checker, ctx, b)?))
        }
        SolFormula::ForallVar(v, body) => {
            let dom = checker.qs.base.domain_of_var(v).ok_or_else(|| {
                CheckError::Eval(EvalError::UnsupportedQuantifier(v.name.to_string()))
            })?;
            let mut acc = Truth::exact(true);
            for d in dom.iter() {
                let inner = Context {
                    sigma: ctx.sigma.update(v.name.clone(), d.into()),
                    eta: ctx.eta.clone(),
                };
                let t = sat_sol(checker, &inner, body)?;
                acc = acc.and(t);
                if !acc.holds && acc.exact {
                    return Ok(acc);
                }
            }
            Ok(acc)
        }
        SolFormula::ForallOp(x, body) => {
            let samples = checker
                .samples_for(x)
                .ok_or_else(|| CheckError::NoSamples(x.name.to_string()))?;
            let mut inexact_false = false;
            for s in samples {
                let inner = Context {
                    sigma: ctx.sigma.clone(),
                    eta: ctx.eta.update(x.name.clone(), s.mat.clone()),
                };
                let t = sat_sol(checker, &inner, body)?;
                if !t.holds {
                    if t.exact {
                        // A falsifying sample is a genuine refutation.
                        return Ok(Truth::exact(false));
                    }
                    inexact_false = true;
                }
            }
            // Surviving every sample is evidence, not proof.
            Ok(Truth { holds: !inexact_false, exact: false })
        }
    }
}
