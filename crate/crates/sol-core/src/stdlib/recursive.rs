//! Recursive definitions of quantum states.
//!
//! A [`RecursiveDef`] is a guarded family of cases; each case body is a
//! template that may call the definition again at smaller parameters. Under
//! a classical state the call arguments become concrete and the template
//! unrolls into a plain [`FormalOp`].

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::classical::{
    eval_expr, satisfies, BasicType, Binding, EvalError, Expr, Formula, State, Structure,
    TypeError, Value, VarRef,
};
use crate::registers::RegisterError;
use crate::term::{FormalOp, TermError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefParam {
    pub name: Arc<str>,
    pub ty: BasicType,
}

/// Template bodies mirror the operator constructors and add recursive
/// self-calls plus gate application with implicit identity padding.
#[derive(Clone)]
pub enum Template {
    Atom(FormalOp),
    Scale(Expr, Box<Template>),
    Adjoint(Box<Template>),
    Sum(Box<Template>, Box<Template>),
    Product(Box<Template>, Box<Template>),
    Tensor(Box<Template>, Box<Template>),
    /// Call of the enclosing definition.
    SelfCall(Vec<Expr>),
    /// `Apply(gate, state)`: the gate (square signature on a subset of the
    /// state's registers) is tensored with the identity on the remaining
    /// registers and multiplied onto the state.
    Apply(Box<Template>, Box<Template>),
}

/// Native case builder: produces the template from concrete parameter
/// values.
pub type NativeBody =
    Arc<dyn Fn(&Structure, &[Value]) -> Result<Template, UnrollError> + Send + Sync>;

/// A case body: either a fixed template or a native builder producing the
/// template from the concrete parameter values (used where the shape of the
/// body depends on the parameters, e.g. variable-length phase sums).
#[derive(Clone)]
pub enum DefBody {
    Template(Template),
    Native(NativeBody),
}

impl fmt::Debug for DefBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DefBody::Template(_) => write!(f, "Template(..)"),
            DefBody::Native(_) => write!(f, "Native(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DefCase {
    pub guard: Formula,
    pub body: DefBody,
}

/// A named recursive definition with typed classical parameters.
///
/// Guards must be mutually exclusive and exhaustive over the intended
/// parameter region; unrolling checks that exactly one guard holds.
#[derive(Debug)]
pub struct RecursiveDef {
    pub name: Arc<str>,
    pub params: Vec<DefParam>,
    pub cases: Vec<DefCase>,
}

impl PartialEq for RecursiveDef {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.params == other.params
    }
}

#[derive(Debug, Error)]
pub enum UnrollError {
    #[error("{name}({args}): no case guard holds")]
    NoCase { name: String, args: String },
    #[error("{name}({args}): {count} case guards hold simultaneously")]
    AmbiguousCase { name: String, args: String, count: usize },
    #[error("unrolling {0} exceeded the recursion depth cap")]
    Depth(String),
    #[error("apply: gate registers {gate} are not a subset of state registers {state}")]
    ApplyRegisters { gate: String, state: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Register(#[from] RegisterError),
}

impl RecursiveDef {
    /// Unrolls the definition at concrete argument values.
    pub fn unroll(
        self: &Arc<Self>,
        st: &Structure,
        args: &[Value],
    ) -> Result<FormalOp, UnrollError> {
        self.unroll_depth(st, args, st.config.max_unroll)
    }

    fn unroll_depth(
        self: &Arc<Self>,
        st: &Structure,
        args: &[Value],
        depth: usize,
    ) -> Result<FormalOp, UnrollError> {
        if depth == 0 {
            return Err(UnrollError::Depth(self.name.to_string()));
        }
        let show_args = || {
            args.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
        };
        // Bind the parameters in a scratch state to decide the guards.
        let mut scope = State::default();
        for (p, v) in self.params.iter().zip(args) {
            scope = scope.update(p.name.clone(), *v);
        }
        let mut selected = None;
        let mut hits = 0usize;
        for case in &self.cases {
            if satisfies(st, &scope, &case.guard)? {
                hits += 1;
                selected.get_or_insert(case);
            }
        }
        match hits {
            0 => {
                return Err(UnrollError::NoCase { name: self.name.to_string(), args: show_args() })
            }
            1 => {}
            n => {
                return Err(UnrollError::AmbiguousCase {
                    name: self.name.to_string(),
                    args: show_args(),
                    count: n,
                })
            }
        }
        let case = selected.expect("one case selected");
        let bindings: Vec<Binding> = self
            .params
            .iter()
            .zip(args)
            .map(|(p, v)| {
                Binding::var(VarRef { name: p.name.clone(), ty: p.ty }, Expr::Const(*v))
            })
            .collect::<Result<_, _>>()?;
        let template = match &case.body {
            DefBody::Template(t) => t.clone(),
            DefBody::Native(build) => build(st, args)?,
        };
        self.instantiate(st, &template, &bindings, depth)
    }

    fn instantiate(
        self: &Arc<Self>,
        st: &Structure,
        t: &Template,
        bindings: &[Binding],
        depth: usize,
    ) -> Result<FormalOp, UnrollError> {
        Ok(match t {
            Template::Atom(op) => fold_constants(st, &op.subst_classical(bindings))?,
            Template::Scale(c, inner) => {
                let c = fold_expr(st, &crate::classical::subst_expr(c, bindings))?;
                FormalOp::scale(c, self.instantiate(st, inner, bindings, depth)?)?
            }
            Template::Adjoint(inner) => {
                FormalOp::adjoint(self.instantiate(st, inner, bindings, depth)?)
            }
            Template::Sum(a, b) => FormalOp::sum(
                self.instantiate(st, a, bindings, depth)?,
                self.instantiate(st, b, bindings, depth)?,
            )?,
            Template::Product(a, b) => FormalOp::product(
                self.instantiate(st, a, bindings, depth)?,
                self.instantiate(st, b, bindings, depth)?,
            )?,
            Template::Tensor(a, b) => FormalOp::tensor(
                self.instantiate(st, a, bindings, depth)?,
                self.instantiate(st, b, bindings, depth)?,
            ),
            Template::SelfCall(args) => {
                let scope = State::default();
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    let a = crate::classical::subst_expr(a, bindings);
                    // Self-call arguments must be closed after substitution.
                    vals.push(eval_expr(st, &scope, &a)?);
                }
                self.unroll_depth(st, &vals, depth - 1)?
            }
            Template::Apply(gate, state) => {
                let gate = self.instantiate(st, gate, bindings, depth)?;
                let state = self.instantiate(st, state, bindings, depth)?;
                apply_with_padding(gate, state)?
            }
        })
    }
}

/// Tensors `gate` with the identity on the registers of `state` it does not
/// touch, then multiplies it onto `state`. Registers are compared
/// structurally, which is exact here because instantiation folds subscripts
/// to constants.
pub fn apply_with_padding(gate: FormalOp, state: FormalOp) -> Result<FormalOp, UnrollError> {
    let gate_sig = gate.static_signature()?;
    let state_sig = state.static_signature()?;
    let missing: Vec<_> = state_sig
        .dom
        .iter()
        .filter(|q| !gate_sig.cod.contains(q))
        .cloned()
        .collect();
    for q in &gate_sig.cod {
        if !state_sig.dom.contains(q) {
            return Err(UnrollError::ApplyRegisters {
                gate: gate_sig.to_string(),
                state: state_sig.to_string(),
            });
        }
    }
    let padded = if missing.is_empty() {
        gate
    } else {
        let ident = crate::stdlib::gates::identity_on(missing)?;
        FormalOp::tensor(gate, ident)
    };
    Ok(FormalOp::product(padded, state)?)
}

/// Replaces every closed classical expression in the term by its value.
pub fn fold_constants(st: &Structure, op: &FormalOp) -> Result<FormalOp, UnrollError> {
    let fold_ref = |q: &crate::registers::QuantumRef| -> Result<_, UnrollError> {
        let mut indices = Vec::with_capacity(q.indices.len());
        for s in &q.indices {
            indices.push(fold_expr(st, s)?);
        }
        Ok(crate::registers::QuantumRef { decl: q.decl.clone(), indices })
    };
    Ok(match op {
        FormalOp::Scalar(c) => FormalOp::Scalar(fold_expr(st, c)?),
        FormalOp::Ket(s, q) => FormalOp::Ket(fold_expr(st, s)?, fold_ref(q)?),
        FormalOp::Bra(s, q) => FormalOp::Bra(fold_expr(st, s)?, fold_ref(q)?),
        FormalOp::OpVar(d, sig) => FormalOp::OpVar(
            d.clone(),
            crate::term::Signature {
                dom: sig.dom.iter().map(fold_ref).collect::<Result<_, _>>()?,
                cod: sig.cod.iter().map(fold_ref).collect::<Result<_, _>>()?,
            },
        ),
        FormalOp::OpConst(d, params, sig) => FormalOp::OpConst(
            d.clone(),
            params.iter().map(|p| fold_expr(st, p)).collect::<Result<_, _>>()?,
            crate::term::Signature {
                dom: sig.dom.iter().map(fold_ref).collect::<Result<_, _>>()?,
                cod: sig.cod.iter().map(fold_ref).collect::<Result<_, _>>()?,
            },
        ),
        FormalOp::Scale(c, a) => {
            FormalOp::Scale(fold_expr(st, c)?, Box::new(fold_constants(st, a)?))
        }
        FormalOp::Adjoint(a) => FormalOp::Adjoint(Box::new(fold_constants(st, a)?)),
        FormalOp::Sum(a, b) => FormalOp::Sum(
            Box::new(fold_constants(st, a)?),
            Box::new(fold_constants(st, b)?),
        ),
        FormalOp::Product(a, b) => FormalOp::Product(
            Box::new(fold_constants(st, a)?),
            Box::new(fold_constants(st, b)?),
        ),
        FormalOp::Tensor(a, b) => FormalOp::Tensor(
            Box::new(fold_constants(st, a)?),
            Box::new(fold_constants(st, b)?),
        ),
        FormalOp::DefCall(def, args) => FormalOp::DefCall(
            def.clone(),
            args.iter().map(|a| fold_expr(st, a)).collect::<Result<_, _>>()?,
        ),
    })
}

fn fold_expr(st: &Structure, e: &Expr) -> Result<Expr, UnrollError> {
    if let Expr::Const(_) = e {
        return Ok(e.clone());
    }
    if e.vars().is_empty() {
        let v = eval_expr(st, &State::default(), e)?;
        Ok(Expr::Const(v))
    } else {
        Ok(e.clone())
    }
}

/// Expands every definition call in the term under the given state.
pub fn resolve_defs(
    st: &Structure,
    sigma: &State,
    op: &FormalOp,
) -> Result<FormalOp, UnrollError> {
    Ok(match op {
        FormalOp::DefCall(def, args) => {
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval_expr(st, sigma, a)?);
            }
            let unrolled = def.unroll(st, &vals)?;
            // A definition body may reference further definitions.
            resolve_defs(st, sigma, &unrolled)?
        }
        FormalOp::Scale(c, a) => {
            FormalOp::Scale(c.clone(), Box::new(resolve_defs(st, sigma, a)?))
        }
        FormalOp::Adjoint(a) => FormalOp::Adjoint(Box::new(resolve_defs(st, sigma, a)?)),
        FormalOp::Sum(a, b) => FormalOp::Sum(
            Box::new(resolve_defs(st, sigma, a)?),
            Box::new(resolve_defs(st, sigma, b)?),
        ),
        FormalOp::Product(a, b) => FormalOp::Product(
            Box::new(resolve_defs(st, sigma, a)?),
            Box::new(resolve_defs(st, sigma, b)?),
        ),
        FormalOp::Tensor(a, b) => FormalOp::Tensor(
            Box::new(resolve_defs(st, sigma, a)?),
            Box::new(resolve_defs(st, sigma, b)?),
        ),
        _ => op.clone(),
    })
}
