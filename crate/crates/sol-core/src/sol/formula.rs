//! Operator-level logical formulas.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::classical::{Binding, Expr, SubstTarget, VarRef};
use crate::registers::QuantumRef;
use crate::semantics::PredicateKind;
use crate::term::{FormalOp, OpVarDecl, TermError};

/// Comparison relation for norm/trace atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolRel {
    Eq,
    Lt,
    Gt,
}

impl SolRel {
    pub fn symbol(self) -> &'static str {
        match self {
            SolRel::Eq => "=",
            SolRel::Lt => "<",
            SolRel::Gt => ">",
        }
    }
}

/// A formula over operators. `Or`, `Implies` and the existential quantifiers
/// are derived forms, desugared by the constructors below.
#[derive(Clone, Debug, PartialEq)]
pub enum SolFormula {
    /// `norm(A) rel c` for a real literal `c`.
    NormCmp { op: FormalOp, rel: SolRel, bound: f64 },
    /// `tr(A) rel c` for a complex literal `c`.
    TraceCmp { op: FormalOp, rel: SolRel, bound: Complex64 },
    /// `pure(A):q̄`, `mixed(A):q̄`, `unitary(A):q̄`, `obs(A):q̄`.
    Pred { kind: PredicateKind, op: FormalOp, regs: Vec<QuantumRef> },
    /// `A == B`.
    OpEq(FormalOp, FormalOp),
    /// `A <= B` in the Löwner order.
    OpLeq(FormalOp, FormalOp),
    Not(Box<SolFormula>),
    And(Box<SolFormula>, Box<SolFormula>),
    ForallVar(VarRef, Box<SolFormula>),
    ForallOp(Arc<OpVarDecl>, Box<SolFormula>),
}

impl SolFormula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: SolFormula) -> SolFormula {
        SolFormula::Not(Box::new(f))
    }

    pub fn and(a: SolFormula, b: SolFormula) -> SolFormula {
        SolFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: SolFormula, b: SolFormula) -> SolFormula {
        SolFormula::not(SolFormula::and(SolFormula::not(a), SolFormula::not(b)))
    }

    pub fn implies(a: SolFormula, b: SolFormula) -> SolFormula {
        SolFormula::not(SolFormula::and(a, SolFormula::not(b)))
    }

    pub fn forall_var(v: VarRef, f: SolFormula) -> SolFormula {
        SolFormula::ForallVar(v, Box::new(f))
    }

    pub fn forall_op(x: Arc<OpVarDecl>, f: SolFormula) -> SolFormula {
        SolFormula::ForallOp(x, Box::new(f))
    }

    pub fn exists_var(v: VarRef, f: SolFormula) -> SolFormula {
        SolFormula::not(SolFormula::forall_var(v, SolFormula::not(f)))
    }

    pub fn exists_op(x: Arc<OpVarDecl>, f: SolFormula) -> SolFormula {
        SolFormula::not(SolFormula::forall_op(x, SolFormula::not(f)))
    }

    pub fn conj(mut fs: Vec<SolFormula>) -> Option<SolFormula> {
        match fs.len() {
            0 => None,
            1 => fs.pop(),
            _ => {
                let mut it = fs.into_iter();
                let first = it.next().unwrap();
                Some(it.fold(first, SolFormula::and))
            }
        }
    }

    fn atoms(&self, out: &mut Vec<FormalOp>) {
        match self {
            SolFormula::NormCmp { op, .. } | SolFormula::TraceCmp { op, .. } => {
                out.push(op.clone())
            }
            SolFormula::Pred { op, .. } => out.push(op.clone()),
            SolFormula::OpEq(a, b) | SolFormula::OpLeq(a, b) => {
                out.push(a.clone());
                out.push(b.clone());
            }
            SolFormula::Not(f) => f.atoms(out),
            SolFormula::And(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
            SolFormula::ForallVar(_, f) | SolFormula::ForallOp(_, f) => f.atoms(out),
        }
    }

    /// Free classical variables of the formula.
    pub fn free_classical_vars(&self) -> BTreeSet<Arc<str>> {
        fn walk(f: &SolFormula, out: &mut BTreeSet<Arc<str>>) {
            match f {
                SolFormula::Not(g) => walk(g, out),
                SolFormula::And(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                SolFormula::ForallVar(v, g) => {
                    let mut inner = BTreeSet::new();
                    walk(g, &mut inner);
                    inner.remove(&v.name);
                    out.extend(inner);
                }
                SolFormula::ForallOp(_, g) => walk(g, out),
                atom => {
                    let mut ops = Vec::new();
                    atom.atoms(&mut ops);
                    for op in ops {
                        out.extend(op.free_classical_vars());
                    }
                    if let SolFormula::Pred { regs, .. } = atom {
                        for q in regs {
                            for s in &q.indices {
                                s.collect_vars(out);
                            }
                        }
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }

    /// Free operator variables, with their declarations.
    pub fn free_operator_vars(&self) -> Vec<Arc<OpVarDecl>> {
        fn collect_decls(op: &FormalOp, out: &mut Vec<Arc<OpVarDecl>>) {
            match op {
                FormalOp::OpVar(d, _) => {
                    if !out.iter().any(|x| x == d) {
                        out.push(d.clone());
                    }
                }
                FormalOp::Scale(_, a) | FormalOp::Adjoint(a) => collect_decls(a, out),
                FormalOp::Sum(a, b) | FormalOp::Product(a, b) | FormalOp::Tensor(a, b) => {
                    collect_decls(a, out);
                    collect_decls(b, out);
                }
                _ => {}
            }
        }
        fn walk(f: &SolFormula, bound: &mut Vec<Arc<str>>, out: &mut Vec<Arc<OpVarDecl>>) {
            match f {
                SolFormula::Not(g) => walk(g, bound, out),
                SolFormula::And(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
                SolFormula::ForallVar(_, g) => walk(g, bound, out),
                SolFormula::ForallOp(x, g) => {
                    bound.push(x.name.clone());
                    walk(g, bound, out);
                    bound.pop();
                }
                atom => {
                    let mut ops = Vec::new();
                    atom.atoms(&mut ops);
                    let mut decls = Vec::new();
                    for op in &ops {
                        collect_decls(op, &mut decls);
                    }
                    for d in decls {
                        if !bound.contains(&d.name) && !out.iter().any(|x| x == &d) {
                            out.push(d);
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// All operator variable declarations occurring in the formula, bound or
    /// free (used to prepare sample sets).
    pub fn all_operator_vars(&self) -> Vec<Arc<OpVarDecl>> {
        fn walk(f: &SolFormula, out: &mut Vec<Arc<OpVarDecl>>) {
            let mut push = |d: &Arc<OpVarDecl>| {
                if !out.iter().any(|x| x == d) {
                    out.push(d.clone());
                }
            };
            match f {
                SolFormula::Not(g) => walk(g, out),
                SolFormula::And(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                SolFormula::ForallVar(_, g) => walk(g, out),
                SolFormula::ForallOp(x, g) => {
                    push(x);
                    walk(g, out);
                }
                atom => {
                    let mut ops = Vec::new();
                    atom.atoms(&mut ops);
                    for op in &ops {
                        for d in op_decls(op) {
                            push(&d);
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

fn op_decls(op: &FormalOp) -> Vec<Arc<OpVarDecl>> {
    let mut out = Vec::new();
    fn rec(op: &FormalOp, out: &mut Vec<Arc<OpVarDecl>>) {
        match op {
            FormalOp::OpVar(d, _) => {
                if !out.iter().any(|x| x == d) {
                    out.push(d.clone());
                }
            }
            FormalOp::Scale(_, a) | FormalOp::Adjoint(a) => rec(a, out),
            FormalOp::Sum(a, b) | FormalOp::Product(a, b) | FormalOp::Tensor(a, b) => {
                rec(a, out);
                rec(b, out);
            }
            _ => {}
        }
    }
    rec(op, &mut out);
    out
}

/// Simultaneous substitution on SOL formulas: classical bindings plus
/// operator replacements, with alpha-conversion at both binder kinds.
pub fn subst_sol(
    f: &SolFormula,
    bindings: &[Binding],
    op_substs: &[(Arc<OpVarDecl>, FormalOp)],
) -> Result<SolFormula, TermError> {
    let subst_op = |op: &FormalOp| -> Result<FormalOp, TermError> {
        let mut out = op.subst_classical(bindings);
        for (x, b) in op_substs {
            out = out.subst_operator(b, x)?;
        }
        Ok(out)
    };
    Ok(match f {
        SolFormula::NormCmp { op, rel, bound } => {
            SolFormula::NormCmp { op: subst_op(op)?, rel: *rel, bound: *bound }
        }
        SolFormula::TraceCmp { op, rel, bound } => {
            SolFormula::TraceCmp { op: subst_op(op)?, rel: *rel, bound: *bound }
        }
        SolFormula::Pred { kind, op, regs } => SolFormula::Pred {
            kind: *kind,
            op: subst_op(op)?,
            regs: regs.iter().map(|q| q.subst(bindings)).collect(),
        },
        SolFormula::OpEq(a, b) => SolFormula::OpEq(subst_op(a)?, subst_op(b)?),
        SolFormula::OpLeq(a, b) => SolFormula::OpLeq(subst_op(a)?, subst_op(b)?),
        SolFormula::Not(g) => SolFormula::not(subst_sol(g, bindings, op_substs)?),
        SolFormula::And(a, b) => SolFormula::and(
            subst_sol(a, bindings, op_substs)?,
            subst_sol(b, bindings, op_substs)?,
        ),
        SolFormula::ForallVar(y, body) => {
            // Bindings for the bound variable are shadowed.
            let live: Vec<Binding> = bindings
                .iter()
                .filter(|b| !matches!(&b.target, SubstTarget::Var(x) if x.name == y.name))
                .cloned()
                .collect();
            // Capture check: the bound name must not occur in any
            // replacement expression or replacement operator.
            let captured = live.iter().any(|b| b.replacement.vars().contains(&y.name))
                || op_substs.iter().any(|(_, b)| b.free_classical_vars().contains(&y.name));
            if captured {
                let fresh: Arc<str> = format!("{}'", y.name).into();
                let fresh_ref = VarRef { name: fresh, ty: y.ty };
                let rename = Binding::var(y.clone(), Expr::Var(fresh_ref.clone()))
                    .expect("renaming preserves the type");
                let body = subst_sol(body, &[rename], &[])?;
                SolFormula::forall_var(fresh_ref, subst_sol(&body, &live, op_substs)?)
            } else {
                SolFormula::forall_var(y.clone(), subst_sol(body, &live, op_substs)?)
            }
        }
        SolFormula::ForallOp(x, body) => {
            let live: Vec<(Arc<OpVarDecl>, FormalOp)> = op_substs
                .iter()
                .filter(|(d, _)| d.name != x.name)
                .cloned()
                .collect();
            let captured =
                live.iter().any(|(_, b)| b.free_operator_vars().contains(&x.name));
            if captured {
                let fresh = Arc::new(OpVarDecl {
                    name: format!("{}'", x.name).into(),
                    dom: x.dom.clone(),
                    cod: x.cod.clone(),
                });
                let body = rename_opvar(body, &x.name, &fresh);
                SolFormula::forall_op(fresh, subst_sol(&body, bindings, &live)?)
            } else {
                SolFormula::forall_op(x.clone(), subst_sol(body, bindings, &live)?)
            }
        }
    })
}

fn rename_opvar_in_op(op: &FormalOp, old: &str, fresh: &Arc<OpVarDecl>) -> FormalOp {
    match op {
        FormalOp::OpVar(d, sig) if &*d.name == old => FormalOp::OpVar(fresh.clone(), sig.clone()),
        FormalOp::Scale(c, a) => {
            FormalOp::Scale(c.clone(), Box::new(rename_opvar_in_op(a, old, fresh)))
        }
        FormalOp::Adjoint(a) => FormalOp::Adjoint(Box::new(rename_opvar_in_op(a, old, fresh))),
        FormalOp::Sum(a, b) => FormalOp::Sum(
            Box::new(rename_opvar_in_op(a, old, fresh)),
            Box::new(rename_opvar_in_op(b, old, fresh)),
        ),
        FormalOp::Product(a, b) => FormalOp::Product(
            Box::new(rename_opvar_in_op(a, old, fresh)),
            Box::new(rename_opvar_in_op(b, old, fresh)),
        ),
        FormalOp::Tensor(a, b) => FormalOp::Tensor(
            Box::new(rename_opvar_in_op(a, old, fresh)),
            Box::new(rename_opvar_in_op(b, old, fresh)),
        ),
        other => other.clone(),
    }
}

fn rename_opvar(f: &SolFormula, old: &str, fresh: &Arc<OpVarDecl>) -> SolFormula {
    match f {
        SolFormula::NormCmp { op, rel, bound } => SolFormula::NormCmp {
            op: rename_opvar_in_op(op, old, fresh),
            rel: *rel,
            bound: *bound,
        },
        SolFormula::TraceCmp { op, rel, bound } => SolFormula::TraceCmp {
            op: rename_opvar_in_op(op, old, fresh),
            rel: *rel,
            bound: *bound,
        },
        SolFormula::Pred { kind, op, regs } => SolFormula::Pred {
            kind: *kind,
            op: rename_opvar_in_op(op, old, fresh),
            regs: regs.clone(),
        },
        SolFormula::OpEq(a, b) => SolFormula::OpEq(
            rename_opvar_in_op(a, old, fresh),
            rename_opvar_in_op(b, old, fresh),
        ),
        SolFormula::OpLeq(a, b) => SolFormula::OpLeq(
            rename_opvar_in_op(a, old, fresh),
            rename_opvar_in_op(b, old, fresh),
        ),
        SolFormula::Not(g) => SolFormula::not(rename_opvar(g, old, fresh)),
        SolFormula::And(a, b) => {
            SolFormula::and(rename_opvar(a, old, fresh), rename_opvar(b, old, fresh))
        }
        SolFormula::ForallVar(v, g) => {
            SolFormula::forall_var(v.clone(), rename_opvar(g, old, fresh))
        }
        SolFormula::ForallOp(x, g) if &*x.name == old => {
            SolFormula::forall_op(x.clone(), (**g).clone())
        }
        SolFormula::ForallOp(x, g) => {
            SolFormula::forall_op(x.clone(), rename_opvar(g, old, fresh))
        }
    }
}

fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{:?}", c.re)
    } else if c.re == 0.0 {
        format!("{:?}i", c.im)
    } else if c.im < 0.0 {
        format!("({:?}-{:?}i)", c.re, -c.im)
    } else {
        format!("({:?}+{:?}i)", c.re, c.im)
    }
}

impl SolFormula {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>,
                    p: u8,
                    inner: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
            if p < min {
                write!(f, "(")?;
                inner(f)?;
                write!(f, ")")
            } else {
                inner(f)
            }
        };
        match self {
            SolFormula::NormCmp { op, rel, bound } => {
                write!(f, "norm({op}) {} {:?}", rel.symbol(), bound)
            }
            SolFormula::TraceCmp { op, rel, bound } => {
                write!(f, "tr({op}) {} {}", rel.symbol(), fmt_complex(*bound))
            }
            SolFormula::Pred { kind, op, regs } => {
                write!(f, "{}({op}):", kind.name())?;
                for (i, q) in regs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{q}")?;
                }
                Ok(())
            }
            SolFormula::OpEq(a, b) => wrap(f, 2, &|f| write!(f, "{a} == {b}")),
            SolFormula::OpLeq(a, b) => wrap(f, 2, &|f| write!(f, "{a} <= {b}")),
            SolFormula::Not(g) => wrap(f, 3, &|f| {
                write!(f, "!")?;
                g.fmt_prec(f, 4)
            }),
            SolFormula::And(a, b) => wrap(f, 1, &|f| {
                a.fmt_prec(f, 2)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 2)
            }),
            SolFormula::ForallVar(v, g) => wrap(f, 0, &|f| {
                write!(f, "forall {}:{} . ", v.name, v.ty)?;
                g.fmt_prec(f, 0)
            }),
            SolFormula::ForallOp(x, g) => wrap(f, 0, &|f| {
                write!(f, "forallOp {} . ", x.name)?;
                g.fmt_prec(f, 0)
            }),
        }
    }
}

impl fmt::Display for SolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
