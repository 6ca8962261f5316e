//! First-order formulas, satisfaction and substitution.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::expr::{ArrayRef, BuiltinOp, EvalError, Expr, TypeError, VarRef};
use super::structure::{eval_expr, State, Structure};
use super::value::BasicType;

/// A first-order formula. Atoms are Bool-typed expressions, which covers
/// predicate symbols applied to argument expressions.
#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    Atom(Expr),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(VarRef, Box<Formula>),
    Exists(VarRef, Box<Formula>),
}

impl Formula {
    pub fn atom(e: Expr) -> Result<Formula, TypeError> {
        if e.ty() != BasicType::Bool {
            return Err(TypeError::Mismatch { expected: BasicType::Bool, actual: e.ty() });
        }
        Ok(Formula::Atom(e))
    }

    pub fn truth(b: bool) -> Formula {
        Formula::Atom(Expr::bool(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: VarRef, f: Formula) -> Formula {
        Formula::Forall(v, Box::new(f))
    }

    pub fn exists(v: VarRef, f: Formula) -> Formula {
        Formula::Exists(v, Box::new(f))
    }

    /// Conjunction of a list; empty list is `true`.
    pub fn conj(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::truth(true),
            1 => fs.pop().unwrap(),
            _ => {
                let mut it = fs.into_iter();
                let first = it.next().unwrap();
                it.fold(first, Formula::and)
            }
        }
    }

    /// Disjunction of a list; empty list is `false`.
    pub fn disj(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => Formula::truth(false),
            1 => fs.pop().unwrap(),
            _ => {
                let mut it = fs.into_iter();
                let first = it.next().unwrap();
                it.fold(first, Formula::or)
            }
        }
    }

    /// Free variables (simple and array names).
    pub fn free(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::Atom(e) => e.collect_vars(out),
            Formula::Not(f) => f.collect_free(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                let mut inner = BTreeSet::new();
                f.collect_free(&mut inner);
                inner.remove(&v.name);
                out.extend(inner);
            }
        }
    }

    /// All variable names, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_all(&mut out);
        out
    }

    fn collect_all(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::Atom(e) => e.collect_vars(out),
            Formula::Not(f) => f.collect_all(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_all(out);
                b.collect_all(out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                out.insert(v.name.clone());
                f.collect_all(out);
            }
        }
    }
}

/// The satisfaction relation `sigma |= phi`. Quantifiers enumerate the
/// domain of the bound variable's type and short-circuit on the first
/// decisive element.
pub fn satisfies(st: &Structure, sigma: &State, phi: &Formula) -> Result<bool, EvalError> {
    match phi {
        Formula::Atom(e) => {
            let v = eval_expr(st, sigma, e)?;
            v.as_bool().ok_or_else(|| EvalError::IllTyped(e.to_string()))
        }
        Formula::Not(f) => Ok(!satisfies(st, sigma, f)?),
        Formula::And(a, b) => Ok(satisfies(st, sigma, a)? && satisfies(st, sigma, b)?),
        Formula::Or(a, b) => Ok(satisfies(st, sigma, a)? || satisfies(st, sigma, b)?),
        Formula::Implies(a, b) => Ok(!satisfies(st, sigma, a)? || satisfies(st, sigma, b)?),
        Formula::Forall(v, f) => {
            let dom = st
                .domain_of_var(v)
                .ok_or_else(|| EvalError::UnsupportedQuantifier(v.name.to_string()))?;
            for d in dom.iter() {
                let updated = sigma.update(v.name.clone(), d.into());
                if !satisfies(st, &updated, f)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Exists(v, f) => {
            let dom = st
                .domain_of_var(v)
                .ok_or_else(|| EvalError::UnsupportedQuantifier(v.name.to_string()))?;
            for d in dom.iter() {
                let updated = sigma.update(v.name.clone(), d.into());
                if satisfies(st, &updated, f)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// The target of a substitution: a simple variable or a subscripted array
/// cell `a[s1,...,sm]`.
#[derive(Clone, Debug, PartialEq)]
pub enum SubstTarget {
    Var(VarRef),
    Cell(ArrayRef, Vec<Expr>),
}

impl SubstTarget {
    pub fn ty(&self) -> BasicType {
        match self {
            SubstTarget::Var(v) => v.ty,
            SubstTarget::Cell(a, _) => a.ty.value,
        }
    }

    fn name(&self) -> &Arc<str> {
        match self {
            SubstTarget::Var(v) => &v.name,
            SubstTarget::Cell(a, _) => &a.name,
        }
    }
}

impl fmt::Display for SubstTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubstTarget::Var(v) => write!(f, "{}", v.name),
            SubstTarget::Cell(a, subs) => {
                write!(f, "{}[", a.name)?;
                for (i, s) in subs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// One component `t/x` of a simultaneous substitution.
#[derive(Clone, Debug)]
pub struct Binding {
    pub target: SubstTarget,
    pub replacement: Expr,
}

impl Binding {
    pub fn new(target: SubstTarget, replacement: Expr) -> Result<Binding, TypeError> {
        if target.ty() != replacement.ty() {
            return Err(TypeError::SubstType {
                target: target.to_string(),
                expected: target.ty(),
                actual: replacement.ty(),
            });
        }
        Ok(Binding { target, replacement })
    }

    pub fn var(v: VarRef, replacement: Expr) -> Result<Binding, TypeError> {
        Binding::new(SubstTarget::Var(v), replacement)
    }
}

/// Simultaneous substitution `s[t̄/x̄]` on expressions.
pub fn subst_expr(s: &Expr, bindings: &[Binding]) -> Expr {
    match s {
        Expr::Var(v) => {
            for b in bindings {
                if let SubstTarget::Var(x) = &b.target {
                    if x.name == v.name {
                        return b.replacement.clone();
                    }
                }
            }
            s.clone()
        }
        Expr::Const(_) => s.clone(),
        Expr::App(op, args, ty) => {
            let args = args.iter().map(|a| subst_expr(a, bindings)).collect();
            Expr::App(*op, args, *ty)
        }
        Expr::Index(a, subs) => {
            let new_subs: Vec<Expr> = subs.iter().map(|e| subst_expr(e, bindings)).collect();
            // Subscripted targets over the same array turn the lookup into a
            // conditional: if the (substituted) subscripts coincide with the
            // target cell, the replacement is read instead.
            let mut out = Expr::Index(a.clone(), new_subs.clone());
            for b in bindings.iter().rev() {
                if let SubstTarget::Cell(a2, target_subs) = &b.target {
                    if a2.name == a.name {
                        let mut eqs = Vec::new();
                        for (ns, ts) in new_subs.iter().zip(target_subs) {
                            eqs.push(
                                Expr::app(BuiltinOp::Eq, vec![ns.clone(), ts.clone()])
                                    .expect("subscript types align"),
                            );
                        }
                        let guard = eqs
                            .into_iter()
                            .reduce(|x, y| {
                                Expr::app(BuiltinOp::And, vec![x, y]).expect("bool operands")
                            })
                            .unwrap_or_else(|| Expr::bool(true));
                        out = Expr::ite(guard, b.replacement.clone(), out)
                            .expect("branch types align");
                    }
                }
            }
            out
        }
        Expr::If(c, t, e) => Expr::If(
            Box::new(subst_expr(c, bindings)),
            Box::new(subst_expr(t, bindings)),
            Box::new(subst_expr(e, bindings)),
        ),
    }
}

fn fresh_name(base: &str, avoid: &BTreeSet<Arc<str>>) -> Arc<str> {
    let mut candidate = format!("{base}'");
    while avoid.contains(candidate.as_str()) {
        candidate.push('\'');
    }
    candidate.into()
}

/// Simultaneous substitution on formulas with capture-avoiding renaming of
/// quantified variables.
pub fn subst_formula(phi: &Formula, bindings: &[Binding]) -> Formula {
    match phi {
        Formula::Atom(e) => Formula::Atom(subst_expr(e, bindings)),
        Formula::Not(f) => Formula::not(subst_formula(f, bindings)),
        Formula::And(a, b) => {
            Formula::and(subst_formula(a, bindings), subst_formula(b, bindings))
        }
        Formula::Or(a, b) => Formula::or(subst_formula(a, bindings), subst_formula(b, bindings)),
        Formula::Implies(a, b) => {
            Formula::implies(subst_formula(a, bindings), subst_formula(b, bindings))
        }
        Formula::Forall(y, f) => {
            let (y, f, live) = rename_binder(y, f, bindings);
            Formula::Forall(y, Box::new(subst_formula(&f, &live)))
        }
        Formula::Exists(y, f) => {
            let (y, f, live) = rename_binder(y, f, bindings);
            Formula::Exists(y, Box::new(subst_formula(&f, &live)))
        }
    }
}

/// Drops bindings shadowed by the binder and renames the bound variable when
/// it would capture a variable of some replacement.
fn rename_binder(y: &VarRef, body: &Formula, bindings: &[Binding]) -> (VarRef, Formula, Vec<Binding>) {
    let live: Vec<Binding> = bindings
        .iter()
        .filter(|b| !matches!(&b.target, SubstTarget::Var(x) if x.name == y.name))
        .cloned()
        .collect();
    let needs_rename = live.iter().any(|b| {
        let mut vars = b.replacement.vars();
        if let SubstTarget::Cell(_, subs) = &b.target {
            for s in subs {
                s.collect_vars(&mut vars);
            }
        }
        vars.contains(&y.name)
    });
    if !needs_rename {
        return (y.clone(), body.clone(), live);
    }
    let mut avoid = body.all_vars();
    for b in &live {
        avoid.extend(b.replacement.vars());
        avoid.insert(b.target.name().clone());
    }
    avoid.insert(y.name.clone());
    let fresh = fresh_name(&y.name, &avoid);
    let fresh_ref = VarRef { name: fresh, ty: y.ty };
    let renaming = [Binding {
        target: SubstTarget::Var(y.clone()),
        replacement: Expr::Var(fresh_ref.clone()),
    }];
    let body = subst_formula(body, &renaming);
    (fresh_ref, body, live)
}

impl Formula {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = |f: &mut fmt::Formatter<'_>, p: u8, inner: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
            if p < min {
                write!(f, "(")?;
                inner(f)?;
                write!(f, ")")
            } else {
                inner(f)
            }
        };
        match self {
            Formula::Atom(e) => write!(f, "{e}"),
            Formula::Not(inner) => paren(f, 4, &|f| {
                write!(f, "!")?;
                inner.fmt_prec(f, 5)
            }),
            Formula::And(a, b) => paren(f, 3, &|f| {
                a.fmt_prec(f, 3)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 4)
            }),
            Formula::Or(a, b) => paren(f, 2, &|f| {
                a.fmt_prec(f, 2)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 3)
            }),
            Formula::Implies(a, b) => paren(f, 1, &|f| {
                a.fmt_prec(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 1)
            }),
            Formula::Forall(v, inner) => paren(f, 0, &|f| {
                write!(f, "forall {}:{} . ", v.name, v.ty)?;
                inner.fmt_prec(f, 0)
            }),
            Formula::Exists(v, inner) => paren(f, 0, &|f| {
                write!(f, "exists {}:{} . ", v.name, v.ty)?;
                inner.fmt_prec(f, 0)
            }),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
