//! Conditional rewrite rules over operator terms.
//!
//! Rule left-hand sides are operator terms with metavariables: an expression
//! variable whose name starts with `?` matches any expression of the
//! position, a register whose base name starts with `?` matches any
//! register, and an operator variable named `?X` matches any subterm. Side
//! conditions are discharged against a concrete state or against a
//! classical theory by enumeration; a rewrite is never applied
//! speculatively.

use std::sync::Arc;

use crate::classical::{
    satisfies, BuiltinOp, DiscreteValue, Expr, Formula, StateSpace, Structure,
};
use crate::exec::{scan, ExecMode, ScanOutcome, Step};
use crate::registers::{QuantumRef, QuantumVarDecl};
use crate::semantics::{eval_operator, Context, QuantumStructure};
use crate::stdlib::gates;
use crate::term::FormalOp;

/// One metavariable substitution discovered by matching.
#[derive(Clone, Debug, Default)]
pub struct MatchBindings {
    pub exprs: Vec<(Arc<str>, Expr)>,
    pub regs: Vec<(Arc<str>, QuantumRef)>,
    pub ops: Vec<(Arc<str>, FormalOp)>,
}

impl MatchBindings {
    fn bind_expr(&mut self, name: &Arc<str>, e: &Expr) -> bool {
        match self.exprs.iter().find(|(n, _)| n == name) {
            Some((_, prev)) => prev == e,
            None => {
                self.exprs.push((name.clone(), e.clone()));
                true
            }
        }
    }

    fn bind_reg(&mut self, name: &Arc<str>, q: &QuantumRef) -> bool {
        match self.regs.iter().find(|(n, _)| n == name) {
            Some((_, prev)) => prev == q,
            None => {
                self.regs.push((name.clone(), q.clone()));
                true
            }
        }
    }

    fn bind_op(&mut self, name: &Arc<str>, t: &FormalOp) -> bool {
        match self.ops.iter().find(|(n, _)| n == name) {
            Some((_, prev)) => prev == t,
            None => {
                self.ops.push((name.clone(), t.clone()));
                true
            }
        }
    }

    pub fn expr(&self, name: &str) -> Option<&Expr> {
        self.exprs.iter().find(|(n, _)| &**n == name).map(|(_, e)| e)
    }

    pub fn reg(&self, name: &str) -> Option<&QuantumRef> {
        self.regs.iter().find(|(n, _)| &**n == name).map(|(_, q)| q)
    }
}

fn is_meta(name: &str) -> bool {
    name.starts_with('?')
}

fn match_expr(pat: &Expr, term: &Expr, b: &mut MatchBindings) -> bool {
    match pat {
        Expr::Var(v) if is_meta(&v.name) => b.bind_expr(&v.name, term),
        _ => pat == term,
    }
}

fn match_reg(pat: &QuantumRef, term: &QuantumRef, b: &mut MatchBindings) -> bool {
    if is_meta(&pat.decl.name) {
        return b.bind_reg(&pat.decl.name, term);
    }
    pat.decl.name == term.decl.name
        && pat.indices.len() == term.indices.len()
        && pat.indices.iter().zip(&term.indices).all(|(p, t)| match_expr(p, t, b))
}

/// Structural one-way matching of a pattern against a term.
pub fn match_term(pat: &FormalOp, term: &FormalOp, b: &mut MatchBindings) -> bool {
    match (pat, term) {
        (FormalOp::OpVar(d, _), t) if is_meta(&d.name) => b.bind_op(&d.name, t),
        (FormalOp::Scalar(p), FormalOp::Scalar(t)) => match_expr(p, t, b),
        (FormalOp::Ket(ps, pq), FormalOp::Ket(ts, tq))
        | (FormalOp::Bra(ps, pq), FormalOp::Bra(ts, tq)) => {
            match_expr(ps, ts, b) && match_reg(pq, tq, b)
        }
        (FormalOp::OpVar(pd, psig), FormalOp::OpVar(td, tsig)) => {
            pd.name == td.name
                && psig.dom.len() == tsig.dom.len()
                && psig.cod.len() == tsig.cod.len()
                && psig.dom.iter().zip(&tsig.dom).all(|(p, t)| match_reg(p, t, b))
                && psig.cod.iter().zip(&tsig.cod).all(|(p, t)| match_reg(p, t, b))
        }
        (FormalOp::OpConst(pd, pp, psig), FormalOp::OpConst(td, tp, tsig)) => {
            pd.name == td.name
                && pp.len() == tp.len()
                && pp.iter().zip(tp).all(|(p, t)| match_expr(p, t, b))
                && psig.dom.len() == tsig.dom.len()
                && psig.cod.len() == tsig.cod.len()
                && psig.dom.iter().zip(&tsig.dom).all(|(p, t)| match_reg(p, t, b))
                && psig.cod.iter().zip(&tsig.cod).all(|(p, t)| match_reg(p, t, b))
        }
        (FormalOp::Scale(pc, pa), FormalOp::Scale(tc, ta)) => {
            match_expr(pc, tc, b) && match_term(pa, ta, b)
        }
        (FormalOp::Adjoint(pa), FormalOp::Adjoint(ta)) => match_term(pa, ta, b),
        (FormalOp::Sum(p1, p2), FormalOp::Sum(t1, t2))
        | (FormalOp::Product(p1, p2), FormalOp::Product(t1, t2))
        | (FormalOp::Tensor(p1, p2), FormalOp::Tensor(t1, t2)) => {
            match_term(p1, t1, b) && match_term(p2, t2, b)
        }
        _ => false,
    }
}

fn instantiate_expr(pat: &Expr, b: &MatchBindings) -> Expr {
    match pat {
        Expr::Var(v) if is_meta(&v.name) => {
            b.expr(&v.name).cloned().unwrap_or_else(|| pat.clone())
        }
        Expr::App(op, args, ty) => Expr::App(
            *op,
            args.iter().map(|a| instantiate_expr(a, b)).collect(),
            *ty,
        ),
        Expr::If(c, t, e) => Expr::If(
            Box::new(instantiate_expr(c, b)),
            Box::new(instantiate_expr(t, b)),
            Box::new(instantiate_expr(e, b)),
        ),
        other => other.clone(),
    }
}

fn instantiate_reg(pat: &QuantumRef, b: &MatchBindings) -> QuantumRef {
    if is_meta(&pat.decl.name) {
        return b.reg(&pat.decl.name).cloned().unwrap_or_else(|| pat.clone());
    }
    QuantumRef {
        decl: pat.decl.clone(),
        indices: pat.indices.iter().map(|e| instantiate_expr(e, b)).collect(),
    }
}

fn instantiate(pat: &FormalOp, b: &MatchBindings) -> FormalOp {
    match pat {
        FormalOp::OpVar(d, _) if is_meta(&d.name) => b
            .ops
            .iter()
            .find(|(n, _)| *n == d.name)
            .map(|(_, t)| t.clone())
            .unwrap_or_else(|| pat.clone()),
        FormalOp::Scalar(e) => FormalOp::Scalar(instantiate_expr(e, b)),
        FormalOp::Ket(s, q) => FormalOp::Ket(instantiate_expr(s, b), instantiate_reg(q, b)),
        FormalOp::Bra(s, q) => FormalOp::Bra(instantiate_expr(s, b), instantiate_reg(q, b)),
        FormalOp::OpVar(d, sig) => FormalOp::OpVar(
            d.clone(),
            crate::term::Signature {
                dom: sig.dom.iter().map(|q| instantiate_reg(q, b)).collect(),
                cod: sig.cod.iter().map(|q| instantiate_reg(q, b)).collect(),
            },
        ),
        FormalOp::OpConst(d, params, sig) => FormalOp::OpConst(
            d.clone(),
            params.iter().map(|p| instantiate_expr(p, b)).collect(),
            crate::term::Signature {
                dom: sig.dom.iter().map(|q| instantiate_reg(q, b)).collect(),
                cod: sig.cod.iter().map(|q| instantiate_reg(q, b)).collect(),
            },
        ),
        FormalOp::Scale(c, a) => {
            FormalOp::Scale(instantiate_expr(c, b), Box::new(instantiate(a, b)))
        }
        FormalOp::Adjoint(a) => FormalOp::Adjoint(Box::new(instantiate(a, b))),
        FormalOp::Sum(x, y) => {
            FormalOp::Sum(Box::new(instantiate(x, b)), Box::new(instantiate(y, b)))
        }
        FormalOp::Product(x, y) => {
            FormalOp::Product(Box::new(instantiate(x, b)), Box::new(instantiate(y, b)))
        }
        FormalOp::Tensor(x, y) => {
            FormalOp::Tensor(Box::new(instantiate(x, b)), Box::new(instantiate(y, b)))
        }
        FormalOp::DefCall(d, args) => FormalOp::DefCall(
            d.clone(),
            args.iter().map(|a| instantiate_expr(a, b)).collect(),
        ),
    }
}

/// Side conditions over matched metavariables.
#[derive(Clone, Debug)]
pub enum SideCondition {
    True,
    /// Bound expressions must be equal.
    ExprEq(&'static str, &'static str),
    /// Bound registers must denote the same subsystem (same base variable
    /// and equal subscripts).
    RegEq(&'static str, &'static str),
    And(Box<SideCondition>, Box<SideCondition>),
}

impl SideCondition {
    pub fn and(a: SideCondition, b: SideCondition) -> SideCondition {
        SideCondition::And(Box::new(a), Box::new(b))
    }

    /// The classical formula expressing this condition under the bindings,
    /// or `None` when it is structurally impossible (different register
    /// bases, incompatible types).
    fn formula(&self, b: &MatchBindings) -> Option<Formula> {
        match self {
            SideCondition::True => Some(Formula::truth(true)),
            SideCondition::ExprEq(x, y) => {
                let (ex, ey) = (b.expr(x)?, b.expr(y)?);
                let eq = Expr::app(BuiltinOp::Eq, vec![ex.clone(), ey.clone()]).ok()?;
                Some(Formula::Atom(eq))
            }
            SideCondition::RegEq(x, y) => {
                let (qx, qy) = (b.reg(x)?, b.reg(y)?);
                if qx.decl.name != qy.decl.name || qx.indices.len() != qy.indices.len() {
                    return None;
                }
                let mut conj = Vec::new();
                for (a, c) in qx.indices.iter().zip(&qy.indices) {
                    let eq = Expr::app(BuiltinOp::Eq, vec![a.clone(), c.clone()]).ok()?;
                    conj.push(Formula::Atom(eq));
                }
                Some(Formula::conj(conj))
            }
            SideCondition::And(a, c) => Some(Formula::and(a.formula(b)?, c.formula(b)?)),
        }
    }
}

#[allow(clippy::type_complexity)]
type NativeRule =
    fn(&RewriteEngine<'_>, &FormalOp) -> Result<Option<FormalOp>, RewriteError>;

enum RuleKind {
    Pattern(Box<PatternRule>),
    Native(NativeRule),
}

struct PatternRule {
    lhs: FormalOp,
    rhs: FormalOp,
    side: SideCondition,
}

/// A named conditional rewrite rule.
pub struct RewriteRule {
    pub name: &'static str,
    kind: RuleKind,
}

#[derive(Debug, thiserror::Error)]
pub enum RewriteError {
    #[error(transparent)]
    Eval(#[from] crate::classical::EvalError),
    #[error(transparent)]
    Operator(#[from] crate::semantics::OperatorError),
    #[error(transparent)]
    Term(#[from] crate::term::TermError),
}

/// Outcome of a rewrite attempt: the (possibly unchanged) term plus whether
/// and why.
#[derive(Debug)]
pub struct RewriteOutcome {
    pub term: FormalOp,
    pub applied: bool,
    pub reason: Option<String>,
}

/// How side conditions are discharged.
pub enum DischargeMode<'a> {
    /// Against one concrete context.
    Concrete(&'a Context),
    /// Against a classical theory, by enumerating all satisfying states.
    Symbolic(&'a [Formula]),
}

pub struct RewriteEngine<'a> {
    pub qs: &'a QuantumStructure,
    pub mode: DischargeMode<'a>,
    pub exec: ExecMode,
}

impl<'a> RewriteEngine<'a> {
    pub fn concrete(qs: &'a QuantumStructure, ctx: &'a Context) -> RewriteEngine<'a> {
        RewriteEngine { qs, mode: DischargeMode::Concrete(ctx), exec: ExecMode::default() }
    }

    pub fn symbolic(qs: &'a QuantumStructure, sigma: &'a [Formula]) -> RewriteEngine<'a> {
        RewriteEngine { qs, mode: DischargeMode::Symbolic(sigma), exec: ExecMode::default() }
    }

    fn context(&self) -> Option<&Context> {
        match self.mode {
            DischargeMode::Concrete(ctx) => Some(ctx),
            DischargeMode::Symbolic(_) => None,
        }
    }

    /// Discharges a classical condition in the current mode.
    pub fn discharge(&self, cond: &Formula) -> Result<bool, RewriteError> {
        match self.mode {
            DischargeMode::Concrete(ctx) => {
                Ok(satisfies(&self.qs.base, &ctx.sigma, cond)?)
            }
            DischargeMode::Symbolic(sigma) => {
                Ok(entails_classically(&self.qs.base, sigma, cond, self.exec)?)
            }
        }
    }

    /// Applies one rule at the first rewritable position (preorder).
    pub fn rewrite_step(
        &self,
        term: &FormalOp,
        rule: &RewriteRule,
    ) -> Result<RewriteOutcome, RewriteError> {
        let mut saw_match = false;
        match self.try_at(term, rule, &mut saw_match)? {
            Some(rewritten) => {
                Ok(RewriteOutcome { term: rewritten, applied: true, reason: None })
            }
            None => Ok(RewriteOutcome {
                term: term.clone(),
                applied: false,
                reason: Some(if saw_match {
                    format!("{}: side condition not dischargeable", rule.name)
                } else {
                    format!("{}: no matching subterm", rule.name)
                }),
            }),
        }
    }

    fn try_at(
        &self,
        term: &FormalOp,
        rule: &RewriteRule,
        saw_match: &mut bool,
    ) -> Result<Option<FormalOp>, RewriteError> {
        if let Some(out) = self.try_here(term, rule, saw_match)? {
            return Ok(Some(out));
        }
        // Recurse into subterms, rebuilding on success.
        macro_rules! descend2 {
            ($ctor:path, $a:expr, $b:expr) => {{
                if let Some(out) = self.try_at($a, rule, saw_match)? {
                    return Ok(Some($ctor(Box::new(out), Box::new((**$b).clone()))));
                }
                if let Some(out) = self.try_at($b, rule, saw_match)? {
                    return Ok(Some($ctor(Box::new((**$a).clone()), Box::new(out))));
                }
                Ok(None)
            }};
        }
        match term {
            FormalOp::Scale(c, a) => {
                if let Some(out) = self.try_at(a, rule, saw_match)? {
                    return Ok(Some(FormalOp::Scale(c.clone(), Box::new(out))));
                }
                Ok(None)
            }
            FormalOp::Adjoint(a) => {
                if let Some(out) = self.try_at(a, rule, saw_match)? {
                    return Ok(Some(FormalOp::Adjoint(Box::new(out))));
                }
                Ok(None)
            }
            FormalOp::Sum(a, b) => descend2!(FormalOp::Sum, a, b),
            FormalOp::Product(a, b) => descend2!(FormalOp::Product, a, b),
            FormalOp::Tensor(a, b) => descend2!(FormalOp::Tensor, a, b),
            _ => Ok(None),
        }
    }

    fn try_here(
        &self,
        term: &FormalOp,
        rule: &RewriteRule,
        saw_match: &mut bool,
    ) -> Result<Option<FormalOp>, RewriteError> {
        match &rule.kind {
            RuleKind::Pattern(rule) => {
                let mut b = MatchBindings::default();
                if !match_term(&rule.lhs, term, &mut b) {
                    return Ok(None);
                }
                *saw_match = true;
                let Some(cond) = rule.side.formula(&b) else {
                    return Ok(None);
                };
                if self.discharge(&cond)? {
                    Ok(Some(instantiate(&rule.rhs, &b)))
                } else {
                    Ok(None)
                }
            }
            RuleKind::Native(f) => {
                let out = f(self, term)?;
                if out.is_some() {
                    *saw_match = true;
                }
                Ok(out)
            }
        }
    }
}

/// Classical entailment `Sigma |= phi` by enumeration over the declared
/// variables; the same state-space machinery that backs the operator-level
/// checker.
pub fn entails_classically(
    st: &Structure,
    sigma: &[Formula],
    goal: &Formula,
    exec: ExecMode,
) -> Result<bool, crate::classical::EvalError> {
    let space = StateSpace::new(st, &Default::default())?;
    let outcome = scan(space.size(), exec, |idx| {
        let state = space.state_at(idx);
        for phi in sigma {
            match satisfies(st, &state, phi) {
                Ok(true) => {}
                Ok(false) => return Step::Skip,
                Err(e) => return Step::Terminal(Err(e)),
            }
        }
        match satisfies(st, &state, goal) {
            Ok(true) => Step::Pass { exact: true },
            Ok(false) => Step::Terminal(Ok(idx)),
            Err(e) => Step::Terminal(Err(e)),
        }
    });
    match outcome {
        ScanOutcome::Terminal { value: Ok(_), .. } => Ok(false),
        ScanOutcome::Terminal { value: Err(e), .. } => Err(e),
        ScanOutcome::Completed { .. } => Ok(true),
    }
}

// ---------------------------------------------------------------------------
// The named rules
// ---------------------------------------------------------------------------

fn meta_reg(name: &'static str) -> QuantumRef {
    QuantumRef {
        decl: Arc::new(QuantumVarDecl {
            name: name.into(),
            arg_types: Vec::new(),
            value_type: crate::classical::BasicType::Bool,
            value_range: None,
        }),
        indices: Vec::new(),
    }
}

fn meta_expr(name: &'static str, ty: crate::classical::BasicType) -> Expr {
    Expr::var(name, ty)
}

/// `a1 |s1>_Q1 + a2 |s2>_Q2  ->  (a1 + a2) |s1>_Q1` when `s1 = s2` and
/// `Q1 = Q2`.
pub fn coefficient_addition() -> RewriteRule {
    use crate::classical::BasicType::{Complex, Int};
    let lhs = FormalOp::Sum(
        Box::new(FormalOp::Scale(
            meta_expr("?a1", Complex),
            Box::new(FormalOp::Ket(meta_expr("?s1", Int), meta_reg("?Q1"))),
        )),
        Box::new(FormalOp::Scale(
            meta_expr("?a2", Complex),
            Box::new(FormalOp::Ket(meta_expr("?s2", Int), meta_reg("?Q2"))),
        )),
    );
    let sum = Expr::App(
        BuiltinOp::Add,
        vec![meta_expr("?a1", Complex), meta_expr("?a2", Complex)],
        Complex,
    );
    let rhs = FormalOp::Scale(
        sum,
        Box::new(FormalOp::Ket(meta_expr("?s1", Int), meta_reg("?Q1"))),
    );
    RewriteRule {
        name: "coefficient-addition",
        kind: RuleKind::Pattern(Box::new(PatternRule {
            lhs,
            rhs,
            side: SideCondition::and(
                SideCondition::ExprEq("?s1", "?s2"),
                SideCondition::RegEq("?Q1", "?Q2"),
            ),
        })),
    }
}

/// `(|s1>_Q1 <s2|_Q2) |s3>_Q3  ->  |s1>_Q1` when `s2 = s3` and `Q2 = Q3`.
pub fn self_outer_product() -> RewriteRule {
    use crate::classical::BasicType::Int;
    let lhs = FormalOp::Product(
        Box::new(FormalOp::Product(
            Box::new(FormalOp::Ket(meta_expr("?s1", Int), meta_reg("?Q1"))),
            Box::new(FormalOp::Bra(meta_expr("?s2", Int), meta_reg("?Q2"))),
        )),
        Box::new(FormalOp::Ket(meta_expr("?s3", Int), meta_reg("?Q3"))),
    );
    let rhs = FormalOp::Ket(meta_expr("?s1", Int), meta_reg("?Q1"));
    RewriteRule {
        name: "self-outer-product",
        kind: RuleKind::Pattern(Box::new(PatternRule {
            lhs,
            rhs,
            side: SideCondition::and(
                SideCondition::ExprEq("?s2", "?s3"),
                SideCondition::RegEq("?Q2", "?Q3"),
            ),
        })),
    }
}

/// A full sum of self-dyads over a register string collapses to the
/// identity: `sum_i |l_i><l_i| -> I` when the labels are pairwise distinct
/// and exhaust the dimension.
pub fn identity_rule() -> RewriteRule {
    RewriteRule { name: "identity", kind: RuleKind::Native(identity_native) }
}

fn identity_native(
    eng: &RewriteEngine<'_>,
    term: &FormalOp,
) -> Result<Option<FormalOp>, RewriteError> {
    let Some(ctx) = eng.context() else {
        return Ok(None);
    };
    // Collect summands
    let mut leaves = Vec::new();
    fn flatten<'t>(t: &'t FormalOp, out: &mut Vec<&'t FormalOp>) {
        match t {
            FormalOp::Sum(a, b) => {
                flatten(a, out);
                flatten(b, out);
            }
            other => out.push(other),
        }
    }
    flatten(term, &mut leaves);
    if leaves.len() < 2 {
        return Ok(None);
    }
    // Every leaf must be a self-dyad |l>_regs <l|_regs over one register
    // string.
    let mut regs: Option<Vec<QuantumRef>> = None;
    let mut label_tuples: Vec<Vec<DiscreteValue>> = Vec::new();
    for leaf in &leaves {
        let FormalOp::Product(k, b) = leaf else {
            return Ok(None);
        };
        let (kets, ket_regs) = collect_ket_factors(k)?;
        let (bras, bra_regs) = collect_bra_factors(b)?;
        if ket_regs != bra_regs || ket_regs.is_empty() {
            return Ok(None);
        }
        match &regs {
            None => regs = Some(ket_regs.clone()),
            Some(r) if *r == ket_regs => {}
            _ => return Ok(None),
        }
        let mut tuple = Vec::new();
        for (ke, be) in kets.iter().zip(&bras) {
            let kv = crate::classical::eval_expr(&eng.qs.base, &ctx.sigma, ke)?;
            let bv = crate::classical::eval_expr(&eng.qs.base, &ctx.sigma, be)?;
            if !kv.approx_eq(&bv, eng.qs.base.config.tol) {
                return Ok(None);
            }
            let Some(d) = kv.to_discrete() else { return Ok(None) };
            tuple.push(d);
        }
        label_tuples.push(tuple);
    }
    let regs = regs.expect("at least one leaf");
    // Labels pairwise distinct and exhausting the dimension.
    let mut sorted = label_tuples.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != label_tuples.len() {
        return Ok(None);
    }
    let dim: usize = {
        let mut d = 1usize;
        for q in &regs {
            let Ok(dom) = q.decl.value_domain(&eng.qs.base) else { return Ok(None) };
            d *= dom.size();
        }
        d
    };
    if label_tuples.len() != dim {
        return Ok(None);
    }
    Ok(Some(gates::identity_on(regs)?))
}

fn collect_ket_factors(
    t: &FormalOp,
) -> Result<(Vec<Expr>, Vec<QuantumRef>), RewriteError> {
    let mut labels = Vec::new();
    let mut regs = Vec::new();
    fn rec(t: &FormalOp, labels: &mut Vec<Expr>, regs: &mut Vec<QuantumRef>) -> bool {
        match t {
            FormalOp::Ket(s, q) => {
                labels.push(s.clone());
                regs.push(q.clone());
                true
            }
            FormalOp::Tensor(a, b) => rec(a, labels, regs) && rec(b, labels, regs),
            _ => false,
        }
    }
    if rec(t, &mut labels, &mut regs) {
        Ok((labels, regs))
    } else {
        Ok((Vec::new(), Vec::new()))
    }
}

fn collect_bra_factors(
    t: &FormalOp,
) -> Result<(Vec<Expr>, Vec<QuantumRef>), RewriteError> {
    let mut labels = Vec::new();
    let mut regs = Vec::new();
    fn rec(t: &FormalOp, labels: &mut Vec<Expr>, regs: &mut Vec<QuantumRef>) -> bool {
        match t {
            FormalOp::Bra(s, q) => {
                labels.push(s.clone());
                regs.push(q.clone());
                true
            }
            FormalOp::Tensor(a, b) => rec(a, labels, regs) && rec(b, labels, regs),
            _ => false,
        }
    }
    if rec(t, &mut labels, &mut regs) {
        Ok((labels, regs))
    } else {
        Ok((Vec::new(), Vec::new()))
    }
}

/// Expands an opaque operator variable/constant into its dyad matrix
/// representation under the current context.
pub fn matrix_representation() -> RewriteRule {
    RewriteRule { name: "matrix-representation", kind: RuleKind::Native(matrix_rep_native) }
}

fn matrix_rep_native(
    eng: &RewriteEngine<'_>,
    term: &FormalOp,
) -> Result<Option<FormalOp>, RewriteError> {
    if !matches!(term, FormalOp::OpVar(_, _) | FormalOp::OpConst(_, _, _)) {
        return Ok(None);
    }
    let Some(ctx) = eng.context() else {
        return Ok(None);
    };
    let e = match eval_operator(eng.qs, ctx, term) {
        Ok(e) => e,
        Err(err) if err.is_resource() => return Err(err.into()),
        Err(_) => return Ok(None),
    };
    let tol = eng.qs.base.config.tol;
    let mut acc: Option<FormalOp> = None;
    for i in 0..e.mat.rows() {
        for j in 0..e.mat.cols() {
            let v = e.mat.get(i, j);
            if v.norm() <= tol {
                continue;
            }
            let kets = dyad_side(&e.dom, i, true)?;
            let bras = dyad_side(&e.cod, j, false)?;
            let dyad = match (kets, bras) {
                (Some(k), Some(b)) => FormalOp::product(k, b)?,
                (Some(k), None) => k,
                (None, Some(b)) => b,
                (None, None) => FormalOp::scalar(Expr::real(1.0))?,
            };
            let scaled = FormalOp::scale(Expr::complex(v.re, v.im), dyad)?;
            acc = Some(match acc {
                None => scaled,
                Some(t) => FormalOp::sum(t, scaled)?,
            });
        }
    }
    match acc {
        Some(t) => Ok(Some(t)),
        None => {
            // The zero operator: 0 . original.
            Ok(Some(FormalOp::scale(Expr::real(0.0), term.clone())?))
        }
    }
}

fn dyad_side(
    regs: &[crate::registers::GroundRef],
    mut idx: usize,
    ket: bool,
) -> Result<Option<FormalOp>, RewriteError> {
    if regs.is_empty() {
        return Ok(None);
    }
    let mut labels = vec![DiscreteValue::Bool(false); regs.len()];
    for (slot, r) in labels.iter_mut().zip(regs).rev() {
        let d = r.dim();
        *slot = r.domain.value_at(idx % d);
        idx /= d;
    }
    let mut acc: Option<FormalOp> = None;
    for (r, l) in regs.iter().zip(&labels) {
        let e = Expr::Const((*l).into());
        let atom = if ket {
            FormalOp::ket(e, r.to_quantum_ref())?
        } else {
            FormalOp::bra(e, r.to_quantum_ref())?
        };
        acc = Some(match acc {
            None => atom,
            Some(t) => FormalOp::tensor(t, atom),
        });
    }
    Ok(acc)
}

/// The four named rules.
pub fn builtin_rules() -> Vec<RewriteRule> {
    vec![
        coefficient_addition(),
        self_outer_product(),
        identity_rule(),
        matrix_representation(),
    ]
}
