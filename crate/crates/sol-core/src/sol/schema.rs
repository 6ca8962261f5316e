//! Axiom and schema suites: the quantifier-instantiation and distribution
//! schemas, the state/unitary/observable axiom table, the deduction-theorem
//! metamorphic check, the substitution-theorem check, and the executable
//! forms of the matrix definitions of unitarity and Hermiticity.

use std::sync::Arc;

use num_complex::Complex64;

use crate::classical::{
    eval_expr, BasicType, Binding, Expr, Formula, State, Structure, Value, VarRef,
};
use crate::config::Config;
use crate::randgen::{self, Gen, OpPool};
use crate::registers::{QuantumRef, QuantumVarDecl};
use crate::report::SuiteReport;
use crate::semantics::{Context, PredicateKind, QuantumStructure, Valuation};
use crate::stdlib::gates;
use crate::term::{FormalOp, OpVarDecl, Signature};

use super::entail::{check_entailment, CheckOptions, EntailmentQuery, Verdict};
use super::formula::{subst_sol, SolFormula, SolRel};
use super::sat::{sat_sol, Checker};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Outcome of the executable definitional checks: the classical premise and
/// the operator-level conclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DefCheck {
    pub premise: bool,
    pub conclusion: bool,
}

impl DefCheck {
    pub fn entailment_holds(&self) -> bool {
        !self.premise || self.conclusion
    }
}

fn coefficient_operator(
    qs: &QuantumStructure,
    grid: &[Vec<Expr>],
) -> Result<(FormalOp, Vec<QuantumRef>), crate::term::TermError> {
    let n = grid.len() as i64;
    let q = Arc::new(QuantumVarDecl {
        name: "defq".into(),
        arg_types: Vec::new(),
        value_type: BasicType::Int,
        value_range: Some((0, n - 1)),
    });
    let _ = qs;
    let reg = QuantumRef::simple(q).expect("simple variable");
    let mut term: Option<FormalOp> = None;
    for (i, row) in grid.iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            let dyad = FormalOp::product(
                FormalOp::ket(Expr::int(i as i64), reg.clone())?,
                FormalOp::bra(Expr::int(j as i64), reg.clone())?,
            )?;
            let scaled = FormalOp::scale(a.clone(), dyad)?;
            term = Some(match term {
                None => scaled,
                Some(t) => FormalOp::sum(t, scaled)?,
            });
        }
    }
    Ok((term.expect("nonempty grid"), vec![reg]))
}

/// Executable form of the matrix definition of unitarity: the rows of the
/// coefficient grid are normalised and pairwise orthogonal (the classical
/// premise) exactly when the operator `sum a_ij |i><j|` is unitary.
pub fn unitary_def_check(
    qs: &QuantumStructure,
    sigma: &State,
    grid: &[Vec<Expr>],
) -> Result<DefCheck, crate::sol::CheckError> {
    let tol = qs.base.config.tol;
    let n = grid.len();
    let mut vals = vec![vec![c(0.0, 0.0); n]; n];
    for (i, row) in grid.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let v = eval_expr(&qs.base, sigma, e)?;
            vals[i][j] = v.as_complex().expect("coefficients are complex-typed");
        }
    }
    let mut premise = true;
    for row in &vals {
        let norm: f64 = row.iter().map(|a| a.norm_sqr()).sum();
        premise &= (norm - 1.0).abs() <= tol;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let dot: Complex64 = (0..n).map(|l| vals[i][l] * vals[j][l].conj()).sum();
            premise &= dot.norm() <= tol;
        }
    }
    let (term, regs) = coefficient_operator(qs, grid).map_err(|e| {
        crate::sol::CheckError::Unroll(crate::stdlib::recursive::UnrollError::Term(e))
    })?;
    let ctx = Context::with_sigma(sigma.clone());
    let conclusion =
        crate::semantics::check_predicate(qs, &ctx, PredicateKind::Unitary, &term, &regs)?;
    Ok(DefCheck { premise, conclusion })
}

/// Executable form of the matrix definition of an observable: conjugate
/// symmetry of the grid against Hermiticity of the operator.
pub fn observable_def_check(
    qs: &QuantumStructure,
    sigma: &State,
    grid: &[Vec<Expr>],
) -> Result<DefCheck, crate::sol::CheckError> {
    let tol = qs.base.config.tol;
    let n = grid.len();
    let mut vals = vec![vec![c(0.0, 0.0); n]; n];
    for (i, row) in grid.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let v = eval_expr(&qs.base, sigma, e)?;
            vals[i][j] = v.as_complex().expect("coefficients are complex-typed");
        }
    }
    let mut premise = true;
    for (i, row) in vals.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            premise &= (v - vals[j][i].conj()).norm() <= tol;
        }
    }
    let (term, regs) = coefficient_operator(qs, grid).map_err(|e| {
        crate::sol::CheckError::Unroll(crate::stdlib::recursive::UnrollError::Term(e))
    })?;
    let ctx = Context::with_sigma(sigma.clone());
    let conclusion =
        crate::semantics::check_predicate(qs, &ctx, PredicateKind::Observable, &term, &regs)?;
    Ok(DefCheck { premise, conclusion })
}

// ---------------------------------------------------------------------------
// The schema suite
// ---------------------------------------------------------------------------

struct Bed {
    qs: QuantumStructure,
    pool: OpPool,
    q: QuantumRef,
    r: QuantumRef,
}

fn testbed(config: &Config) -> Bed {
    let mut st = Structure::new(config.clone());
    st.declare_var("k", BasicType::Bool);
    let qs = gates::quantum_structure(st);
    let pool = OpPool::qubits(3, 2);
    let q = pool.registers[0].clone();
    let r = pool.registers[1].clone();
    Bed { qs, pool, q, r }
}

fn opvar(name: &str, n: usize) -> Arc<OpVarDecl> {
    OpVarDecl::square(name, vec![BasicType::Bool; n])
}

fn ketvar(name: &str, n: usize) -> Arc<OpVarDecl> {
    OpVarDecl::ket(name, vec![BasicType::Bool; n])
}

fn square_regs(bed: &Bed, n: usize) -> Vec<QuantumRef> {
    match n {
        1 => vec![bed.q.clone()],
        _ => vec![bed.q.clone(), bed.r.clone()],
    }
}

/// A random quantifier-free formula over the pool, possibly mentioning the
/// Bool variable `k` through a cell subscript.
fn random_sol(bed: &Bed, g: &mut Gen, depth: usize, with_k: bool) -> SolFormula {
    if depth == 0 || g.pick(3) == 0 {
        let q = bed.q.clone();
        return match g.pick(5) {
            0 => {
                let t = bed.pool.term_with_sig(g, 1, std::slice::from_ref(&q), std::slice::from_ref(&q));
                SolFormula::Pred { kind: PredicateKind::Unitary, op: t, regs: vec![q] }
            }
            1 => {
                let t = bed.pool.term_with_sig(g, 1, std::slice::from_ref(&q), &[]);
                SolFormula::Pred { kind: PredicateKind::PureState, op: t, regs: vec![q] }
            }
            2 => {
                let a = bed.pool.term_with_sig(g, 1, std::slice::from_ref(&q), std::slice::from_ref(&q));
                let b = bed.pool.term_with_sig(g, 1, std::slice::from_ref(&q), std::slice::from_ref(&q));
                SolFormula::OpLeq(a, b)
            }
            3 if with_k => {
                // sigma-dependent atom: |k>_q == |0>_q
                let k = Expr::var("k", BasicType::Bool);
                SolFormula::OpEq(
                    FormalOp::ket(k, q.clone()).unwrap(),
                    FormalOp::ket(Expr::bool(false), q).unwrap(),
                )
            }
            _ => {
                let a = bed.pool.term_with_sig(g, 1, std::slice::from_ref(&q), std::slice::from_ref(&q));
                let b = bed.pool.term_with_sig(g, 1, std::slice::from_ref(&q), std::slice::from_ref(&q));
                SolFormula::OpEq(a, b)
            }
        };
    }
    match g.pick(4) {
        0 => SolFormula::not(random_sol(bed, g, depth - 1, with_k)),
        1 => SolFormula::and(
            random_sol(bed, g, depth - 1, with_k),
            random_sol(bed, g, depth - 1, with_k),
        ),
        2 => SolFormula::or(
            random_sol(bed, g, depth - 1, with_k),
            random_sol(bed, g, depth - 1, with_k),
        ),
        _ => SolFormula::implies(
            random_sol(bed, g, depth - 1, with_k),
            random_sol(bed, g, depth - 1, with_k),
        ),
    }
}

/// Property-checks the valid schemas, the axiom table, and the deduction and
/// substitution theorems on seeded random instances.
pub fn schema_suite(config: &Config) -> SuiteReport {
    let mut report = SuiteReport::new("schema");
    let bed = testbed(config);
    let cases = 100;

    // Schema: (forall x) A -> A[t/x].
    {
        let mut g = Gen::new(config.seed ^ 0x5c11e1a1);
        let mut failures = 0;
        for _ in 0..cases {
            let x = VarRef::new("k", BasicType::Bool);
            let body = random_sol(&bed, &mut g, 2, true);
            let t = Expr::bool(g.flag());
            let instance = subst_sol(
                &body,
                &[Binding::var(x.clone(), t).expect("bool for bool")],
                &[],
            )
            .expect("substitution succeeds");
            let schema = SolFormula::implies(SolFormula::forall_var(x, body), instance);
            if !holds_everywhere(&bed, &schema) {
                failures += 1;
            }
        }
        report.push("forall-classical-instantiation", cases, failures);
    }

    // Schema: (forall X) A -> A[B/X], with B drawn from shapes whose value
    // is in the sample library.
    {
        let mut g = Gen::new(config.seed ^ 0x5c11e1a2);
        let mut failures = 0;
        for _ in 0..cases {
            let x = opvar("Xs", 1);
            let xq = FormalOp::opvar(x.clone(), Signature::square(vec![bed.q.clone()])).unwrap();
            let u = bed.pool.term_with_sig(&mut g, 1, std::slice::from_ref(&bed.q), std::slice::from_ref(&bed.q));
            let body = match g.pick(3) {
                0 => SolFormula::Pred {
                    kind: PredicateKind::Unitary,
                    op: FormalOp::product(xq.clone(), u.clone()).unwrap(),
                    regs: vec![bed.q.clone()],
                },
                1 => SolFormula::OpEq(xq.clone(), u.clone()),
                _ => SolFormula::OpLeq(
                    gates::zero_on(vec![bed.q.clone()]).unwrap(),
                    FormalOp::product(xq.clone(), FormalOp::adjoint(xq.clone())).unwrap(),
                ),
            };
            let b = match g.pick(4) {
                0 => gates::identity_on(vec![bed.r.clone()]).unwrap(),
                1 => gates::gate1(gates::h_decl(), bed.r.clone()),
                2 => gates::gate1(gates::x_decl(), bed.r.clone()),
                _ => gates::zero_on(vec![bed.r.clone()]).unwrap(),
            };
            let instance = subst_sol(&body, &[], &[(x.clone(), b)]).expect("op substitution");
            let schema = SolFormula::implies(SolFormula::forall_op(x, body), instance);
            if !holds_everywhere(&bed, &schema) {
                failures += 1;
            }
        }
        report.push("forall-operator-instantiation", cases, failures);
    }

    // Schemas: quantifier distribution over implication, for both kinds.
    {
        let mut g = Gen::new(config.seed ^ 0x5c11e1a3);
        let mut failures = 0;
        for _ in 0..cases {
            let x = VarRef::new("k", BasicType::Bool);
            let a = random_sol(&bed, &mut g, 1, false); // no free k
            let b = random_sol(&bed, &mut g, 2, true);
            let schema = SolFormula::implies(
                SolFormula::forall_var(
                    x.clone(),
                    SolFormula::implies(a.clone(), b.clone()),
                ),
                SolFormula::implies(a.clone(), SolFormula::forall_var(x.clone(), b.clone())),
            );
            if !holds_everywhere(&bed, &schema) {
                failures += 1;
            }
            let xo = opvar("Xd", 1);
            let xq =
                FormalOp::opvar(xo.clone(), Signature::square(vec![bed.q.clone()])).unwrap();
            let bo = SolFormula::Pred {
                kind: PredicateKind::Observable,
                op: FormalOp::sum(xq.clone(), FormalOp::adjoint(xq)).unwrap(),
                regs: vec![bed.q.clone()],
            };
            let schema = SolFormula::implies(
                SolFormula::forall_op(xo.clone(), SolFormula::implies(a.clone(), bo.clone())),
                SolFormula::implies(a, SolFormula::forall_op(xo, bo)),
            );
            if !holds_everywhere(&bed, &schema) {
                failures += 1;
            }
        }
        report.push("forall-distribution", 2 * cases, failures);
    }

    // Axiom table over seeded random unitaries, states and observables.
    for (name, dims) in [("dim2", 1usize), ("dim4", 2usize)] {
        let regs = square_regs(&bed, dims);
        let d = 1 << dims;
        let mut g = Gen::new(config.seed ^ randgen::stable_hash(name));
        let axioms = table2_axioms(&bed, regs.clone(), d);
        for (axiom, build) in axioms {
            let mut failures = 0;
            for _ in 0..cases {
                let (formula, eta) = build(&mut g);
                let ctx = Context::new(bed.qs.base.default_state(), eta);
                let checker = Checker::prepare(&bed.qs, &[&formula]).expect("no op quantifiers");
                match sat_sol(&checker, &ctx, &formula) {
                    Ok(t) if t.holds => {}
                    _ => failures += 1,
                }
            }
            report.push(format!("{axiom}-{name}"), cases, failures);
        }
    }

    // Deduction theorem, metamorphic: moving a hypothesis across the
    // turnstile never changes the verdict.
    {
        let mut g = Gen::new(config.seed ^ 0xdedc);
        let mut failures = 0;
        let runs = 50;
        for _ in 0..runs {
            let mut st = Structure::new(Config { int_range: (0, 2), ..config.clone() });
            st.declare_var("k", BasicType::Bool);
            let qs = gates::quantum_structure(st);
            let sigma = if g.flag() {
                vec![Formula::Atom(Expr::var("k", BasicType::Bool))]
            } else {
                Vec::new()
            };
            let gamma = vec![random_sol(&bed, &mut g, 1, true)];
            let a = random_sol(&bed, &mut g, 1, true);
            let b = random_sol(&bed, &mut g, 1, true);
            let mut with_hyp = gamma.clone();
            with_hyp.push(a.clone());
            let left = check_entailment(
                &qs,
                &EntailmentQuery::new(sigma.clone(), with_hyp, b.clone()),
                CheckOptions::default(),
            );
            let right = check_entailment(
                &qs,
                &EntailmentQuery::new(sigma, gamma, SolFormula::implies(a, b)),
                CheckOptions::default(),
            );
            if left.verdict != right.verdict {
                failures += 1;
            }
        }
        report.push("deduction-theorem", runs, failures);
    }

    // Substitution theorem: a valid entailment stays valid under classical
    // substitution of its free variables.
    {
        let mut g = Gen::new(config.seed ^ 0x5b57);
        let mut failures = 0;
        let mut cases_run = 0;
        for _ in 0..60 {
            let mut st = Structure::new(Config { int_range: (0, 2), ..config.clone() });
            st.declare_var("k", BasicType::Bool);
            let qs = gates::quantum_structure(st);
            let g1 = random_sol(&bed, &mut g, 1, true);
            let g2 = random_sol(&bed, &mut g, 1, true);
            let goal = if g.flag() { g1.clone() } else { SolFormula::and(g1.clone(), g2.clone()) };
            let query = EntailmentQuery::new(Vec::new(), vec![g1, g2], goal.clone());
            let base = check_entailment(&qs, &query, CheckOptions::default());
            if base.verdict != Verdict::Valid {
                continue;
            }
            cases_run += 1;
            let x = VarRef::new("k", BasicType::Bool);
            let t = Expr::bool(g.flag());
            let bind = Binding::var(x, t).expect("bool for bool");
            let substituted = EntailmentQuery::new(
                Vec::new(),
                query
                    .gamma
                    .iter()
                    .map(|f| subst_sol(f, std::slice::from_ref(&bind), &[]).unwrap())
                    .collect(),
                subst_sol(&query.goal, std::slice::from_ref(&bind), &[]).unwrap(),
            );
            let after = check_entailment(&qs, &substituted, CheckOptions::default());
            if after.verdict != Verdict::Valid {
                failures += 1;
            }
        }
        report.push("substitution-theorem", cases_run, failures);
    }

    // Executable definitional entailments: Hadamard coefficients, QFT(3)
    // and conjugate-symmetric grids.
    {
        let mut failures = 0;
        let sigma = bed.qs.base.default_state();
        let h = gates::hadamard();
        let grid = matrix_grid(&h);
        match unitary_def_check(&bed.qs, &sigma, &grid) {
            Ok(d) if d.premise && d.conclusion => {}
            _ => failures += 1,
        }
        let qft = gates::qft_matrix(3);
        let grid = matrix_grid(&qft);
        match unitary_def_check(&bed.qs, &sigma, &grid) {
            Ok(d) if d.premise && d.conclusion => {}
            _ => failures += 1,
        }
        let mut g = Gen::new(config.seed ^ 0xde7);
        for _ in 0..20 {
            let herm = randgen::random_hermitian(&mut g, 3);
            let grid = matrix_grid(&herm);
            match observable_def_check(&bed.qs, &sigma, &grid) {
                Ok(d) if d.premise && d.conclusion => {}
                _ => failures += 1,
            }
            // A Gaussian matrix is almost surely not unitary: the premise
            // must fail in step with the conclusion.
            let gm = randgen::gaussian_matrix(&mut g, 3, 3);
            let grid = matrix_grid(&gm);
            match unitary_def_check(&bed.qs, &sigma, &grid) {
                Ok(d) if d.premise == d.conclusion => {}
                _ => failures += 1,
            }
        }
        report.push("definitional-entailments", 2 + 40, failures);
    }

    report
}

fn matrix_grid(m: &crate::semantics::CMatrix) -> Vec<Vec<Expr>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| Expr::complex(m.get(i, j).re, m.get(i, j).im)).collect())
        .collect()
}

fn holds_everywhere(bed: &Bed, f: &SolFormula) -> bool {
    // Evaluate at both values of k with an empty valuation; formulas here
    // have no free operator variables.
    let checker = match Checker::prepare(&bed.qs, &[f]) {
        Ok(c) => c,
        Err(_) => return false,
    };
    for k in [false, true] {
        let sigma = bed.qs.base.default_state().update("k", Value::Bool(k));
        let ctx = Context::with_sigma(sigma);
        match sat_sol(&checker, &ctx, f) {
            Ok(t) if t.holds => {}
            _ => return false,
        }
    }
    true
}

type BuildAxiom = Box<dyn Fn(&mut Gen) -> (SolFormula, Valuation)>;
type AxiomBuilder<'a> = (&'a str, BuildAxiom);

fn table2_axioms(_bed: &Bed, regs: Vec<QuantumRef>, d: usize) -> Vec<AxiomBuilder<'static>> {
    let q = regs.clone();
    let sq = Signature::square(regs.clone());
    let ket_sig = Signature { dom: regs.clone(), cod: Vec::new() };
    let x1 = opvar("A1", q.len());
    let x2 = opvar("A2", q.len());
    let k2 = ketvar("K2", q.len());
    let a1 = FormalOp::opvar(x1.clone(), sq.clone()).unwrap();
    let a2 = FormalOp::opvar(x2.clone(), sq.clone()).unwrap();
    let kv = FormalOp::opvar(k2.clone(), ket_sig).unwrap();
    let uni = |op: FormalOp| SolFormula::Pred {
        kind: PredicateKind::Unitary,
        op,
        regs: regs.clone(),
    };
    let obs = |op: FormalOp| SolFormula::Pred {
        kind: PredicateKind::Observable,
        op,
        regs: regs.clone(),
    };
    let mix = |op: FormalOp| SolFormula::Pred {
        kind: PredicateKind::MixedState,
        op,
        regs: regs.clone(),
    };
    let pure_ = |op: FormalOp| SolFormula::Pred {
        kind: PredicateKind::PureState,
        op,
        regs: regs.clone(),
    };
    let zero = gates::zero_on(regs.clone()).unwrap();

    let mk = |name: &'static str, f: BuildAxiom| -> AxiomBuilder<'static> { (name, f) };

    vec![
        mk("Stat1", {
            let (a1, kv) = (a1.clone(), kv.clone());
            let (uni1, pure1, pure2) =
                (uni(a1.clone()), pure_(kv.clone()), pure_(FormalOp::product(a1.clone(), kv.clone()).unwrap()));
            Box::new(move |g| {
                let eta = Valuation::default()
                    .update("A1", randgen::haar_unitary(g, d))
                    .update("K2", randgen::random_unit_vector(g, d));
                (
                    SolFormula::implies(
                        SolFormula::and(uni1.clone(), pure1.clone()),
                        pure2.clone(),
                    ),
                    eta,
                )
            })
        }),
        mk("Stat2", {
            let (a1, a2) = (a1.clone(), a2.clone());
            let conj = FormalOp::product(
                FormalOp::product(a1.clone(), a2.clone()).unwrap(),
                FormalOp::adjoint(a1.clone()),
            )
            .unwrap();
            let f = SolFormula::implies(
                SolFormula::and(uni(a1.clone()), mix(a2.clone())),
                mix(conj),
            );
            Box::new(move |g| {
                let eta = Valuation::default()
                    .update("A1", randgen::haar_unitary(g, d))
                    .update("A2", randgen::random_density(g, d));
                (f.clone(), eta)
            })
        }),
        mk("Stat3", {
            let a = a1.clone();
            let f = SolFormula::implies(
                SolFormula::and(
                    SolFormula::OpLeq(zero.clone(), a.clone()),
                    SolFormula::TraceCmp { op: a.clone(), rel: SolRel::Eq, bound: c(1.0, 0.0) },
                ),
                mix(a.clone()),
            );
            Box::new(move |g| {
                let eta = Valuation::default().update("A1", randgen::random_density(g, d));
                (f.clone(), eta)
            })
        }),
        mk("Uni1", {
            let a = a1.clone();
            let f = SolFormula::implies(uni(a.clone()), uni(FormalOp::adjoint(a.clone())));
            Box::new(move |g| {
                let eta = Valuation::default().update("A1", randgen::haar_unitary(g, d));
                (f.clone(), eta)
            })
        }),
        mk("Uni2", {
            let (a1, a2) = (a1.clone(), a2.clone());
            let f = SolFormula::implies(
                SolFormula::and(uni(a1.clone()), uni(a2.clone())),
                uni(FormalOp::product(a1.clone(), a2.clone()).unwrap()),
            );
            Box::new(move |g| {
                let eta = Valuation::default()
                    .update("A1", randgen::haar_unitary(g, d))
                    .update("A2", randgen::haar_unitary(g, d));
                (f.clone(), eta)
            })
        }),
        mk("Obs1", {
            let a = a1.clone();
            let f = SolFormula::implies(
                obs(a.clone()),
                SolFormula::OpEq(a.clone(), FormalOp::adjoint(a.clone())),
            );
            Box::new(move |g| {
                let eta = Valuation::default().update("A1", randgen::random_hermitian(g, d));
                (f.clone(), eta)
            })
        }),
        mk("Obs2", {
            let (a1, a2) = (a1.clone(), a2.clone());
            let conj = FormalOp::product(
                FormalOp::product(a1.clone(), a2.clone()).unwrap(),
                FormalOp::adjoint(a1.clone()),
            )
            .unwrap();
            let f = SolFormula::implies(
                SolFormula::and(uni(a1.clone()), obs(a2.clone())),
                obs(conj),
            );
            Box::new(move |g| {
                let eta = Valuation::default()
                    .update("A1", randgen::haar_unitary(g, d))
                    .update("A2", randgen::random_hermitian(g, d));
                (f.clone(), eta)
            })
        }),
        mk("Obs3", {
            let (a1, a2) = (a1.clone(), a2.clone());
            let prod12 = FormalOp::product(a1.clone(), a2.clone()).unwrap();
            let prod21 = FormalOp::product(a2.clone(), a1.clone()).unwrap();
            let f = SolFormula::implies(
                SolFormula::and(
                    SolFormula::and(obs(a1.clone()), obs(a2.clone())),
                    SolFormula::OpEq(prod12.clone(), prod21),
                ),
                obs(prod12),
            );
            Box::new(move |g| {
                // A commuting Hermitian pair: the second is a real
                // polynomial in the first.
                let h = randgen::random_hermitian(g, d);
                let h2 = h.mul(&h).scale(c(g.real(), 0.0)).add(&h.scale(c(g.real(), 0.0)));
                let eta =
                    Valuation::default().update("A1", h.clone()).update("A2", h2);
                (f.clone(), eta)
            })
        }),
    ]
}
