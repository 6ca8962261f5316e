//! Property suite for the Löwner-order laws: anti-symmetry, transitivity,
//! preservation under scaling/adjoint/addition/conjugation/tensoring, the
//! probabilistic-combination rule, and preservation of order verdicts under
//! classical substitution.

use crate::classical::{BasicType, Binding, Expr, Structure, VarRef};
use crate::config::Config;
use crate::randgen::{self, Gen};
use crate::registers::{QuantumRef, QuantumVarDecl};
use crate::report::SuiteReport;
use crate::semantics::{compare, CmpRel, CMatrix, Context, QuantumStructure, Valuation};
use crate::sol::{check_entailment, subst_sol, CheckOptions, EntailmentQuery, SolFormula, Verdict};
use crate::stdlib::gates;
use crate::term::{FormalOp, OpVarDecl, Signature};

struct Bed {
    qs: QuantumStructure,
    q: QuantumRef,
    r: QuantumRef,
}

fn bed(config: &Config) -> Bed {
    let st = Structure::new(config.clone());
    let qs = gates::quantum_structure(st);
    Bed {
        qs,
        q: QuantumRef::simple(QuantumVarDecl::qubit("q")).unwrap(),
        r: QuantumRef::simple(QuantumVarDecl::qubit("r")).unwrap(),
    }
}

fn opvar_on(name: &str, reg: &QuantumRef) -> FormalOp {
    let d = OpVarDecl::square(name, vec![BasicType::Bool]);
    FormalOp::opvar(d, Signature::square(vec![reg.clone()])).unwrap()
}

/// A Hermitian pair with `a`below `b` (PSD gap).
fn ordered_pair(g: &mut Gen, n: usize) -> (CMatrix, CMatrix) {
    let a = randgen::random_hermitian(g, n);
    let gap = randgen::random_psd(g, n);
    (a.clone(), a.add(&gap))
}

/// Property suite for the order laws.
pub fn order_laws_suite(config: &Config) -> SuiteReport {
    let mut report = SuiteReport::new("orderlaws");
    let bed = bed(config);
    let cases = 60;
    let xa = opvar_on("OA", &bed.q);
    let xb = opvar_on("OB", &bed.q);
    let xc = opvar_on("OC", &bed.q);
    let xcr = opvar_on("OC", &bed.r);
    let loewner = |ctx: &Context, a: &FormalOp, b: &FormalOp| -> bool {
        compare(&bed.qs, ctx, a, b, CmpRel::Loewner).unwrap_or(false)
    };
    let equal = |ctx: &Context, a: &FormalOp, b: &FormalOp| -> bool {
        compare(&bed.qs, ctx, a, b, CmpRel::Equal).unwrap_or(false)
    };
    let ctx_with = |mats: &[(&str, CMatrix)]| {
        let mut eta = Valuation::default();
        for (n, m) in mats {
            eta = eta.update(*n, m.clone());
        }
        Context::new(bed.qs.base.default_state(), eta)
    };

    // Anti-symmetry: mutual order implies equality (premise pairs are
    // equal by construction, since the gap must vanish both ways).
    {
        let mut g = Gen::new(config.seed ^ 1);
        let mut failures = 0;
        for _ in 0..cases {
            let a = randgen::random_hermitian(&mut g, 2);
            let ctx = ctx_with(&[("OA", a.clone()), ("OB", a.clone())]);
            let premise = loewner(&ctx, &xa, &xb) && loewner(&ctx, &xb, &xa);
            if !(premise && equal(&ctx, &xa, &xb)) {
                failures += 1;
            }
        }
        report.push("antisymmetry", cases, failures);
    }

    // Transitivity on PSD-gap chains.
    {
        let mut g = Gen::new(config.seed ^ 2);
        let mut failures = 0;
        for _ in 0..cases {
            let a = randgen::random_hermitian(&mut g, 2);
            let b = a.add(&randgen::random_psd(&mut g, 2));
            let cm = b.add(&randgen::random_psd(&mut g, 2));
            let ctx = ctx_with(&[("OA", a), ("OB", b), ("OC", cm)]);
            let premise = loewner(&ctx, &xa, &xb) && loewner(&ctx, &xb, &xc);
            if !(premise && loewner(&ctx, &xa, &xc)) {
                failures += 1;
            }
        }
        report.push("transitivity", cases, failures);
    }

    // Scaling: c >= 0 keeps the order under negation-complement reversed,
    // c <= 0 reverses it.
    {
        let mut g = Gen::new(config.seed ^ 3);
        let mut failures = 0;
        for _ in 0..cases {
            let (a, b) = ordered_pair(&mut g, 2);
            let ctx = ctx_with(&[("OA", a), ("OB", b)]);
            let cpos = g.real().abs();
            let ca = FormalOp::scale(Expr::real(cpos), xa.clone()).unwrap();
            let cb = FormalOp::scale(Expr::real(cpos), xb.clone()).unwrap();
            let ident = gates::identity_on(vec![bed.q.clone()]).unwrap();
            let not_ca = FormalOp::minus(ident.clone(), ca.clone()).unwrap();
            let not_cb = FormalOp::minus(ident, cb.clone()).unwrap();
            // cA <= cB, equivalently (I - cB) <= (I - cA).
            if !(loewner(&ctx, &ca, &cb) && loewner(&ctx, &not_cb, &not_ca)) {
                failures += 1;
            }
            let cneg = -g.real().abs();
            let ca = FormalOp::scale(Expr::real(cneg), xa.clone()).unwrap();
            let cb = FormalOp::scale(Expr::real(cneg), xb.clone()).unwrap();
            if !loewner(&ctx, &cb, &ca) {
                failures += 1;
            }
        }
        report.push("scaling", 2 * cases, failures);
    }

    // Adjoint preserves the order.
    {
        let mut g = Gen::new(config.seed ^ 4);
        let mut failures = 0;
        for _ in 0..cases {
            let (a, b) = ordered_pair(&mut g, 2);
            let ctx = ctx_with(&[("OA", a), ("OB", b)]);
            if !loewner(&ctx, &FormalOp::adjoint(xa.clone()), &FormalOp::adjoint(xb.clone())) {
                failures += 1;
            }
        }
        report.push("adjoint", cases, failures);
    }

    // Addition of a common summand on either side.
    {
        let mut g = Gen::new(config.seed ^ 5);
        let mut failures = 0;
        for _ in 0..cases {
            let (a, b) = ordered_pair(&mut g, 2);
            let cm = randgen::random_hermitian(&mut g, 2);
            let ctx = ctx_with(&[("OA", a), ("OB", b), ("OC", cm)]);
            let ac = FormalOp::sum(xa.clone(), xc.clone()).unwrap();
            let bc = FormalOp::sum(xb.clone(), xc.clone()).unwrap();
            let ca = FormalOp::sum(xc.clone(), xa.clone()).unwrap();
            let cb = FormalOp::sum(xc.clone(), xb.clone()).unwrap();
            if !(loewner(&ctx, &ac, &bc) && loewner(&ctx, &ca, &cb)) {
                failures += 1;
            }
        }
        report.push("addition", cases, failures);
    }

    // Conjugation: C^+ A C <= C^+ B C for arbitrary C.
    {
        let mut g = Gen::new(config.seed ^ 6);
        let mut failures = 0;
        for _ in 0..cases {
            let (a, b) = ordered_pair(&mut g, 2);
            let cm = randgen::gaussian_matrix(&mut g, 2, 2);
            let ctx = ctx_with(&[("OA", a), ("OB", b), ("OC", cm)]);
            let conj = |m: &FormalOp| {
                FormalOp::product(
                    FormalOp::product(FormalOp::adjoint(xc.clone()), m.clone()).unwrap(),
                    xc.clone(),
                )
                .unwrap()
            };
            if !loewner(&ctx, &conj(&xa), &conj(&xb)) {
                failures += 1;
            }
        }
        report.push("conjugation", cases, failures);
    }

    // Tensoring with a PSD factor on either side.
    {
        let mut g = Gen::new(config.seed ^ 7);
        let mut failures = 0;
        for _ in 0..cases {
            let (a, b) = ordered_pair(&mut g, 2);
            let cm = randgen::random_psd(&mut g, 2);
            let ctx = ctx_with(&[("OA", a), ("OB", b), ("OC", cm)]);
            let ac = FormalOp::tensor(xa.clone(), xcr.clone());
            let bc = FormalOp::tensor(xb.clone(), xcr.clone());
            let ca = FormalOp::tensor(xcr.clone(), xa.clone());
            let cb = FormalOp::tensor(xcr.clone(), xb.clone());
            if !(loewner(&ctx, &ac, &bc) && loewner(&ctx, &ca, &cb)) {
                failures += 1;
            }
        }
        report.push("tensor", cases, failures);
    }

    // Probabilistic combination.
    {
        let mut g = Gen::new(config.seed ^ 8);
        let mut failures = 0;
        for _ in 0..cases {
            let p1 = g.real().abs();
            let p1b = p1 + g.real().abs();
            let p2 = g.real().abs();
            let p2b = p2 + g.real().abs();
            let a1 = randgen::random_psd(&mut g, 2);
            let a1b = a1.add(&randgen::random_psd(&mut g, 2));
            let a2 = randgen::random_psd(&mut g, 2);
            let a2b = a2.add(&randgen::random_psd(&mut g, 2));
            let ctx = Context::new(
                bed.qs.base.default_state(),
                Valuation::default()
                    .update("OA", a1)
                    .update("OB", a2)
                    .update("OAp", a1b)
                    .update("OBp", a2b),
            );
            let xap = opvar_on("OAp", &bed.q);
            let xbp = opvar_on("OBp", &bed.q);
            let combo = |p: f64, x: &FormalOp, pp: f64, y: &FormalOp| {
                FormalOp::sum(
                    FormalOp::scale(Expr::real(p), x.clone()).unwrap(),
                    FormalOp::scale(Expr::real(pp), y.clone()).unwrap(),
                )
                .unwrap()
            };
            let lhs = combo(p1, &xa, p2, &xb);
            let rhs = combo(p1b, &xap, p2b, &xbp);
            if !loewner(&ctx, &lhs, &rhs) {
                failures += 1;
            }
        }
        report.push("probabilistic-combination", cases, failures);
    }

    // Substitution preserves order and equality verdicts at the entailment
    // level.
    {
        let mut g = Gen::new(config.seed ^ 9);
        let mut failures = 0;
        let mut ran = 0;
        for _ in 0..30 {
            let mut st = Structure::new(Config { int_range: (0, 1), ..config.clone() });
            st.declare_var("k", BasicType::Bool);
            let qs = gates::quantum_structure(st);
            let k = Expr::var("k", BasicType::Bool);
            let arr = QuantumVarDecl::qubit_array("cell", vec![BasicType::Bool]);
            let qk = QuantumRef::subscripted(arr.clone(), vec![k]).unwrap();
            let zero = gates::zero_on(vec![qk.clone()]).unwrap();
            let ident = gates::identity_on(vec![qk.clone()]).unwrap();
            let goal = if g.flag() {
                SolFormula::OpLeq(zero.clone(), ident.clone())
            } else {
                SolFormula::OpEq(ident.clone(), ident.clone())
            };
            let query = EntailmentQuery::new(Vec::new(), Vec::new(), goal.clone());
            let base = check_entailment(&qs, &query, CheckOptions::default());
            if base.verdict != Verdict::Valid {
                failures += 1;
                continue;
            }
            ran += 1;
            let bind = Binding::var(
                VarRef::new("k", BasicType::Bool),
                Expr::bool(g.flag()),
            )
            .unwrap();
            let substituted = EntailmentQuery::new(
                Vec::new(),
                Vec::new(),
                subst_sol(&goal, std::slice::from_ref(&bind), &[]).unwrap(),
            );
            let after = check_entailment(&qs, &substituted, CheckOptions::default());
            if after.verdict != Verdict::Valid {
                failures += 1;
            }
        }
        report.push("substitution-preserves-order", ran, failures);
    }

    report
}
