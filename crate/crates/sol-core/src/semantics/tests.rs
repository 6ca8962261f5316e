use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;

use crate::classical::{BasicType, BuiltinOp, Expr, Value};
use crate::config::Config;
use crate::randgen::{self, Gen, OpPool};
use crate::registers::{QuantumRef, QuantumVarDecl};
use crate::stdlib::gates;
use crate::term::{FormalOp, OpVarDecl, Signature};

use super::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn setup() -> QuantumStructure {
    let mut st = crate::classical::Structure::new(Config::default());
    st.declare_var("x", BasicType::Int);
    st.declare_var("y", BasicType::Int);
    st.declare_var("n", BasicType::Int);
    st.declare_var("xc", BasicType::Complex);
    st.declare_var("theta", BasicType::Complex);
    gates::quantum_structure(st)
}

fn qubit(name: &str) -> QuantumRef {
    QuantumRef::simple(QuantumVarDecl::qubit(name)).unwrap()
}

fn ket(b: bool, q: QuantumRef) -> FormalOp {
    FormalOp::ket(Expr::bool(b), q).unwrap()
}

fn bra(b: bool, q: QuantumRef) -> FormalOp {
    FormalOp::bra(Expr::bool(b), q).unwrap()
}

#[test]
fn scalar_signs_to_empty() {
    let qs = setup();
    let ctx = Context::with_sigma(qs.base.default_state());
    let a = FormalOp::scalar(Expr::real(2.0)).unwrap();
    let sig = check_signing(&qs, &ctx.sigma, &a).unwrap();
    assert!(sig.dom.is_empty() && sig.cod.is_empty());
}

#[test]
fn opvar_on_coincident_cells_fails_distinctness() {
    let qs = setup();
    let sigma = qs.base.default_state().update("x", Value::Int(3)).update("y", Value::Int(3));
    let arr = QuantumVarDecl::qubit_array("q", vec![BasicType::Int]);
    let rx = QuantumRef::subscripted(arr.clone(), vec![Expr::var("x", BasicType::Int)]).unwrap();
    let ry = QuantumRef::subscripted(arr, vec![Expr::var("y", BasicType::Int)]).unwrap();
    let x = OpVarDecl::square("X1", vec![BasicType::Bool, BasicType::Bool]);
    let term = FormalOp::opvar(x, Signature::square(vec![rx, ry])).unwrap();
    let err = check_signing(&qs, &sigma, &term).unwrap_err();
    assert_eq!(err.rule(), Some("Sign-OpV"));
}

#[test]
fn tensor_of_kets_signs_and_overlap_is_rejected() {
    let qs = setup();
    let sigma = qs.base.default_state();
    let t = FormalOp::tensor(ket(false, qubit("q")), ket(true, qubit("r")));
    let sig = check_signing(&qs, &sigma, &t).unwrap();
    assert_eq!(sig.dom.len(), 2);
    assert!(sig.cod.is_empty());
    assert_eq!(sig.dim_dom(), 4);
    let clash = FormalOp::tensor(ket(false, qubit("q")), ket(true, qubit("q")));
    let err = check_signing(&qs, &sigma, &clash).unwrap_err();
    assert_eq!(err.rule(), Some("Sign-Tensor"));
}

#[test]
fn parameterised_superposition_evaluates_to_plus_state() {
    // cos(theta/2)|xc-1/2> + sin(theta/2)|xc+1/2> on q[3n-2]
    // at theta = pi/2, xc = 1/2, n = 3: the |+> state on q[7].
    let qs = setup();
    let sigma = qs
        .base
        .default_state()
        .update("theta", Value::Complex(c(FRAC_PI_2, 0.0)))
        .update("xc", Value::Complex(c(0.5, 0.0)))
        .update("n", Value::Int(3));
    let ctx = Context::with_sigma(sigma);
    let arr = QuantumVarDecl::qubit_array("q", vec![BasicType::Int]);
    let idx = Expr::app(
        BuiltinOp::Sub,
        vec![
            Expr::app(BuiltinOp::Mul, vec![Expr::int(3), Expr::var("n", BasicType::Int)]).unwrap(),
            Expr::int(2),
        ],
    )
    .unwrap();
    let reg = QuantumRef::subscripted(arr, vec![idx]).unwrap();
    let theta = Expr::var("theta", BasicType::Complex);
    let half = Expr::app(BuiltinOp::Mul, vec![theta, Expr::real(0.5)]).unwrap();
    let xc = Expr::var("xc", BasicType::Complex);
    let lo = Expr::app(BuiltinOp::Sub, vec![xc.clone(), Expr::real(0.5)]).unwrap();
    let hi = Expr::app(BuiltinOp::Add, vec![xc, Expr::real(0.5)]).unwrap();
    let term = FormalOp::sum(
        FormalOp::scale(
            Expr::app(BuiltinOp::Cos, vec![half.clone()]).unwrap(),
            FormalOp::ket(lo, reg.clone()).unwrap(),
        )
        .unwrap(),
        FormalOp::scale(
            Expr::app(BuiltinOp::Sin, vec![half]).unwrap(),
            FormalOp::ket(hi, reg).unwrap(),
        )
        .unwrap(),
    )
    .unwrap();
    let e = eval_operator(&qs, &ctx, &term).unwrap();
    assert_eq!((e.mat.rows(), e.mat.cols()), (2, 1));
    assert_eq!(e.dom[0].indices, vec![crate::classical::DiscreteValue::Int(7)]);
    assert!((e.mat.get(0, 0) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    assert!((e.mat.get(1, 0) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
}

#[test]
fn bra_ket_contracts_to_one() {
    let qs = setup();
    let ctx = Context::with_sigma(qs.base.default_state());
    let p = FormalOp::product(bra(false, qubit("q")), ket(false, qubit("q"))).unwrap();
    let e = eval_operator(&qs, &ctx, &p).unwrap();
    assert_eq!((e.mat.rows(), e.mat.cols()), (1, 1));
    assert!((e.mat.get(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
    // Orthogonal labels contract to zero.
    let p = FormalOp::product(bra(true, qubit("q")), ket(false, qubit("q"))).unwrap();
    let e = eval_operator(&qs, &ctx, &p).unwrap();
    assert!(e.mat.get(0, 0).norm() < 1e-12);
    // Ket-bra is a 2x2 projector.
    let p = FormalOp::product(ket(false, qubit("q")), bra(false, qubit("q"))).unwrap();
    let e = eval_operator(&qs, &ctx, &p).unwrap();
    assert_eq!((e.mat.rows(), e.mat.cols()), (2, 2));
}

#[test]
fn cnot_squares_to_identity() {
    let qs = setup();
    let ctx = Context::with_sigma(qs.base.default_state());
    let g = gates::gate2(gates::cnot_decl(), qubit("q"), qubit("r"));
    let p = FormalOp::product(g.clone(), g).unwrap();
    let e = eval_operator(&qs, &ctx, &p).unwrap();
    assert!(e.mat.approx_eq(&CMatrix::identity(4), 1e-12));
}

#[test]
fn hadamard_on_ket_gives_plus() {
    let qs = setup();
    let ctx = Context::with_sigma(qs.base.default_state());
    let p = FormalOp::product(gates::gate1(gates::h_decl(), qubit("q")), ket(false, qubit("q")))
        .unwrap();
    let e = eval_operator(&qs, &ctx, &p).unwrap();
    assert!((e.mat.get(0, 0) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    assert!((e.mat.get(1, 0) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
}

#[test]
fn frobenius_norm_examples() {
    let qs = setup();
    let ctx = Context::with_sigma(qs.base.default_state());
    let zero = gates::zero_on(vec![qubit("q")]).unwrap();
    assert!(frobenius_norm(&qs, &ctx, &zero).unwrap() < 1e-12);
    let h = gates::gate1(gates::h_decl(), qubit("q"));
    assert!((frobenius_norm(&qs, &ctx, &h).unwrap() - std::f64::consts::SQRT_2).abs() < 1e-12);
}

#[test]
fn frobenius_multiplicative_under_tensor() {
    let qs = setup();
    let ctx = Context::with_sigma(qs.base.default_state());
    let pool = OpPool::qubits(4, 0);
    let mut g = Gen::new(7);
    for _ in 0..30 {
        let a = pool.term_with_sig(
            &mut g,
            2,
            &[pool.registers[0].clone()],
            &[pool.registers[0].clone()],
        );
        let b = pool.term_with_sig(
            &mut g,
            2,
            &[pool.registers[1].clone()],
            &[pool.registers[1].clone()],
        );
        let t = FormalOp::tensor(a.clone(), b.clone());
        let na = frobenius_norm(&qs, &ctx, &a).unwrap();
        let nb = frobenius_norm(&qs, &ctx, &b).unwrap();
        let nt = frobenius_norm(&qs, &ctx, &t).unwrap();
        assert!((nt - na * nb).abs() < 1e-9, "{nt} vs {na} * {nb}");
    }
}

#[test]
fn trace_examples_and_linearity() {
    let qs = setup();
    let ctx = Context::with_sigma(qs.base.default_state());
    let z = gates::gate1(gates::z_decl(), qubit("q"));
    assert!(trace(&qs, &ctx, &z).unwrap().norm() < 1e-12);
    let i2 = gates::identity_on(vec![qubit("q"), qubit("r")]).unwrap();
    assert!((trace(&qs, &ctx, &i2).unwrap() - c(4.0, 0.0)).norm() < 1e-12);
    // Trace of a ket is undefined.
    let k = ket(false, qubit("q"));
    assert!(matches!(trace(&qs, &ctx, &k), Err(OperatorError::NonSquareTrace(_))));
    // Linearity on random square terms.
    let pool = OpPool::qubits(3, 0);
    let mut g = Gen::new(11);
    for _ in 0..30 {
        let regs = vec![pool.registers[0].clone(), pool.registers[1].clone()];
        let a = pool.term_with_sig(&mut g, 2, &regs, &regs);
        let b = pool.term_with_sig(&mut g, 2, &regs, &regs);
        let (la, mu) = (c(g.real(), g.real()), c(g.real(), g.real()));
        let combo = FormalOp::sum(
            FormalOp::scale(Expr::complex(la.re, la.im), a.clone()).unwrap(),
            FormalOp::scale(Expr::complex(mu.re, mu.im), b.clone()).unwrap(),
        )
        .unwrap();
        let lhs = trace(&qs, &ctx, &combo).unwrap();
        let rhs = la * trace(&qs, &ctx, &a).unwrap() + mu * trace(&qs, &ctx, &b).unwrap();
        assert!((lhs - rhs).norm() < 1e-9);
    }
}

#[test]
fn predicate_examples() {
    let qs = setup();
    let ctx = Context::with_sigma(qs.base.default_state());
    let q = qubit("q");
    // |0>_q is a pure state on q.
    assert!(check_predicate(
        &qs,
        &ctx,
        PredicateKind::PureState,
        &ket(false, q.clone()),
        std::slice::from_ref(&q)
    )
    .unwrap());
    // Rotations are unitary for random angles.
    let mut g = Gen::new(3);
    for _ in 0..100 {
        let theta = Expr::complex(4.0 * g.real(), 0.0);
        let r = gates::rotation(gates::ry_decl(), theta, q.clone()).unwrap();
        assert!(check_predicate(&qs, &ctx, PredicateKind::Unitary, &r, std::slice::from_ref(&q)).unwrap());
    }
    // I/2 is a mixed state, I is not.
    let half =
        FormalOp::scale(Expr::real(0.5), gates::identity_on(vec![q.clone()]).unwrap()).unwrap();
    assert!(check_predicate(&qs, &ctx, PredicateKind::MixedState, &half, std::slice::from_ref(&q)).unwrap());
    let full = gates::identity_on(vec![q.clone()]).unwrap();
    assert!(!check_predicate(&qs, &ctx, PredicateKind::MixedState, &full, std::slice::from_ref(&q)).unwrap());
    // A ket is not unitary-shaped: signature mismatch makes it false.
    assert!(!check_predicate(
        &qs,
        &ctx,
        PredicateKind::Unitary,
        &ket(false, q.clone()),
        std::slice::from_ref(&q)
    )
    .unwrap());
}

#[test]
fn compare_examples() {
    let qs = setup();
    let ctx = Context::with_sigma(qs.base.default_state());
    let q = qubit("q");
    let zero = gates::zero_on(vec![q.clone()]).unwrap();
    let id = gates::identity_on(vec![q.clone()]).unwrap();
    assert!(compare(&qs, &ctx, &zero, &id, CmpRel::Loewner).unwrap());
    // Reflexivity of equality on random well-signed terms.
    let pool = OpPool::qubits(3, 2);
    let mut g = Gen::new(5);
    for _ in 0..20 {
        let (t, _, _) = pool.well_signed(&mut g, 3);
        assert!(compare(&qs, &ctx, &t, &t, CmpRel::Equal).unwrap());
    }
    // Pauli X has eigenvalue +1, so X is not below the zero operator.
    let x = gates::gate1(gates::x_decl(), q.clone());
    assert!(!compare(&qs, &ctx, &x, &zero, CmpRel::Loewner).unwrap());
}

#[test]
fn adjoint_involution_and_conjugate_transpose() {
    let qs = setup();
    let ctx = Context::with_sigma(qs.base.default_state());
    let pool = OpPool::qubits(3, 2);
    let mut g = Gen::new(17);
    for _ in 0..40 {
        let (t, _, _) = pool.well_signed(&mut g, 3);
        let e = match eval_operator(&qs, &ctx, &t) {
            Ok(e) => e,
            Err(err) => panic!("well-signed term failed to evaluate: {err}\n{t}"),
        };
        let dag = eval_operator(&qs, &ctx, &FormalOp::adjoint(t.clone())).unwrap();
        assert!(dag.mat.approx_eq(&e.mat.adjoint(), 1e-12));
        let ddag = eval_operator(&qs, &ctx, &FormalOp::adjoint(FormalOp::adjoint(t))).unwrap();
        let ddag = ddag.reordered(&e.dom, &e.cod);
        assert!(ddag.mat.approx_eq(&e.mat, 1e-12));
    }
}

#[test]
fn tensor_swap_equals_canonical_permutation() {
    let qs = setup();
    let ctx = Context::with_sigma(qs.base.default_state());
    let pool = OpPool::qubits(4, 0);
    let mut g = Gen::new(23);
    for _ in 0..30 {
        let a = pool.term_with_sig(
            &mut g,
            2,
            &[pool.registers[0].clone()],
            &[pool.registers[0].clone()],
        );
        let b = pool.term_with_sig(
            &mut g,
            2,
            &[pool.registers[1].clone()],
            &[pool.registers[1].clone()],
        );
        let ab = eval_operator(&qs, &ctx, &FormalOp::tensor(a.clone(), b.clone())).unwrap();
        let ba = eval_operator(&qs, &ctx, &FormalOp::tensor(b, a)).unwrap();
        let ba = ba.reordered(&ab.dom, &ab.cod);
        assert!(ba.mat.approx_eq(&ab.mat, 1e-12));
    }
}

#[test]
fn signing_soundness_on_random_terms() {
    // Whenever signing succeeds, evaluation succeeds and the matrix
    // dimensions equal the grounded signature's.
    let qs = setup();
    let ctx = Context::with_sigma(qs.base.default_state());
    let pool = OpPool::qubits(4, 3);
    let mut g = Gen::new(29);
    for _ in 0..200 {
        let (t, _, _) = pool.well_signed(&mut g, 4);
        let sig = check_signing(&qs, &ctx.sigma, &t).expect("generated terms sign");
        let e = eval_operator(&qs, &ctx, &t).expect("signed terms evaluate");
        assert_eq!(e.mat.rows(), sig.dim_dom());
        assert_eq!(e.mat.cols(), sig.dim_cod());
        assert_eq!(e.signature(), sig);
    }
}

#[test]
fn ill_signed_terms_rejected_with_rule_names() {
    let qs = setup();
    let sigma = qs.base.default_state();
    let pool = OpPool::qubits(4, 3);
    let mut g = Gen::new(31);
    for _ in 0..100 {
        let (t, rule) = pool.ill_signed(&mut g);
        let err = check_signing(&qs, &sigma, &t).unwrap_err();
        assert_eq!(err.rule(), Some(rule), "term {t}");
    }
}

#[test]
fn substitution_lemma_for_operators() {
    // zeta(A[t/x]) equals (sigma[x := sigma(t)], eta)(A) on random instances.
    let qs = setup();
    let pool = OpPool::qubits(2, 3);
    let mut g = Gen::new(37);
    let x = crate::classical::VarRef::new("x", BasicType::Int);
    for _ in 0..60 {
        let (a, _, _) = pool.well_signed(&mut g, 3);
        let t = Expr::int(g.int(0, 2));
        let sigma = qs.base.default_state().update("x", Value::Int(g.int(0, 2)));
        let ctx = Context::with_sigma(sigma.clone());
        let b = crate::classical::Binding::var(x.clone(), t.clone()).unwrap();
        let lhs = eval_operator(&qs, &ctx, &a.subst_classical(&[b]));
        let tv = crate::classical::eval_expr(&qs.base, &sigma, &t).unwrap();
        let updated = Context::with_sigma(sigma.update("x", tv));
        let rhs = eval_operator(&qs, &updated, &a);
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => {
                let l = l.reordered(&r.dom, &r.cod);
                assert!(l.mat.approx_eq(&r.mat, 1e-12));
            }
            (Err(_), Err(_)) => {}
            (l, r) => panic!("divergent outcomes: {l:?} vs {r:?}"),
        }
    }
}

#[test]
fn operator_variable_substitution_matches_valuation_update() {
    // zeta(A[B/X]) equals (sigma, eta[X := zeta(B)])(A).
    let qs = setup();
    let q = qubit("q");
    let x = OpVarDecl::square("X", vec![BasicType::Bool]);
    let mut g = Gen::new(41);
    for _ in 0..40 {
        let b = if g.flag() {
            gates::gate1(gates::h_decl(), qubit("r"))
        } else {
            gates::gate1(gates::x_decl(), qubit("r"))
        };
        let xq = FormalOp::opvar(x.clone(), Signature::square(vec![q.clone()])).unwrap();
        let a = FormalOp::sum(
            FormalOp::product(xq.clone(), gates::gate1(gates::z_decl(), q.clone())).unwrap(),
            xq.clone(),
        )
        .unwrap();
        let substituted = a.subst_operator(&b, &x).unwrap();
        let plain_ctx = Context::with_sigma(qs.base.default_state());
        let lhs = eval_operator(&qs, &plain_ctx, &substituted).unwrap();
        let bv = eval_operator(&qs, &plain_ctx, &b).unwrap();
        let ctx =
            Context::new(qs.base.default_state(), Valuation::default().update("X", bv.mat));
        let rhs = eval_operator(&qs, &ctx, &a).unwrap();
        let lhs = lhs.reordered(&rhs.dom, &rhs.cod);
        assert!(lhs.mat.approx_eq(&rhs.mat, 1e-12));
    }
}

#[test]
fn dimension_cap_is_enforced() {
    let mut st = crate::classical::Structure::new(Config { max_dim: 4, ..Config::default() });
    st.declare_var("x", BasicType::Int);
    let qs = gates::quantum_structure(st);
    let t = FormalOp::tensor(
        FormalOp::tensor(ket(false, qubit("a")), ket(false, qubit("b"))),
        ket(false, qubit("c")),
    );
    let err = check_signing(&qs, &qs.base.default_state(), &t).unwrap_err();
    assert!(matches!(err, SigningError::DimensionCap { .. }));
}

#[test]
fn haar_unitaries_are_unitary() {
    let mut g = Gen::new(43);
    for n in [2usize, 4] {
        for _ in 0..20 {
            let u = randgen::haar_unitary(&mut g, n);
            assert!(u.is_unitary(1e-10));
        }
    }
}

#[test]
fn densities_are_densities() {
    let mut g = Gen::new(47);
    for _ in 0..20 {
        let rho = randgen::random_density(&mut g, 4);
        assert!(rho.is_hermitian(1e-10));
        assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-10);
        assert!(min_eigenvalue(&rho) >= -1e-10);
    }
}
