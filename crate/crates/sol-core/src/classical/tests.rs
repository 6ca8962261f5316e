use super::*;
use crate::config::Config;

use BasicType::{Bool, Int};
use BuiltinOp as Op;

fn small_structure() -> Structure {
    let mut st = Structure::new(Config { int_range: (-64, 64), ..Config::default() });
    st.declare_var("x", Int);
    st.declare_var("y", Int);
    st.declare_var("b", Bool);
    st.declare_array("a", vec![Bool], Int);
    st
}

fn xv() -> Expr {
    Expr::var("x", Int)
}

fn yv() -> Expr {
    Expr::var("y", Int)
}

fn add(a: Expr, b: Expr) -> Expr {
    Expr::app(Op::Add, vec![a, b]).unwrap()
}

fn sub(a: Expr, b: Expr) -> Expr {
    Expr::app(Op::Sub, vec![a, b]).unwrap()
}

fn mul(a: Expr, b: Expr) -> Expr {
    Expr::app(Op::Mul, vec![a, b]).unwrap()
}

fn eq(a: Expr, b: Expr) -> Expr {
    Expr::app(Op::Eq, vec![a, b]).unwrap()
}

#[test]
fn eval_linear_arithmetic() {
    let st = small_structure();
    let sigma = st.default_state().update("x", Value::Int(5)).update("y", Value::Int(-1));
    // 2x + y = 9 and 7 - 3y = 10
    let e1 = add(mul(Expr::int(2), xv()), yv());
    let e2 = sub(Expr::int(7), mul(Expr::int(3), yv()));
    assert_eq!(eval_expr(&st, &sigma, &e1).unwrap(), Value::Int(9));
    assert_eq!(eval_expr(&st, &sigma, &e2).unwrap(), Value::Int(10));
}

#[test]
fn eval_conditional_constant_guard() {
    let st = small_structure();
    let sigma = st.default_state();
    let e = Expr::ite(Expr::bool(true), Expr::int(1), Expr::int(0)).unwrap();
    assert_eq!(eval_expr(&st, &sigma, &e).unwrap(), Value::Int(1));
}

#[test]
fn eval_array_lookup() {
    let st = small_structure();
    let mut sigma = st.default_state();
    let mut arr = sigma.get_array("a").unwrap().clone();
    arr.set(&[DiscreteValue::Bool(false)], Value::Int(3));
    arr.set(&[DiscreteValue::Bool(true)], Value::Int(7));
    sigma.set_array("a", arr);
    let a = ArrayRef::new("a", vec![Bool], Int);
    let e = Expr::index(a, vec![Expr::bool(true)]).unwrap();
    assert_eq!(eval_expr(&st, &sigma, &e).unwrap(), Value::Int(7));
}

#[test]
fn overflow_is_an_error() {
    let st = small_structure();
    let sigma = st.default_state().update("x", Value::Int(i64::MAX));
    let e = add(xv(), Expr::int(1));
    assert!(matches!(eval_expr(&st, &sigma, &e), Err(EvalError::IntOverflow(_))));
}

#[test]
fn satisfies_simple_equality() {
    let st = small_structure();
    let sigma = st.default_state().update("x", Value::Int(5));
    let phi = Formula::atom(eq(xv(), Expr::int(5))).unwrap();
    assert!(satisfies(&st, &sigma, &phi).unwrap());
}

#[test]
fn satisfies_bool_tautology() {
    let st = small_structure();
    let sigma = st.default_state();
    // forall x:Bool . x | !x
    let v = VarRef::new("p", Bool);
    let body = Formula::or(
        Formula::atom(Expr::Var(v.clone())).unwrap(),
        Formula::not(Formula::atom(Expr::Var(v.clone())).unwrap()),
    );
    let phi = Formula::forall(v, body);
    assert!(satisfies(&st, &sigma, &phi).unwrap());
}

#[test]
fn satisfies_bounded_exists() {
    let mut st = Structure::new(Config { int_range: (0, 3), ..Config::default() });
    st.declare_var("k", Int);
    let sigma = st.default_state();
    // exists k . 2k = 6, satisfied by k = 3
    let k = VarRef::new("k", Int);
    let phi = Formula::exists(
        k.clone(),
        Formula::atom(eq(mul(Expr::int(2), Expr::Var(k)), Expr::int(6))).unwrap(),
    );
    assert!(satisfies(&st, &sigma, &phi).unwrap());
    // but 2k = 7 has no solution
    let k = VarRef::new("k", Int);
    let phi = Formula::exists(
        k.clone(),
        Formula::atom(eq(mul(Expr::int(2), Expr::Var(k)), Expr::int(7))).unwrap(),
    );
    assert!(!satisfies(&st, &sigma, &phi).unwrap());
}

#[test]
fn quantifier_over_complex_rejected() {
    let st = small_structure();
    let sigma = st.default_state();
    let v = VarRef::new("z", BasicType::Complex);
    let phi = Formula::forall(v.clone(), Formula::truth(true));
    assert!(matches!(
        satisfies(&st, &sigma, &phi),
        Err(EvalError::UnsupportedQuantifier(_))
    ));
}

#[test]
fn subst_base_cases() {
    let t = Expr::int(9);
    let b = Binding::var(VarRef::new("x", Int), t.clone()).unwrap();
    assert_eq!(subst_expr(&xv(), std::slice::from_ref(&b)), t);
    assert_eq!(subst_expr(&yv(), &[b]), yv());
}

#[test]
fn subst_same_array_produces_conditional() {
    // a[s][t / a[s']] = if s = s' then t else a[s]
    let st = small_structure();
    let a = ArrayRef::new("a", vec![Bool], Int);
    let s = Expr::index(a.clone(), vec![Expr::var("b", Bool)]).unwrap();
    let target = SubstTarget::Cell(a.clone(), vec![Expr::bool(true)]);
    let b = Binding::new(target, Expr::int(42)).unwrap();
    let out = subst_expr(&s, &[b]);
    // Under sigma(b) = true the conditional selects 42; under false the
    // original cell.
    let mut sigma = st.default_state();
    let mut arr = sigma.get_array("a").unwrap().clone();
    arr.set(&[DiscreteValue::Bool(false)], Value::Int(5));
    sigma.set_array("a", arr);
    let on_true = sigma.update("b", Value::Bool(true));
    assert_eq!(eval_expr(&st, &on_true, &out).unwrap(), Value::Int(42));
    let on_false = sigma.update("b", Value::Bool(false));
    assert_eq!(eval_expr(&st, &on_false, &out).unwrap(), Value::Int(5));
}

#[test]
fn subst_capture_avoidance() {
    // ((forall y)(y = x))[y/x] must rename the binder: check semantically
    // over the two-element Bool domain against the state-update oracle.
    let mut st = Structure::new(Config::default());
    st.declare_var("xq", Bool);
    st.declare_var("yq", Bool);
    let x = VarRef::new("xq", Bool);
    let y = VarRef::new("yq", Bool);
    let phi = Formula::forall(
        y.clone(),
        Formula::atom(eq_bool(Expr::Var(y.clone()), Expr::Var(x.clone()))).unwrap(),
    );
    let b = Binding::var(x.clone(), Expr::Var(y.clone())).unwrap();
    let substituted = subst_formula(&phi, &[b]);
    // The binder must no longer be the literal "yq".
    match &substituted {
        Formula::Forall(v, _) => assert_ne!(&*v.name, "yq"),
        _ => panic!("expected forall"),
    }
    for yval in [false, true] {
        for xval in [false, true] {
            let sigma = st
                .default_state()
                .update("xq", Value::Bool(xval))
                .update("yq", Value::Bool(yval));
            let lhs = satisfies(&st, &sigma, &substituted).unwrap();
            let updated = sigma.update("xq", sigma.get("yq").unwrap());
            let rhs = satisfies(&st, &updated, &phi).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

fn eq_bool(a: Expr, b: Expr) -> Expr {
    Expr::app(Op::Eq, vec![a, b]).unwrap()
}

#[test]
fn update_state_semantics() {
    let st = small_structure();
    let sigma = st.default_state().update("y", Value::Int(7));
    let updated = sigma.update("x", Value::Int(1));
    assert_eq!(updated.get("x"), Some(Value::Int(1)));
    assert_eq!(updated.get("y"), Some(Value::Int(7)));
    // last write wins
    let twice = updated.update("x", Value::Int(2));
    assert_eq!(twice.get("x"), Some(Value::Int(2)));
}

#[test]
fn state_space_enumeration_is_mixed_radix() {
    let mut st = Structure::new(Config { int_range: (0, 2), ..Config::default() });
    st.declare_var("m", Int);
    st.declare_var("f", Bool);
    let space = StateSpace::new(&st, &Default::default()).unwrap();
    assert_eq!(space.size(), 6);
    let s0 = space.state_at(0);
    assert_eq!(s0.get("m"), Some(Value::Int(0)));
    assert_eq!(s0.get("f"), Some(Value::Bool(false)));
    let s5 = space.state_at(5);
    assert_eq!(s5.get("m"), Some(Value::Int(2)));
    assert_eq!(s5.get("f"), Some(Value::Bool(true)));
}

mod substitution_lemma {
    //! Randomized check of the substitution lemma: evaluation after
    //! substitution equals evaluation in the updated state.

    use super::*;
    use crate::randgen::{Gen, TermPool};

    #[test]
    fn holds_for_expressions_and_formulas() {
        let mut st = Structure::new(Config { int_range: (-8, 8), ..Config::default() });
        st.declare_var("x", Int);
        st.declare_var("y", Int);
        st.declare_var("p", Bool);
        st.declare_var("q", Bool);
        st.declare_array("a", vec![Bool], Int);
        let pool = TermPool::small(&st);
        let mut gen = Gen::new(0xC1A551C);
        for case in 0..400 {
            let sigma = pool.random_state(&st, &mut gen);
            let (xref, t) = pool.random_binding(&mut gen);
            let binding = Binding::var(xref.clone(), t.clone()).unwrap();
            let tv = match eval_expr(&st, &sigma, &t) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let s = pool.random_expr(&mut gen, 3);
            let lhs = eval_expr(&st, &sigma, &subst_expr(&s, std::slice::from_ref(&binding)));
            let rhs = eval_expr(&st, &sigma.update(xref.name.clone(), tv), &s);
            match (lhs, rhs) {
                (Ok(a), Ok(b)) => {
                    assert!(a.approx_eq(&b, 1e-9), "case {case}: {a:?} vs {b:?} for {s}")
                }
                (Err(_), Err(_)) => {}
                (a, b) => panic!("case {case}: divergent outcomes {a:?} vs {b:?} for {s}"),
            }
            let phi = pool.random_formula(&mut gen, 2);
            let lhs = satisfies(&st, &sigma, &subst_formula(&phi, &[binding]));
            let rhs = satisfies(&st, &sigma.update(xref.name.clone(), tv), &phi);
            match (lhs, rhs) {
                (Ok(a), Ok(b)) => assert_eq!(a, b, "case {case}: formula {phi}"),
                (Err(_), Err(_)) => {}
                (a, b) => panic!("case {case}: divergent outcomes {a:?} vs {b:?} for {phi}"),
            }
        }
    }
}
