//! Benchmarks for the entailment checker's enumeration backends: the
//! sequential scan against the rayon-partitioned one (when the `parallel`
//! feature is enabled), on a valid address-arithmetic query, a refuted
//! query with an early witness, and a batch of normal-form computations.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sol_core::classical::{BasicType, BuiltinOp, Expr, Formula, Structure};
use sol_core::config::Config;
use sol_core::exec::ExecMode;
use sol_core::randgen::{Gen, OpPool};
use sol_core::registers::{QuantumRef, QuantumVarDecl};
use sol_core::rewrite::normalize;
use sol_core::semantics::{Context, QuantumStructure};
use sol_core::sol::{check_entailment, CheckOptions, EntailmentQuery, SolFormula, Verdict};
use sol_core::stdlib::gates;
use sol_core::term::FormalOp;

fn modes() -> Vec<(&'static str, ExecMode)> {
    let mut out = vec![("sequential", ExecMode::Sequential)];
    #[cfg(feature = "parallel")]
    out.push(("parallel", ExecMode::Parallel));
    out
}

/// The address-arithmetic query over a configurable range; every state is
/// visited, so this exercises the full scan.
fn address_query(range: (i64, i64)) -> (QuantumStructure, EntailmentQuery) {
    let mut st = Structure::new(Config { int_range: range, ..Config::default() });
    st.declare_var("k", BasicType::Int);
    st.declare_var("m", BasicType::Int);
    st.declare_var("n", BasicType::Int);
    st.declare_var("l", BasicType::Int);
    let qs = gates::quantum_structure(st);
    let var = |n: &str| Expr::var(n, BasicType::Int);
    let times = |k: i64, e: Expr| Expr::app(BuiltinOp::Mul, vec![Expr::int(k), e]).unwrap();
    let plus = |a: Expr, b: i64| Expr::app(BuiltinOp::Add, vec![a, Expr::int(b)]).unwrap();
    let eq = |a: Expr, b: Expr| Formula::Atom(Expr::app(BuiltinOp::Eq, vec![a, b]).unwrap());
    let ne = |a: Expr, b: Expr| Formula::Atom(Expr::app(BuiltinOp::Ne, vec![a, b]).unwrap());
    let sigma = vec![
        eq(times(2, var("k")), plus(times(3, var("m")), -4)),
        eq(times(7, var("n")), plus(times(5, var("l")), -7)),
        ne(plus(times(2, var("k")), 3), plus(times(5, var("l")), -2)),
    ];
    let arr = QuantumVarDecl::qubit_array("q", vec![BasicType::Int]);
    let cell = |idx: Expr| QuantumRef::subscripted(arr.clone(), vec![idx]).unwrap();
    let first = gates::gate2(
        gates::cnot_decl(),
        cell(plus(times(2, var("k")), 3)),
        cell(plus(times(5, var("l")), -2)),
    );
    let second = gates::gate2(
        gates::cnot_decl(),
        cell(plus(times(3, var("m")), -1)),
        cell(plus(times(7, var("n")), 5)),
    );
    let goal = SolFormula::OpEq(
        FormalOp::product(first.clone(), second).unwrap(),
        gates::identity_on(first.static_signature().unwrap().dom).unwrap(),
    );
    (qs, EntailmentQuery::new(sigma, Vec::new(), goal))
}

fn bench_full_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("entailment_full_scan");
    group.sample_size(10);
    for (range, states) in [((-6i64, 6i64), 13u64.pow(4)), ((-10, 10), 21u64.pow(4))] {
        let (qs, query) = address_query(range);
        for (name, mode) in modes() {
            group.bench_with_input(
                BenchmarkId::new(name, states),
                &mode,
                |b, &mode| {
                    b.iter(|| {
                        let out = check_entailment(&qs, &query, CheckOptions { mode });
                        assert_eq!(out.verdict, Verdict::Valid);
                        out.stats.sigma_satisfying
                    })
                },
            );
        }
    }
    group.finish();
}

fn bench_witness_search(c: &mut Criterion) {
    // A refuted query whose witness sits mid-space: |k>_q == |0>_q fails
    // first at k = 1.
    let mut st = Structure::new(Config { int_range: (-32, 32), ..Config::default() });
    st.declare_var("k", BasicType::Int);
    st.declare_var("j", BasicType::Int);
    let qs = gates::quantum_structure(st);
    let q = QuantumRef::simple(QuantumVarDecl::qubit("q")).unwrap();
    let k = Expr::var("k", BasicType::Int);
    let ge = Formula::Atom(Expr::app(BuiltinOp::Ge, vec![k.clone(), Expr::int(0)]).unwrap());
    let le = Formula::Atom(Expr::app(BuiltinOp::Le, vec![k.clone(), Expr::int(1)]).unwrap());
    let goal = SolFormula::OpEq(
        FormalOp::ket(k, q.clone()).unwrap(),
        FormalOp::ket(Expr::int(0), q).unwrap(),
    );
    let query = EntailmentQuery::new(vec![ge, le], Vec::new(), goal);
    let mut group = c.benchmark_group("entailment_witness_search");
    group.sample_size(10);
    for (name, mode) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| {
                let out = check_entailment(&qs, &query, CheckOptions { mode });
                assert_eq!(out.verdict, Verdict::Refuted);
                out.witness.as_ref().map(|w| w.index)
            })
        });
    }
    group.finish();
}

fn bench_normalize(c: &mut Criterion) {
    let st = Structure::new(Config::default());
    let qs = gates::quantum_structure(st);
    let ctx = Context::with_sigma(qs.base.default_state());
    let pool = OpPool::qubits(4, 2);
    let mut g = Gen::new(97);
    let terms: Vec<FormalOp> = (0..64).map(|_| pool.well_signed(&mut g, 4).0).collect();
    c.bench_function("normalize_batch_64", |b| {
        b.iter(|| {
            let mut count = 0usize;
            for t in &terms {
                count += normalize(&qs, &ctx, t).unwrap().terms.len();
            }
            count
        })
    });
}

criterion_group!(benches, bench_full_scan, bench_witness_search, bench_normalize);
criterion_main!(benches);
