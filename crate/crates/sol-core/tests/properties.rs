//! Property tests for the algebraic laws the kernel leans on: matrix
//! algebra under composition and Kronecker products, basis permutations,
//! domain indexing, the three-valued truth algebra, and the equivalence of
//! the sequential and parallel scan backends.

use num_complex::Complex64;
use proptest::prelude::*;

use sol_core::classical::{DiscreteValue, Domain};
use sol_core::exec::{scan_sequential, ExecMode, ScanOutcome, Step};
use sol_core::registers::{QuantumRef, QuantumVarDecl};
use sol_core::semantics::{permute_cols, permute_rows, CMatrix};
use sol_core::sol::Truth;

fn c64() -> impl Strategy<Value = Complex64> {
    (-4.0..4.0f64, -4.0..4.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec(c64(), rows * cols)
        .prop_map(move |data| CMatrix::from_slice(rows, cols, &data))
}

proptest! {
    #[test]
    fn mixed_product_law(
        a in matrix(2, 3),
        b in matrix(2, 2),
        cm in matrix(3, 2),
        d in matrix(2, 3),
    ) {
        // (A (x) B)(C (x) D) = AC (x) BD
        let lhs = a.kron(&b).mul(&cm.kron(&d));
        let rhs = a.mul(&cm).kron(&b.mul(&d));
        prop_assert!(lhs.approx_eq(&rhs, 1e-9));
    }

    #[test]
    fn adjoint_antimultiplicative(a in matrix(3, 2), b in matrix(2, 3)) {
        let lhs = a.mul(&b).adjoint();
        let rhs = b.adjoint().mul(&a.adjoint());
        prop_assert!(lhs.approx_eq(&rhs, 1e-9));
    }

    #[test]
    fn frobenius_multiplicative_under_kron(a in matrix(2, 2), b in matrix(3, 1)) {
        let lhs = a.kron(&b).frobenius();
        let rhs = a.frobenius() * b.frobenius();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
    }

    #[test]
    fn trace_cyclic(a in matrix(3, 3), b in matrix(3, 3)) {
        let lhs = a.mul(&b).trace();
        let rhs = b.mul(&a).trace();
        prop_assert!((lhs - rhs).norm() <= 1e-9);
    }

    #[test]
    fn permutation_round_trip(data in proptest::collection::vec(c64(), 8)) {
        let regs: Vec<_> = ["a", "b", "cq"]
            .iter()
            .map(|n| {
                QuantumRef::simple(QuantumVarDecl::qubit(*n))
                    .unwrap()
                    .ground(
                        &sol_core::classical::Structure::new(Default::default()),
                        &sol_core::classical::State::default(),
                    )
                    .unwrap()
            })
            .collect();
        let shuffled = vec![regs[2].clone(), regs[0].clone(), regs[1].clone()];
        let m = CMatrix::from_slice(8, 1, &data);
        let there = permute_rows(&m, &regs, &shuffled);
        let back = permute_rows(&there, &shuffled, &regs);
        prop_assert!(back.approx_eq(&m, 0.0));
        let mt = m.adjoint();
        let there = permute_cols(&mt, &regs, &shuffled);
        let back = permute_cols(&there, &shuffled, &regs);
        prop_assert!(back.approx_eq(&mt, 0.0));
    }

    #[test]
    fn domain_indexing_inverse(lo in -40i64..40, len in 1i64..40, k in 0usize..64) {
        let dom = Domain::Int { lo, hi: lo + len - 1 };
        let k = k % dom.size();
        let v = dom.value_at(k);
        prop_assert_eq!(dom.index_of(v), Some(k));
        prop_assert_eq!(dom.index_of(DiscreteValue::Int(lo - 1)), None);
    }

    #[test]
    fn truth_conjunction_is_kleene(
        (ah, ae) in (any::<bool>(), any::<bool>()),
        (bh, be) in (any::<bool>(), any::<bool>()),
    ) {
        // Map (holds, exact) onto three-valued logic: exact values are
        // definite, inexact ones unknown.
        #[derive(Clone, Copy, PartialEq, Debug)]
        enum K {
            T,
            F,
            U,
        }
        let to_k = |t: Truth| match (t.holds, t.exact) {
            (h, true) => {
                if h {
                    K::T
                } else {
                    K::F
                }
            }
            (_, false) => K::U,
        };
        let kleene_and = |x: K, y: K| match (x, y) {
            (K::F, _) | (_, K::F) => K::F,
            (K::T, K::T) => K::T,
            _ => K::U,
        };
        let a = Truth { holds: ah, exact: ae };
        let b = Truth { holds: bh, exact: be };
        prop_assert_eq!(to_k(a.and(b)), kleene_and(to_k(a), to_k(b)));
        // Negation is involutive and definite exactly when the operand is.
        prop_assert_eq!(a.negate().negate(), a);
    }

    #[test]
    fn scan_backends_agree(seed in any::<u64>(), total in 0u64..40_000) {
        let step = |i: u64| -> Step<u64> {
            // A deterministic pseudo-random mix of outcomes.
            let h = i.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(seed);
            match h % 97 {
                0 => Step::Terminal(i),
                k if k < 40 => Step::Skip,
                k => Step::Pass { exact: k % 13 != 0 },
            }
        };
        let seq = scan_sequential(total, step);
        #[cfg(feature = "parallel")]
        {
            let par = sol_core::exec::scan(total, ExecMode::Parallel, step);
            prop_assert_eq!(&seq, &par);
        }
        let again = scan_sequential(total, step);
        prop_assert_eq!(&seq, &again);
        if let ScanOutcome::Terminal { index, value } = seq {
            prop_assert_eq!(index, value);
        }
    }
}
