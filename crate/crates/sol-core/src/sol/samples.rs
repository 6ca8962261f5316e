//! The operator sample sets used where a quantifier or valuation ranges
//! over the continuum of operators.
//!
//! A sample set consists of a fixed adversarial library shaped to the
//! variable's quantum type (zero, identity, a rank-1 projector, Paulis and
//! Hadamard where they fit, basis and uniform vectors for ket/bra types)
//! plus seeded random matrices: Haar unitaries for square types and complex
//! Gaussians everywhere. The random stream is derived from the master seed
//! and the variable's name, so results are reproducible per configuration.

use num_complex::Complex64;

use crate::classical::Structure;
use crate::randgen::{self, stable_hash, Gen};
use crate::semantics::CMatrix;
use crate::stdlib::gates;
use crate::term::OpVarDecl;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn type_dims(st: &Structure, tys: &[crate::classical::BasicType]) -> Option<usize> {
    let mut dim = 1usize;
    for t in tys {
        dim = dim.checked_mul(st.domain_of_type(*t)?.size())?;
    }
    Some(dim)
}

/// One labelled sample.
#[derive(Clone, Debug)]
pub struct Sample {
    pub label: String,
    pub mat: CMatrix,
}

fn push(out: &mut Vec<Sample>, label: impl Into<String>, mat: CMatrix) {
    out.push(Sample { label: label.into(), mat });
}

/// The deterministic sample set for an operator variable.
///
/// Returns `None` when the variable's type involves a non-enumerable
/// dimension.
pub fn sample_set(st: &Structure, decl: &OpVarDecl) -> Option<Vec<Sample>> {
    let rows = type_dims(st, &decl.dom)?;
    let cols = type_dims(st, &decl.cod)?;
    let n = st.config.samples;
    let mut g = Gen::new(st.config.seed ^ stable_hash(&decl.name));
    let mut out = Vec::new();
    push(&mut out, "zero", CMatrix::zeros(rows, cols));
    if rows == cols {
        push(&mut out, "id", CMatrix::identity(rows));
        let mut proj = CMatrix::zeros(rows, cols);
        proj.set(0, 0, c(1.0, 0.0));
        push(&mut out, "proj0", proj);
        if rows == 2 {
            push(&mut out, "pauliX", gates::pauli_x());
            push(&mut out, "pauliY", gates::pauli_y());
            push(&mut out, "pauliZ", gates::pauli_z());
            push(&mut out, "hadamard", gates::hadamard());
        } else if rows.is_power_of_two() && rows > 2 {
            let k = rows.trailing_zeros();
            let mut h = gates::hadamard();
            let mut x = gates::pauli_x();
            for _ in 1..k {
                h = h.kron(&gates::hadamard());
                x = x.kron(&CMatrix::identity(2));
            }
            push(&mut out, "hadamardN", h);
            push(&mut out, "pauliX0", x);
        }
        for i in 0..n {
            push(&mut out, format!("haar#{i}"), randgen::haar_unitary(&mut g, rows));
        }
        for i in 0..n {
            push(&mut out, format!("gauss#{i}"), randgen::gaussian_matrix(&mut g, rows, cols));
        }
    } else if cols == 1 {
        // Ket-typed: states of dimension `rows`.
        push(&mut out, "basis0", CMatrix::basis_column(rows, 0));
        push(&mut out, "basisTop", CMatrix::basis_column(rows, rows - 1));
        let u = CMatrix::from_fn(rows, 1, |_, _| c(1.0 / (rows as f64).sqrt(), 0.0));
        push(&mut out, "uniform", u);
        for i in 0..n {
            push(&mut out, format!("state#{i}"), randgen::random_unit_vector(&mut g, rows));
        }
        for i in 0..n {
            push(&mut out, format!("gauss#{i}"), randgen::gaussian_matrix(&mut g, rows, 1));
        }
    } else if rows == 1 && cols > 1 {
        push(&mut out, "basis0", CMatrix::basis_column(cols, 0).adjoint());
        let u = CMatrix::from_fn(1, cols, |_, _| c(1.0 / (cols as f64).sqrt(), 0.0));
        push(&mut out, "uniform", u);
        for i in 0..n {
            push(
                &mut out,
                format!("state#{i}"),
                randgen::random_unit_vector(&mut g, cols).adjoint(),
            );
        }
        for i in 0..n {
            push(&mut out, format!("gauss#{i}"), randgen::gaussian_matrix(&mut g, 1, cols));
        }
    } else {
        let mut e = CMatrix::zeros(rows, cols);
        e.set(0, 0, c(1.0, 0.0));
        push(&mut out, "unit00", e);
        for i in 0..(2 * n) {
            push(&mut out, format!("gauss#{i}"), randgen::gaussian_matrix(&mut g, rows, cols));
        }
    }
    Some(out)
}
