//! Norm and trace of formal operators.

use num_complex::Complex64;

use crate::term::FormalOp;

use super::eval::{eval_operator, permute_cols};
use super::signing::same_register_set;
use super::{Context, OperatorError, QuantumStructure};

/// Frobenius norm of the evaluated operator.
pub fn frobenius_norm(
    qs: &QuantumStructure,
    ctx: &Context,
    a: &FormalOp,
) -> Result<f64, OperatorError> {
    Ok(eval_operator(qs, ctx, a)?.mat.frobenius())
}

/// Trace of the evaluated operator. Defined only for square signatures
/// (domain and codomain over the same registers, in any order); the column
/// basis is aligned to the row basis before summing the diagonal.
pub fn trace(
    qs: &QuantumStructure,
    ctx: &Context,
    a: &FormalOp,
) -> Result<Complex64, OperatorError> {
    let e = eval_operator(qs, ctx, a)?;
    if !same_register_set(&e.dom, &e.cod) {
        return Err(OperatorError::NonSquareTrace(e.signature().to_string()));
    }
    let aligned = permute_cols(&e.mat, &e.cod, &e.dom);
    Ok(aligned.trace())
}
