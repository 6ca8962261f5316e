//! Matrix evaluation of formal operators.
//!
//! An evaluated operator carries its matrix together with the ordered ground
//! registers labelling rows (signature domain) and columns (signature
//! codomain). Products and sums align operand bases by inserting register
//! permutations, so operands may list the same registers in different
//! orders.

use num_complex::Complex64;

use crate::classical::{eval_expr, satisfies};
use crate::registers::{distinctness_formula, ground_string, GroundRef};
use crate::term::FormalOp;

use super::signing::{overlap, same_register_set};
use super::{CMatrix, Context, OperatorError, QuantumStructure, SigningError};

/// An evaluated operator: dense matrix plus row/column register bases.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaled {
    pub mat: CMatrix,
    pub dom: Vec<GroundRef>,
    pub cod: Vec<GroundRef>,
}

impl Evaled {
    pub fn signature(&self) -> super::GroundSignature {
        super::GroundSignature { dom: self.dom.clone(), cod: self.cod.clone() }
    }
}

fn dims(regs: &[GroundRef]) -> usize {
    regs.iter().map(|r| r.dim()).product()
}

/// Composite-index permutation taking data ordered by `from` to data ordered
/// by `to` (both duplicate-free lists of the same registers).
fn index_map(from: &[GroundRef], to: &[GroundRef]) -> Vec<usize> {
    debug_assert!(same_register_set(from, to));
    // Strides of each register in the `from` layout.
    let mut from_strides = vec![0usize; from.len()];
    let mut acc = 1usize;
    for (i, r) in from.iter().enumerate().rev() {
        from_strides[i] = acc;
        acc *= r.dim();
    }
    let positions: Vec<usize> = to
        .iter()
        .map(|r| from.iter().position(|f| f == r).expect("same register set"))
        .collect();
    let total = dims(to);
    let mut map = Vec::with_capacity(total);
    for idx in 0..total {
        // Decompose idx in `to` layout, accumulate in `from` strides.
        let mut rem = idx;
        let mut src = 0usize;
        for (k, r) in to.iter().enumerate().rev() {
            let d = r.dim();
            let digit = rem % d;
            rem /= d;
            src += digit * from_strides[positions[k]];
        }
        map.push(src);
    }
    map
}

/// Reorders matrix rows from the `from` register order to `to`.
pub fn permute_rows(mat: &CMatrix, from: &[GroundRef], to: &[GroundRef]) -> CMatrix {
    if from == to {
        return mat.clone();
    }
    let map = index_map(from, to);
    CMatrix::from_fn(mat.rows(), mat.cols(), |i, j| mat.get(map[i], j))
}

/// Reorders matrix columns from the `from` register order to `to`.
pub fn permute_cols(mat: &CMatrix, from: &[GroundRef], to: &[GroundRef]) -> CMatrix {
    if from == to {
        return mat.clone();
    }
    let map = index_map(from, to);
    CMatrix::from_fn(mat.rows(), mat.cols(), |i, j| mat.get(i, map[j]))
}

impl Evaled {
    /// Re-expresses the operator on the given register orders.
    pub fn reordered(&self, dom: &[GroundRef], cod: &[GroundRef]) -> Evaled {
        let mat = permute_rows(&self.mat, &self.dom, dom);
        let mat = permute_cols(&mat, &self.cod, cod);
        Evaled { mat, dom: dom.to_vec(), cod: cod.to_vec() }
    }
}

fn check_dim_cap(
    qs: &QuantumStructure,
    rule: &'static str,
    dom: &[GroundRef],
    cod: &[GroundRef],
) -> Result<(), OperatorError> {
    let cap = qs.base.config.max_dim;
    for dim in [dims(dom), dims(cod)] {
        if dim > cap {
            return Err(SigningError::DimensionCap { rule, dim, cap }.into());
        }
    }
    Ok(())
}

fn ground_distinct(
    qs: &QuantumStructure,
    ctx: &Context,
    rule: &'static str,
    refs: &[crate::registers::QuantumRef],
) -> Result<Vec<GroundRef>, OperatorError> {
    let dist = distinctness_formula(refs);
    if !satisfies(&qs.base, &ctx.sigma, &dist).map_err(SigningError::Eval)? {
        let grounded = ground_string(&qs.base, &ctx.sigma, refs).map_err(SigningError::from)?;
        return Err(SigningError::Distinctness {
            rule,
            refs: crate::registers::display_string(&grounded),
        }
        .into());
    }
    Ok(ground_string(&qs.base, &ctx.sigma, refs).map_err(SigningError::from)?)
}

/// Evaluate a formal operator in a context.
///
/// The term must sign under `ctx.sigma`; the same register conditions are
/// re-checked here so evaluation is safe to call directly.
pub fn eval_operator(
    qs: &QuantumStructure,
    ctx: &Context,
    a: &FormalOp,
) -> Result<Evaled, OperatorError> {
    match a {
        FormalOp::Scalar(c) => {
            let v = eval_expr(&qs.base, &ctx.sigma, c)?;
            let c = v.as_complex().expect("scalar expressions are complex-typed");
            Ok(Evaled { mat: CMatrix::scalar(c), dom: Vec::new(), cod: Vec::new() })
        }
        FormalOp::Ket(s, q) => {
            let g = q.ground(&qs.base, &ctx.sigma).map_err(SigningError::from)?;
            check_dim_cap(qs, "Sign-Stat", std::slice::from_ref(&g), &[])?;
            let v = eval_expr(&qs.base, &ctx.sigma, s)?;
            let pos = g.domain.index_of_value(&v, qs.base.config.tol).ok_or_else(|| {
                OperatorError::LabelOutsideDomain {
                    term: a.to_string(),
                    label: v.to_string(),
                    register: g.to_string(),
                }
            })?;
            Ok(Evaled { mat: CMatrix::basis_column(g.dim(), pos), dom: vec![g], cod: Vec::new() })
        }
        FormalOp::Bra(s, q) => {
            let ket = FormalOp::Ket(s.clone(), q.clone());
            let e = eval_operator(qs, ctx, &ket)?;
            Ok(Evaled { mat: e.mat.adjoint(), dom: Vec::new(), cod: e.dom })
        }
        FormalOp::OpVar(d, sig) => {
            let dom = ground_distinct(qs, ctx, "Sign-OpV", &sig.dom)?;
            let cod = ground_distinct(qs, ctx, "Sign-OpV", &sig.cod)?;
            check_dim_cap(qs, "Sign-OpV", &dom, &cod)?;
            let mat = ctx
                .eta
                .get(&d.name)
                .ok_or_else(|| OperatorError::UnboundOpVar(d.name.to_string()))?
                .clone();
            let (rows, cols) = (dims(&dom), dims(&cod));
            if mat.rows() != rows || mat.cols() != cols {
                return Err(OperatorError::InterpShape {
                    name: d.name.to_string(),
                    got_rows: mat.rows(),
                    got_cols: mat.cols(),
                    rows,
                    cols,
                });
            }
            Ok(Evaled { mat, dom, cod })
        }
        FormalOp::OpConst(d, params, sig) => {
            let dom = ground_distinct(qs, ctx, "Sign-OpC", &sig.dom)?;
            let cod = ground_distinct(qs, ctx, "Sign-OpC", &sig.cod)?;
            check_dim_cap(qs, "Sign-OpC", &dom, &cod)?;
            let mut vals = Vec::with_capacity(params.len());
            for p in params {
                vals.push(eval_expr(&qs.base, &ctx.sigma, p)?);
            }
            let interp = qs
                .interp(&d.name)
                .ok_or_else(|| OperatorError::UnknownConst(d.name.to_string()))?;
            let dom_dims: Vec<usize> = dom.iter().map(|r| r.dim()).collect();
            let cod_dims: Vec<usize> = cod.iter().map(|r| r.dim()).collect();
            let mat = interp(&vals, &dom_dims, &cod_dims)?;
            let (rows, cols) = (dims(&dom), dims(&cod));
            if mat.rows() != rows || mat.cols() != cols {
                return Err(OperatorError::InterpShape {
                    name: d.name.to_string(),
                    got_rows: mat.rows(),
                    got_cols: mat.cols(),
                    rows,
                    cols,
                });
            }
            Ok(Evaled { mat, dom, cod })
        }
        FormalOp::Scale(c, inner) => {
            let e = eval_operator(qs, ctx, inner)?;
            let v = eval_expr(&qs.base, &ctx.sigma, c)?;
            let c = v.as_complex().expect("scale factors are complex-typed");
            Ok(Evaled { mat: e.mat.scale(c), dom: e.dom, cod: e.cod })
        }
        FormalOp::Adjoint(inner) => {
            let e = eval_operator(qs, ctx, inner)?;
            Ok(Evaled { mat: e.mat.adjoint(), dom: e.cod, cod: e.dom })
        }
        FormalOp::Sum(x, y) => {
            let ex = eval_operator(qs, ctx, x)?;
            let ey = eval_operator(qs, ctx, y)?;
            if !same_register_set(&ex.dom, &ey.dom) || !same_register_set(&ex.cod, &ey.cod) {
                return Err(SigningError::SumMismatch {
                    rule: "Sign-Add",
                    left: ex.signature().to_string(),
                    right: ey.signature().to_string(),
                }
                .into());
            }
            let ey = ey.reordered(&ex.dom, &ex.cod);
            Ok(Evaled { mat: ex.mat.add(&ey.mat), dom: ex.dom, cod: ex.cod })
        }
        FormalOp::Product(x, y) => {
            let ex = eval_operator(qs, ctx, x)?;
            let ey = eval_operator(qs, ctx, y)?;
            if !same_register_set(&ex.cod, &ey.dom) {
                return Err(SigningError::ProductMismatch {
                    rule: "Sign-Mult",
                    left: crate::registers::display_string(&ex.cod),
                    right: crate::registers::display_string(&ey.dom),
                }
                .into());
            }
            check_dim_cap(qs, "Sign-Mult", &ex.dom, &ey.cod)?;
            let aligned = permute_rows(&ey.mat, &ey.dom, &ex.cod);
            Ok(Evaled { mat: ex.mat.mul(&aligned), dom: ex.dom, cod: ey.cod })
        }
        FormalOp::Tensor(x, y) => {
            let ex = eval_operator(qs, ctx, x)?;
            let ey = eval_operator(qs, ctx, y)?;
            let clash_dom = overlap(&ex.dom, &ey.dom);
            let clash_cod = overlap(&ex.cod, &ey.cod);
            if !clash_dom.is_empty() || !clash_cod.is_empty() {
                let refs = clash_dom.iter().chain(&clash_cod);
                return Err(SigningError::TensorOverlap {
                    rule: "Sign-Tensor",
                    refs: refs.map(|r| r.to_string()).collect::<Vec<_>>().join(", "),
                }
                .into());
            }
            let mut dom = ex.dom.clone();
            dom.extend(ey.dom.clone());
            let mut cod = ex.cod.clone();
            cod.extend(ey.cod.clone());
            check_dim_cap(qs, "Sign-Tensor", &dom, &cod)?;
            Ok(Evaled { mat: ex.mat.kron(&ey.mat), dom, cod })
        }
        FormalOp::DefCall(def, _) => {
            Err(SigningError::UnresolvedDef(def.name.to_string()).into())
        }
    }
}

/// Scalar result of a fully contracted operator (1x1 matrix).
pub fn scalar_value(e: &Evaled) -> Option<Complex64> {
    if e.mat.rows() == 1 && e.mat.cols() == 1 {
        Some(e.mat.get(0, 0))
    } else {
        None
    }
}
