//! Dyad normal forms.
//!
//! A normal form is a linear combination of ground dyads
//! `c |row-labels><col-labels|` over canonically ordered registers. It is
//! computed by structural recursion: sums merge coefficients, products
//! contract matching labels (Kronecker deltas), tensors interleave label
//! tuples into canonical register order, and opaque operator
//! variables/constants are expanded entrywise from their matrices. Ground
//! equality of operators is decided by comparing normal forms.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::classical::{eval_expr, DiscreteValue};
use crate::registers::GroundRef;
use crate::semantics::{
    eval_operator, CMatrix, Context, OperatorError, QuantumStructure, SigningError,
};
use crate::term::FormalOp;

type Key = (Vec<DiscreteValue>, Vec<DiscreteValue>);

/// A canonical linear combination of ground dyads.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm {
    /// Row registers in canonical order.
    pub dom: Vec<GroundRef>,
    /// Column registers in canonical order.
    pub cod: Vec<GroundRef>,
    /// Coefficients by (row labels, column labels); no stored coefficient
    /// has modulus below the drop tolerance.
    pub terms: BTreeMap<Key, Complex64>,
}

fn canonical(mut regs: Vec<GroundRef>) -> Vec<GroundRef> {
    regs.sort();
    regs
}

/// Positions of `sub`'s registers inside `full` (both duplicate-free).
fn positions(sub: &[GroundRef], full: &[GroundRef]) -> Vec<usize> {
    sub.iter()
        .map(|r| full.iter().position(|f| f == r).expect("register present"))
        .collect()
}

impl NormalForm {
    fn empty(dom: Vec<GroundRef>, cod: Vec<GroundRef>) -> NormalForm {
        NormalForm { dom: canonical(dom), cod: canonical(cod), terms: BTreeMap::new() }
    }

    fn insert(&mut self, key: Key, coeff: Complex64, tol: f64) {
        let dropped = {
            let entry = self.terms.entry(key.clone()).or_insert(Complex64::new(0.0, 0.0));
            *entry += coeff;
            entry.norm() <= tol
        };
        if dropped {
            self.terms.remove(&key);
        }
    }

    /// Reorders a label tuple from `from` register order to this form's
    /// canonical order using precomputed positions.
    fn dimension(regs: &[GroundRef]) -> usize {
        regs.iter().map(|r| r.dim()).product()
    }

    pub fn dim_dom(&self) -> usize {
        Self::dimension(&self.dom)
    }

    pub fn dim_cod(&self) -> usize {
        Self::dimension(&self.cod)
    }

    /// Dense matrix of the normal form on its canonical bases.
    pub fn to_matrix(&self) -> CMatrix {
        let rows = self.dim_dom();
        let cols = self.dim_cod();
        let mut m = CMatrix::zeros(rows, cols);
        for ((r, c), v) in &self.terms {
            let ri = label_index(&self.dom, r);
            let ci = label_index(&self.cod, c);
            m.set(ri, ci, m.get(ri, ci) + v);
        }
        m
    }

    /// The normal form as a plain operator term (sum of scaled dyads over
    /// constant-labelled kets and bras).
    pub fn to_term(&self) -> Result<FormalOp, crate::term::TermError> {
        use crate::classical::Expr;
        let build_side = |regs: &[GroundRef], labels: &[DiscreteValue], ket: bool| {
            let mut acc: Option<FormalOp> = None;
            for (r, l) in regs.iter().zip(labels) {
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
            Ok::<_, crate::term::TermError>(acc)
        };
        let mut acc: Option<FormalOp> = None;
        for ((r, c), v) in &self.terms {
            let kets = build_side(&self.dom, r, true)?;
            let bras = build_side(&self.cod, c, false)?;
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
        match acc {
            Some(t) => Ok(t),
            None => {
                // The zero operator on the form's registers.
                if self.dom.is_empty() && self.cod.is_empty() {
                    FormalOp::scalar(Expr::real(0.0))
                } else {
                    let regs: Vec<_> =
                        self.dom.iter().chain(&self.cod).map(|r| r.to_quantum_ref()).collect();
                    let mut seen = Vec::new();
                    for r in regs {
                        if !seen.contains(&r) {
                            seen.push(r);
                        }
                    }
                    // 0 . (|0...> or dyad) keeps the signature shape: build
                    // zero-scaled dyad over the first labels.
                    let zeros_dom: Vec<DiscreteValue> =
                        self.dom.iter().map(|r| r.domain.value_at(0)).collect();
                    let zeros_cod: Vec<DiscreteValue> =
                        self.cod.iter().map(|r| r.domain.value_at(0)).collect();
                    let kets = build_side(&self.dom, &zeros_dom, true)?;
                    let bras = build_side(&self.cod, &zeros_cod, false)?;
                    let dyad = match (kets, bras) {
                        (Some(k), Some(b)) => FormalOp::product(k, b)?,
                        (Some(k), None) => k,
                        (None, Some(b)) => b,
                        (None, None) => unreachable!("nonempty registers"),
                    };
                    FormalOp::scale(Expr::real(0.0), dyad)
                }
            }
        }
    }

    /// Entrywise comparison of two normal forms over the same registers.
    pub fn approx_eq(&self, other: &NormalForm, tol: f64) -> bool {
        if self.dom != other.dom || self.cod != other.cod {
            return false;
        }
        for (k, v) in &self.terms {
            let w = other.terms.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0));
            if (v - w).norm() > tol {
                return false;
            }
        }
        for (k, w) in &other.terms {
            if !self.terms.contains_key(k) && w.norm() > tol {
                return false;
            }
        }
        true
    }
}

fn label_index(regs: &[GroundRef], labels: &[DiscreteValue]) -> usize {
    let mut idx = 0usize;
    for (r, l) in regs.iter().zip(labels) {
        idx = idx * r.dim() + r.domain.index_of(*l).expect("label within domain");
    }
    idx
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let regs = |rs: &[GroundRef]| {
            rs.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")
        };
        let labels = |ls: &[DiscreteValue]| {
            ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
        };
        for (i, ((r, c), v)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:?}{:+?}i)", v.re, v.im)?;
            if !self.dom.is_empty() {
                write!(f, " |{}>_({})", labels(r), regs(&self.dom))?;
            }
            if !self.cod.is_empty() {
                write!(f, " <{}|_({})", labels(c), regs(&self.cod))?;
            }
        }
        Ok(())
    }
}

/// Computes the dyad normal form of a term in a context.
pub fn normalize(
    qs: &QuantumStructure,
    ctx: &Context,
    a: &FormalOp,
) -> Result<NormalForm, OperatorError> {
    let tol = qs.base.config.tol;
    match a {
        FormalOp::Scalar(c) => {
            let v = eval_expr(&qs.base, &ctx.sigma, c)?;
            let v = v.as_complex().expect("scalar expressions are complex-typed");
            let mut nf = NormalForm::empty(Vec::new(), Vec::new());
            if v.norm() > tol {
                nf.terms.insert((Vec::new(), Vec::new()), v);
            }
            Ok(nf)
        }
        FormalOp::Ket(s, q) => {
            let g = q.ground(&qs.base, &ctx.sigma).map_err(SigningError::from)?;
            let v = eval_expr(&qs.base, &ctx.sigma, s)?;
            let pos = g.domain.index_of_value(&v, tol).ok_or_else(|| {
                OperatorError::LabelOutsideDomain {
                    term: a.to_string(),
                    label: v.to_string(),
                    register: g.to_string(),
                }
            })?;
            let label = g.domain.value_at(pos);
            let mut nf = NormalForm::empty(vec![g], Vec::new());
            nf.terms.insert((vec![label], Vec::new()), Complex64::new(1.0, 0.0));
            Ok(nf)
        }
        FormalOp::Bra(s, q) => {
            let inner = normalize(qs, ctx, &FormalOp::Ket(s.clone(), q.clone()))?;
            Ok(adjoint_nf(&inner))
        }
        FormalOp::OpVar(_, _) | FormalOp::OpConst(_, _, _) => {
            // Matrix representation of an opaque operator: expand the
            // evaluated matrix entrywise into dyads.
            let e = eval_operator(qs, ctx, a)?;
            let dom = canonical(e.dom.clone());
            let cod = canonical(e.cod.clone());
            let aligned = e.reordered(&dom, &cod);
            let mut nf = NormalForm::empty(dom, cod);
            for i in 0..aligned.mat.rows() {
                for j in 0..aligned.mat.cols() {
                    let v = aligned.mat.get(i, j);
                    if v.norm() > tol {
                        nf.terms.insert(
                            (labels_of(&nf.dom, i), labels_of(&nf.cod, j)),
                            v,
                        );
                    }
                }
            }
            Ok(nf)
        }
        FormalOp::Scale(c, inner) => {
            let v = eval_expr(&qs.base, &ctx.sigma, c)?;
            let v = v.as_complex().expect("scale factors are complex-typed");
            let nf = normalize(qs, ctx, inner)?;
            let mut out = NormalForm { dom: nf.dom, cod: nf.cod, terms: BTreeMap::new() };
            for (k, w) in nf.terms {
                let c = w * v;
                if c.norm() > tol {
                    out.terms.insert(k, c);
                }
            }
            Ok(out)
        }
        FormalOp::Adjoint(inner) => Ok(adjoint_nf(&normalize(qs, ctx, inner)?)),
        FormalOp::Sum(x, y) => {
            let nx = normalize(qs, ctx, x)?;
            let ny = normalize(qs, ctx, y)?;
            if nx.dom != ny.dom || nx.cod != ny.cod {
                return Err(SigningError::SumMismatch {
                    rule: "Sign-Add",
                    left: crate::registers::display_string(&nx.dom),
                    right: crate::registers::display_string(&ny.dom),
                }
                .into());
            }
            let mut out = nx;
            for (k, v) in ny.terms {
                out.insert(k, v, tol);
            }
            Ok(out)
        }
        FormalOp::Product(x, y) => {
            let nx = normalize(qs, ctx, x)?;
            let ny = normalize(qs, ctx, y)?;
            if nx.cod != ny.dom {
                return Err(SigningError::ProductMismatch {
                    rule: "Sign-Mult",
                    left: crate::registers::display_string(&nx.cod),
                    right: crate::registers::display_string(&ny.dom),
                }
                .into());
            }
            // Group the right factor's terms by row labels, then contract.
            let mut by_row: BTreeMap<&Vec<DiscreteValue>, Vec<(&Key, &Complex64)>> =
                BTreeMap::new();
            for (k, v) in &ny.terms {
                by_row.entry(&k.0).or_default().push((k, v));
            }
            let mut out = NormalForm::empty(nx.dom.clone(), ny.cod.clone());
            for ((r, mid), v) in &nx.terms {
                if let Some(matches) = by_row.get(mid) {
                    for (k, w) in matches {
                        out.insert((r.clone(), k.1.clone()), *v * **w, tol);
                    }
                }
            }
            Ok(out)
        }
        FormalOp::Tensor(x, y) => {
            let nx = normalize(qs, ctx, x)?;
            let ny = normalize(qs, ctx, y)?;
            for r in &nx.dom {
                if ny.dom.contains(r) {
                    return Err(SigningError::TensorOverlap {
                        rule: "Sign-Tensor",
                        refs: r.to_string(),
                    }
                    .into());
                }
            }
            for r in &nx.cod {
                if ny.cod.contains(r) {
                    return Err(SigningError::TensorOverlap {
                        rule: "Sign-Tensor",
                        refs: r.to_string(),
                    }
                    .into());
                }
            }
            let mut dom = nx.dom.clone();
            dom.extend(ny.dom.iter().cloned());
            let mut cod = nx.cod.clone();
            cod.extend(ny.cod.iter().cloned());
            let out_dom = canonical(dom.clone());
            let out_cod = canonical(cod.clone());
            // Where each concatenated register lands in canonical order.
            let dom_pos = positions(&dom, &out_dom);
            let cod_pos = positions(&cod, &out_cod);
            let mut out = NormalForm { dom: out_dom, cod: out_cod, terms: BTreeMap::new() };
            for ((ra, ca), va) in &nx.terms {
                for ((rb, cb), vb) in &ny.terms {
                    let mut row = vec![DiscreteValue::Bool(false); dom.len()];
                    for (i, l) in ra.iter().chain(rb).enumerate() {
                        row[dom_pos[i]] = *l;
                    }
                    let mut col = vec![DiscreteValue::Bool(false); cod.len()];
                    for (i, l) in ca.iter().chain(cb).enumerate() {
                        col[cod_pos[i]] = *l;
                    }
                    out.insert((row, col), *va * *vb, tol);
                }
            }
            Ok(out)
        }
        FormalOp::DefCall(def, _) => {
            Err(SigningError::UnresolvedDef(def.name.to_string()).into())
        }
    }
}

fn labels_of(regs: &[GroundRef], mut idx: usize) -> Vec<DiscreteValue> {
    let mut out = vec![DiscreteValue::Bool(false); regs.len()];
    for (slot, r) in out.iter_mut().zip(regs).rev() {
        let d = r.dim();
        *slot = r.domain.value_at(idx % d);
        idx /= d;
    }
    out
}

fn adjoint_nf(nf: &NormalForm) -> NormalForm {
    let mut out = NormalForm {
        dom: nf.cod.clone(),
        cod: nf.dom.clone(),
        terms: BTreeMap::new(),
    };
    for ((r, c), v) in &nf.terms {
        out.terms.insert((c.clone(), r.clone()), v.conj());
    }
    out
}

/// Decides ground operator equality by comparing normal forms; agrees with
/// the matrix-level `compare(Equal)`.
pub fn decide_ground_equality(
    qs: &QuantumStructure,
    ctx: &Context,
    a: &FormalOp,
    b: &FormalOp,
) -> Result<bool, OperatorError> {
    let na = match normalize(qs, ctx, a) {
        Ok(n) => n,
        Err(e) if e.is_resource() => return Err(e),
        Err(_) => return Ok(false),
    };
    let nb = match normalize(qs, ctx, b) {
        Ok(n) => n,
        Err(e) if e.is_resource() => return Err(e),
        Err(_) => return Ok(false),
    };
    Ok(na.approx_eq(&nb, qs.base.config.tol))
}
