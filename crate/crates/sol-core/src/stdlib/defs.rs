//! Recursive state definitions and symbolic state families: Bell states,
//! equal superposition, GHZ, the QFT data structure, and the basis-state
//! projector complement.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::sync::Arc;

use crate::classical::{ArrayRef, BasicType, BuiltinOp, Expr, Formula};
use crate::registers::{QuantumRef, QuantumVarDecl};
use crate::term::{FormalOp, TermError};

use super::recursive::{DefBody, DefCase, DefParam, RecursiveDef, Template, UnrollError};

fn int_var(name: &str) -> Expr {
    Expr::var(name, BasicType::Int)
}

fn eq(a: Expr, b: Expr) -> Formula {
    Formula::Atom(Expr::app(BuiltinOp::Eq, vec![a, b]).unwrap())
}

fn gt(a: Expr, b: Expr) -> Formula {
    Formula::Atom(Expr::app(BuiltinOp::Gt, vec![a, b]).unwrap())
}

fn minus_one(e: Expr) -> Expr {
    Expr::app(BuiltinOp::Sub, vec![e, Expr::int(1)]).unwrap()
}

fn cell(q: &Arc<QuantumVarDecl>, idx: Expr) -> QuantumRef {
    QuantumRef::subscripted(q.clone(), vec![idx]).expect("Int-indexed qubit array")
}

/// `(|0> + |1>)/sqrt(2)` on one register.
fn plus_factor(reg: QuantumRef) -> FormalOp {
    FormalOp::scale(
        Expr::real(FRAC_1_SQRT_2),
        FormalOp::sum(
            FormalOp::ket(Expr::int(0), reg.clone()).unwrap(),
            FormalOp::ket(Expr::int(1), reg).unwrap(),
        )
        .unwrap(),
    )
    .unwrap()
}

/// The Bell state `(|0,y> + (-1)^x |1, not y>)/sqrt(2)` on `(qa, qb)`, with
/// Bool expressions `x`, `y` as parameters.
pub fn bell(
    x: Expr,
    y: Expr,
    qa: QuantumRef,
    qb: QuantumRef,
) -> Result<FormalOp, TermError> {
    let not_y = Expr::app(BuiltinOp::Not, vec![y.clone()]).expect("y is Bool");
    let sign = Expr::ite(x, Expr::real(-1.0), Expr::real(1.0)).expect("x is Bool");
    let left = FormalOp::tensor(
        FormalOp::ket(Expr::int(0), qa.clone())?,
        FormalOp::ket(y, qb.clone())?,
    );
    let right = FormalOp::scale(
        sign,
        FormalOp::tensor(FormalOp::ket(Expr::int(1), qa)?, FormalOp::ket(not_y, qb)?),
    )?;
    FormalOp::scale(Expr::real(FRAC_1_SQRT_2), FormalOp::sum(left, right)?)
}

/// The equal superposition `|S(m, n)>` over `q[m..n]`:
/// the single-qubit plus state at `n = m`, extended one register at a time.
pub fn eqsup_def(q: Arc<QuantumVarDecl>) -> Arc<RecursiveDef> {
    let m = || int_var("m");
    let n = || int_var("n");
    let base = DefCase {
        guard: eq(n(), m()),
        body: DefBody::Template(Template::Atom(plus_factor(cell(&q, m())))),
    };
    let step = DefCase {
        guard: gt(n(), m()),
        body: DefBody::Template(Template::Tensor(
            Box::new(Template::SelfCall(vec![m(), minus_one(n())])),
            Box::new(Template::Atom(plus_factor(cell(&q, n())))),
        )),
    };
    Arc::new(RecursiveDef {
        name: "S".into(),
        params: vec![
            DefParam { name: "m".into(), ty: BasicType::Int },
            DefParam { name: "n".into(), ty: BasicType::Int },
        ],
        cases: vec![base, step],
    })
}

/// The GHZ state `|GHZ(m, n)>` over `q[m..n]`: the plus state at `n = m`,
/// then `CNOT[q[n-1], q[n]]` applied to `|GHZ(m, n-1)> (x) |0>_{q[n]}`.
pub fn ghz_def(q: Arc<QuantumVarDecl>) -> Arc<RecursiveDef> {
    let m = || int_var("m");
    let n = || int_var("n");
    let base = DefCase {
        guard: eq(n(), m()),
        body: DefBody::Template(Template::Atom(plus_factor(cell(&q, m())))),
    };
    let gate = super::gates::gate2(
        super::gates::cnot_decl(),
        cell(&q, minus_one(n())),
        cell(&q, n()),
    );
    let step = DefCase {
        guard: gt(n(), m()),
        body: DefBody::Template(Template::Apply(
            Box::new(Template::Atom(gate)),
            Box::new(Template::Tensor(
                Box::new(Template::SelfCall(vec![m(), minus_one(n())])),
                Box::new(Template::Atom(
                    FormalOp::ket(Expr::int(0), cell(&q, n())).unwrap(),
                )),
            )),
        )),
    };
    Arc::new(RecursiveDef {
        name: "GHZ".into(),
        params: vec![
            DefParam { name: "m".into(), ty: BasicType::Int },
            DefParam { name: "n".into(), ty: BasicType::Int },
        ],
        cases: vec![base, step],
    })
}

/// The computational basis state `|(j, k:l)>` of `q[k..l]` labelled by the
/// classical bit array `j`.
pub fn basis_state_def(j: ArrayRef, q: Arc<QuantumVarDecl>) -> Arc<RecursiveDef> {
    let k = || int_var("k");
    let l = || int_var("l");
    let bit = |idx: Expr| Expr::index(j.clone(), vec![idx]).expect("Int-indexed bit array");
    let base = DefCase {
        guard: eq(k(), l()),
        body: DefBody::Template(Template::Atom(
            FormalOp::ket(bit(l()), cell(&q, l())).unwrap(),
        )),
    };
    let step = DefCase {
        guard: gt(l(), k()),
        body: DefBody::Template(Template::Tensor(
            Box::new(Template::SelfCall(vec![k(), minus_one(l())])),
            Box::new(Template::Atom(FormalOp::ket(bit(l()), cell(&q, l())).unwrap())),
        )),
    };
    Arc::new(RecursiveDef {
        name: "Jstate".into(),
        params: vec![
            DefParam { name: "k".into(), ty: BasicType::Int },
            DefParam { name: "l".into(), ty: BasicType::Int },
        ],
        cases: vec![base, step],
    })
}

/// Binary-fraction phase factor `(|0> + e^{2 pi i 0.j[a:b]} |1>)/sqrt(2)`
/// on one register, with `0.j[a:b] = sum_{s=a..b} j[s] 2^{a-s-1}`.
fn qft_factor(j: &ArrayRef, reg: QuantumRef, a: i64, b: i64) -> Result<FormalOp, UnrollError> {
    let mut frac: Option<Expr> = None;
    for s in a..=b {
        let bit = Expr::index(j.clone(), vec![Expr::int(s)])?;
        let weight = (a - s - 1) as f64;
        let term = Expr::ite(bit, Expr::real(2f64.powf(weight)), Expr::real(0.0))?;
        frac = Some(match frac {
            None => term,
            Some(f) => Expr::app(BuiltinOp::Add, vec![f, term])?,
        });
    }
    let frac = frac.expect("nonempty segment");
    let phase = Expr::app(
        BuiltinOp::Exp,
        vec![Expr::app(BuiltinOp::Mul, vec![Expr::complex(0.0, TAU), frac])?],
    )?;
    Ok(FormalOp::scale(
        Expr::real(FRAC_1_SQRT_2),
        FormalOp::sum(
            FormalOp::ket(Expr::int(0), reg.clone())?,
            FormalOp::scale(phase, FormalOp::ket(Expr::int(1), reg)?)?,
        )?,
    )?)
}

/// The QFT image state `|QFT(j, k:l)>` on `q[k..l]`, built as
/// `|QFT(j, k:r)>` for `r` from `k` to `l`: the factor on `q[k]` carries the
/// phase `0.j[l]` and the factor added at `q[r]` carries `0.j[l-r+1 : l]`.
///
/// Parameters are `(k, r, l)`; the full state is the call with `r = l`.
pub fn qft_state_def(j: ArrayRef, q: Arc<QuantumVarDecl>) -> Arc<RecursiveDef> {
    let k = || int_var("k");
    let r = || int_var("r");
    let base = {
        let j = j.clone();
        let q = q.clone();
        DefCase {
            guard: eq(r(), k()),
            body: DefBody::Native(Arc::new(move |_st, args| {
                let (k, l) = (args[0].as_int().unwrap(), args[2].as_int().unwrap());
                Ok(Template::Atom(qft_factor(&j, cell(&q, Expr::int(k)), l, l)?))
            })),
        }
    };
    let step = {
        let j = j.clone();
        let q = q.clone();
        DefCase {
            guard: gt(r(), k()),
            body: DefBody::Native(Arc::new(move |_st, args| {
                let (k, r, l) = (
                    args[0].as_int().unwrap(),
                    args[1].as_int().unwrap(),
                    args[2].as_int().unwrap(),
                );
                let factor = qft_factor(&j, cell(&q, Expr::int(r)), l - r + 1, l)?;
                Ok(Template::Tensor(
                    Box::new(Template::SelfCall(vec![
                        Expr::int(k),
                        Expr::int(r - 1),
                        Expr::int(l),
                    ])),
                    Box::new(Template::Atom(factor)),
                ))
            })),
        }
    };
    Arc::new(RecursiveDef {
        name: "QFTS".into(),
        params: vec![
            DefParam { name: "k".into(), ty: BasicType::Int },
            DefParam { name: "r".into(), ty: BasicType::Int },
            DefParam { name: "l".into(), ty: BasicType::Int },
        ],
        cases: vec![base, step],
    })
}

/// The projector onto the complement of the all-zero basis state of
/// `q[k..l]`: `I - |0...0><0...0|`.
pub fn projector_complement(
    q: &Arc<QuantumVarDecl>,
    k: i64,
    l: i64,
) -> Result<FormalOp, TermError> {
    assert!(k <= l, "nonempty register segment");
    let mut kets: Option<FormalOp> = None;
    let mut regs = Vec::new();
    for i in k..=l {
        let reg = cell(q, Expr::int(i));
        regs.push(reg.clone());
        let atom = FormalOp::ket(Expr::int(0), reg)?;
        kets = Some(match kets {
            None => atom,
            Some(t) => FormalOp::tensor(t, atom),
        });
    }
    let kets = kets.expect("nonempty segment");
    let dyad = FormalOp::product(kets.clone(), FormalOp::adjoint(kets))?;
    FormalOp::minus(super::gates::identity_on(regs)?, dyad)
}
