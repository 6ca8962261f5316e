//! Built-in operator constants and their matrix interpretations.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::classical::{BasicType, Expr, Value};
use crate::registers::QuantumRef;
use crate::semantics::{CMatrix, OperatorError, QuantumStructure};
use crate::term::{FormalOp, OpConstDecl, QuantumTypeSpec, Signature, TermError};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_i() -> CMatrix {
    CMatrix::identity(2)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::two_by_two(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn pauli_y() -> CMatrix {
    CMatrix::two_by_two(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

pub fn pauli_z() -> CMatrix {
    CMatrix::two_by_two(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

pub fn hadamard() -> CMatrix {
    CMatrix::two_by_two(
        c(FRAC_1_SQRT_2, 0.0),
        c(FRAC_1_SQRT_2, 0.0),
        c(FRAC_1_SQRT_2, 0.0),
        c(-FRAC_1_SQRT_2, 0.0),
    )
}

/// Control on the first (major) register.
pub fn cnot() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m.set(0, 0, c(1.0, 0.0));
    m.set(1, 1, c(1.0, 0.0));
    m.set(2, 3, c(1.0, 0.0));
    m.set(3, 2, c(1.0, 0.0));
    m
}

/// `cos(t/2) I - i sin(t/2) P` for a Pauli `P`.
pub fn rotation_matrix(axis: &CMatrix, theta: Complex64) -> CMatrix {
    let half = theta * 0.5;
    pauli_i().scale(half.cos()).add(&axis.scale(c(0.0, -1.0) * half.sin()))
}

/// The discrete Fourier transform on `n` qubits, `F[j,k] = w^(jk) / sqrt(N)`
/// with `w = exp(2 pi i / 2^n)`.
pub fn qft_matrix(n: u32) -> CMatrix {
    let size = 1usize << n;
    let scale = 1.0 / (size as f64).sqrt();
    CMatrix::from_fn(size, size, |j, k| {
        let phase = 2.0 * PI * ((j * k) % size) as f64 / size as f64;
        c(phase.cos() * scale, phase.sin() * scale)
    })
}

macro_rules! decl_fn {
    ($fn_name:ident, $name:literal, $params:expr, $qtype:expr) => {
        pub fn $fn_name() -> Arc<OpConstDecl> {
            static CELL: OnceLock<Arc<OpConstDecl>> = OnceLock::new();
            CELL.get_or_init(|| {
                Arc::new(OpConstDecl { name: $name.into(), param_types: $params, qtype: $qtype })
            })
            .clone()
        }
    };
}

fn qubit1() -> QuantumTypeSpec {
    QuantumTypeSpec::Fixed { dom: vec![BasicType::Bool], cod: vec![BasicType::Bool] }
}

fn qubit2() -> QuantumTypeSpec {
    QuantumTypeSpec::Fixed {
        dom: vec![BasicType::Bool, BasicType::Bool],
        cod: vec![BasicType::Bool, BasicType::Bool],
    }
}

decl_fn!(identity_decl, "I", vec![], QuantumTypeSpec::SquareAny);
decl_fn!(x_decl, "X", vec![], qubit1());
decl_fn!(y_decl, "Y", vec![], qubit1());
decl_fn!(z_decl, "Z", vec![], qubit1());
decl_fn!(h_decl, "H", vec![], qubit1());
decl_fn!(cnot_decl, "CNOT", vec![], qubit2());
decl_fn!(ph_decl, "Ph", vec![], QuantumTypeSpec::SquareAny);
decl_fn!(rx_decl, "R_x", vec![BasicType::Complex], qubit1());
decl_fn!(ry_decl, "R_y", vec![BasicType::Complex], qubit1());
decl_fn!(rz_decl, "R_z", vec![BasicType::Complex], qubit1());
decl_fn!(qft_decl, "QFT", vec![BasicType::Int], QuantumTypeSpec::SquareAny);
decl_fn!(
    bell_decl,
    "bell",
    vec![BasicType::Bool, BasicType::Bool],
    QuantumTypeSpec::Fixed { dom: vec![BasicType::Bool, BasicType::Bool], cod: vec![] }
);

/// All built-in constant declarations, for name lookup in front ends.
pub fn builtin_decls() -> Vec<Arc<OpConstDecl>> {
    vec![
        identity_decl(),
        x_decl(),
        y_decl(),
        z_decl(),
        h_decl(),
        cnot_decl(),
        ph_decl(),
        rx_decl(),
        ry_decl(),
        rz_decl(),
        qft_decl(),
        bell_decl(),
    ]
}

/// The Bell state `(|0,y> + (-1)^x |1, not y>)/sqrt(2)` as a 4x1 column,
/// control-major.
pub fn bell_vector(x: bool, y: bool) -> CMatrix {
    let mut v = CMatrix::zeros(4, 1);
    let amp = c(FRAC_1_SQRT_2, 0.0);
    v.set(y as usize, 0, amp);
    v.set(2 + (!y) as usize, 0, if x { amp.scale(-1.0) } else { amp });
    v
}

fn fixed(m: CMatrix) -> crate::semantics::ConstInterp {
    Arc::new(move |_params, _dom, _cod| Ok(m.clone()))
}

fn rotation_interp(axis: CMatrix, name: &'static str) -> crate::semantics::ConstInterp {
    Arc::new(move |params, _dom, _cod| {
        let theta = params[0].as_complex().ok_or_else(|| OperatorError::Interp {
            name: name.to_string(),
            reason: "angle parameter must be numeric".into(),
        })?;
        Ok(rotation_matrix(&axis, theta))
    })
}

/// Registers the gate table in a quantum structure.
pub fn register_builtins(qs: &mut QuantumStructure) {
    qs.register_const(
        identity_decl(),
        Arc::new(|_p, dom, _c| Ok(CMatrix::identity(dom.iter().product()))),
    );
    qs.register_const(x_decl(), fixed(pauli_x()));
    qs.register_const(y_decl(), fixed(pauli_y()));
    qs.register_const(z_decl(), fixed(pauli_z()));
    qs.register_const(h_decl(), fixed(hadamard()));
    qs.register_const(cnot_decl(), fixed(cnot()));
    qs.register_const(
        ph_decl(),
        Arc::new(|_p, dom, _c| {
            Ok(CMatrix::identity(dom.iter().product()).scale(c(-1.0, 0.0)))
        }),
    );
    qs.register_const(rx_decl(), rotation_interp(pauli_x(), "R_x"));
    qs.register_const(ry_decl(), rotation_interp(pauli_y(), "R_y"));
    qs.register_const(rz_decl(), rotation_interp(pauli_z(), "R_z"));
    qs.register_const(
        bell_decl(),
        Arc::new(|params, _dom, _cod| {
            let (x, y) = (params[0].as_bool(), params[1].as_bool());
            match (x, y) {
                (Some(x), Some(y)) => Ok(bell_vector(x, y)),
                _ => Err(OperatorError::Interp {
                    name: "bell".into(),
                    reason: "parameters must be Bool".into(),
                }),
            }
        }),
    );
    qs.register_const(
        qft_decl(),
        Arc::new(|params, dom, _cod| {
            let n = params[0].as_int().unwrap_or(-1);
            let dim: usize = dom.iter().product();
            if !(0..32).contains(&n) || dim != (1usize << n) {
                return Err(OperatorError::Interp {
                    name: "QFT".into(),
                    reason: format!("registers of dimension {dim} do not form {n} qubits"),
                });
            }
            Ok(qft_matrix(n as u32))
        }),
    );
}

/// A quantum structure with the builtin gate table installed.
pub fn quantum_structure(base: crate::classical::Structure) -> QuantumStructure {
    let mut qs = QuantumStructure::new(base);
    register_builtins(&mut qs);
    qs
}

/// `G[q]` for a parameterless square gate.
pub fn gate1(decl: Arc<OpConstDecl>, q: QuantumRef) -> FormalOp {
    FormalOp::opconst(decl, vec![], Signature::square(vec![q]))
        .expect("single-qubit gate shapes are fixed")
}

/// `CNOT[a, b]` and friends.
pub fn gate2(decl: Arc<OpConstDecl>, a: QuantumRef, b: QuantumRef) -> FormalOp {
    FormalOp::opconst(decl, vec![], Signature::square(vec![a, b]))
        .expect("two-qubit gate shapes are fixed")
}

/// `R_a(theta)[q]`.
pub fn rotation(decl: Arc<OpConstDecl>, theta: Expr, q: QuantumRef) -> Result<FormalOp, TermError> {
    FormalOp::opconst(decl, vec![theta], Signature::square(vec![q]))
}

/// `QFT(n)[regs]`.
pub fn qft_on(n: i64, regs: Vec<QuantumRef>) -> Result<FormalOp, TermError> {
    FormalOp::opconst(qft_decl(), vec![Expr::int(n)], Signature::square(regs))
}

/// Identity on an explicit register string.
pub fn identity_on(regs: Vec<QuantumRef>) -> Result<FormalOp, TermError> {
    FormalOp::opconst(identity_decl(), vec![], Signature::square(regs))
}

/// The zero operator on a register string, written `0 . I[regs]`.
pub fn zero_on(regs: Vec<QuantumRef>) -> Result<FormalOp, TermError> {
    FormalOp::scale(Expr::real(0.0), identity_on(regs)?)
}

pub fn complex_value(re: f64, im: f64) -> Value {
    Value::Complex(c(re, im))
}
