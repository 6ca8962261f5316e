//! Seeded random-instance generators used by the property tests, the
//! acceptance suite and the benchmarks.
//!
//! Everything here is deterministic in the seed; no generator touches global
//! RNG state.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classical::{
    ArrayRef, BasicType, BuiltinOp, Expr, Formula, State, Structure, Value, VarRef,
};

/// A small deterministic RNG wrapper.
pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform in `0..n` (n > 0).
    pub fn pick(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn flag(&mut self) -> bool {
        self.rng.gen()
    }

    pub fn real(&mut self) -> f64 {
        self.rng.gen_range(-1.0..1.0)
    }

    /// Standard complex Gaussian.
    pub fn gaussian(&mut self) -> Complex64 {
        // Box-Muller.
        let u1: f64 = self.rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = self.rng.gen_range(0.0..std::f64::consts::TAU);
        let r = (-2.0 * u1.ln()).sqrt();
        Complex64::new(r * u2.cos(), r * u2.sin()) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn fork(&mut self) -> Gen {
        Gen::new(self.rng.gen())
    }
}

/// Stable 64-bit FNV-1a hash, used to derive per-name sample streams from
/// the master seed without depending on the process hasher.
pub fn stable_hash(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// A vocabulary of classical variables to draw random terms from.
pub struct TermPool {
    pub int_vars: Vec<VarRef>,
    pub bool_vars: Vec<VarRef>,
    pub arrays: Vec<ArrayRef>,
    pub int_range: (i64, i64),
}

impl TermPool {
    /// Pool over the variables declared in `st`.
    pub fn small(st: &Structure) -> TermPool {
        let mut int_vars = Vec::new();
        let mut bool_vars = Vec::new();
        for d in st.vars() {
            let r = VarRef { name: d.name.clone(), ty: d.ty };
            match d.ty {
                BasicType::Int => int_vars.push(r),
                BasicType::Bool => bool_vars.push(r),
                BasicType::Complex => {}
            }
        }
        let arrays = st
            .arrays()
            .iter()
            .map(|d| ArrayRef { name: d.name.clone(), ty: d.ty.clone() })
            .collect();
        TermPool { int_vars, bool_vars, arrays, int_range: st.config.int_range }
    }

    pub fn random_state(&self, st: &Structure, g: &mut Gen) -> State {
        let mut sigma = st.default_state();
        let (lo, hi) = self.int_range;
        for v in &self.int_vars {
            sigma = sigma.update(v.name.clone(), Value::Int(g.int(lo, hi)));
        }
        for v in &self.bool_vars {
            sigma = sigma.update(v.name.clone(), Value::Bool(g.flag()));
        }
        for a in &self.arrays {
            if let Some(mut arr) = sigma.get_array(&a.name).cloned() {
                for cell in arr.values.iter_mut() {
                    *cell = match a.ty.value {
                        BasicType::Int => Value::Int(g.int(lo, hi)),
                        BasicType::Bool => Value::Bool(g.flag()),
                        BasicType::Complex => {
                            Value::Complex(Complex64::new(g.real(), g.real()))
                        }
                    };
                }
                sigma.set_array(a.name.clone(), arr);
            }
        }
        sigma
    }

    pub fn random_int_expr(&self, g: &mut Gen, depth: usize) -> Expr {
        if depth == 0 || g.pick(4) == 0 {
            return if !self.int_vars.is_empty() && g.flag() {
                Expr::Var(self.int_vars[g.pick(self.int_vars.len())].clone())
            } else {
                Expr::int(g.int(-4, 4))
            };
        }
        match g.pick(6) {
            0 | 1 => {
                let op = [BuiltinOp::Add, BuiltinOp::Sub, BuiltinOp::Mul][g.pick(3)];
                Expr::app(
                    op,
                    vec![self.random_int_expr(g, depth - 1), self.random_int_expr(g, depth - 1)],
                )
                .unwrap()
            }
            2 => Expr::app(BuiltinOp::Neg, vec![self.random_int_expr(g, depth - 1)]).unwrap(),
            3 => Expr::ite(
                self.random_bool_expr(g, depth - 1),
                self.random_int_expr(g, depth - 1),
                self.random_int_expr(g, depth - 1),
            )
            .unwrap(),
            _ => {
                // Array lookup when an Int-valued array with Bool subscripts
                // is available, else fall back to arithmetic.
                if let Some(a) = self
                    .arrays
                    .iter()
                    .find(|a| a.ty.value == BasicType::Int && a.ty.args == [BasicType::Bool])
                {
                    Expr::index(a.clone(), vec![self.random_bool_expr(g, depth - 1)]).unwrap()
                } else {
                    self.random_int_expr(g, depth - 1)
                }
            }
        }
    }

    pub fn random_bool_expr(&self, g: &mut Gen, depth: usize) -> Expr {
        if depth == 0 || g.pick(4) == 0 {
            return if !self.bool_vars.is_empty() && g.flag() {
                Expr::Var(self.bool_vars[g.pick(self.bool_vars.len())].clone())
            } else {
                Expr::bool(g.flag())
            };
        }
        match g.pick(5) {
            0 => Expr::app(
                [BuiltinOp::And, BuiltinOp::Or, BuiltinOp::Xor][g.pick(3)],
                vec![self.random_bool_expr(g, depth - 1), self.random_bool_expr(g, depth - 1)],
            )
            .unwrap(),
            1 => Expr::app(BuiltinOp::Not, vec![self.random_bool_expr(g, depth - 1)]).unwrap(),
            _ => Expr::app(
                [BuiltinOp::Eq, BuiltinOp::Ne, BuiltinOp::Lt, BuiltinOp::Le][g.pick(4)],
                vec![self.random_int_expr(g, depth - 1), self.random_int_expr(g, depth - 1)],
            )
            .unwrap(),
        }
    }

    pub fn random_expr(&self, g: &mut Gen, depth: usize) -> Expr {
        if g.flag() {
            self.random_int_expr(g, depth)
        } else {
            self.random_bool_expr(g, depth)
        }
    }

    pub fn random_formula(&self, g: &mut Gen, depth: usize) -> Formula {
        if depth == 0 || g.pick(3) == 0 {
            return Formula::Atom(self.random_bool_expr(g, depth.min(2)));
        }
        match g.pick(6) {
            0 => Formula::not(self.random_formula(g, depth - 1)),
            1 => Formula::and(
                self.random_formula(g, depth - 1),
                self.random_formula(g, depth - 1),
            ),
            2 => Formula::or(
                self.random_formula(g, depth - 1),
                self.random_formula(g, depth - 1),
            ),
            3 => Formula::implies(
                self.random_formula(g, depth - 1),
                self.random_formula(g, depth - 1),
            ),
            _ => {
                let fresh: Arc<str> = format!("w{}", g.pick(3)).into();
                let ty = if g.flag() { BasicType::Bool } else { BasicType::Int };
                let v = VarRef { name: fresh, ty };
                // Bound variable sometimes used in the body through the pools.
                let body = self.random_formula(g, depth - 1);
                if g.flag() {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                }
            }
        }
    }

    /// A random substitution pair `(x, t)` with matching types.
    pub fn random_binding(&self, g: &mut Gen) -> (VarRef, Expr) {
        if !self.int_vars.is_empty() && (self.bool_vars.is_empty() || g.flag()) {
            let x = self.int_vars[g.pick(self.int_vars.len())].clone();
            let t = self.random_int_expr(g, 2);
            (x, t)
        } else {
            let x = self.bool_vars[g.pick(self.bool_vars.len())].clone();
            let t = self.random_bool_expr(g, 2);
            (x, t)
        }
    }
}

// ---------------------------------------------------------------------------
// Random matrices
// ---------------------------------------------------------------------------

use crate::semantics::CMatrix;

/// Gaussian complex matrix (generally non-normal).
pub fn gaussian_matrix(g: &mut Gen, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| g.gaussian())
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix with the
/// phases of the triangular factor folded back in.
pub fn haar_unitary(g: &mut Gen, n: usize) -> CMatrix {
    let a = nalgebra::DMatrix::from_fn(n, n, |_, _| g.gaussian());
    let qr = a.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let d = r[(j, j)];
            let phase = if d.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { d / d.norm() };
            out.set(i, j, q[(i, j)] * phase);
        }
    }
    out
}

/// Random Hermitian matrix `(A + A^H)/2`.
pub fn random_hermitian(g: &mut Gen, n: usize) -> CMatrix {
    let a = gaussian_matrix(g, n, n);
    a.add(&a.adjoint()).scale(Complex64::new(0.5, 0.0))
}

/// Random positive semidefinite Gram matrix `A^H A`.
pub fn random_psd(g: &mut Gen, n: usize) -> CMatrix {
    let a = gaussian_matrix(g, n, n);
    a.adjoint().mul(&a)
}

/// Random density operator: a normalised Gram matrix.
pub fn random_density(g: &mut Gen, n: usize) -> CMatrix {
    let p = random_psd(g, n);
    let t = p.trace();
    p.scale(Complex64::new(1.0, 0.0) / t)
}

/// Random unit column vector.
pub fn random_unit_vector(g: &mut Gen, n: usize) -> CMatrix {
    let v = gaussian_matrix(g, n, 1);
    let norm = v.frobenius();
    v.scale(Complex64::new(1.0 / norm, 0.0))
}

// ---------------------------------------------------------------------------
// Random formal operators
// ---------------------------------------------------------------------------

use crate::registers::{QuantumRef, QuantumVarDecl};
use crate::term::FormalOp;

/// A register vocabulary for random operator terms: simple qubits plus
/// constant-subscripted cells of one qubit array (pairwise distinct under
/// every state).
pub struct OpPool {
    pub registers: Vec<QuantumRef>,
}

impl OpPool {
    pub fn qubits(simple: usize, cells: usize) -> OpPool {
        let mut registers = Vec::new();
        for i in 0..simple {
            let d = QuantumVarDecl::qubit(format!("q{i}"));
            registers.push(QuantumRef::simple(d).unwrap());
        }
        if cells > 0 {
            let arr = QuantumVarDecl::qubit_array("arr", vec![BasicType::Int]);
            for i in 0..cells {
                registers
                    .push(QuantumRef::subscripted(arr.clone(), vec![Expr::int(i as i64)]).unwrap());
            }
        }
        OpPool { registers }
    }

    /// Declare the pool's quantum variables in a quantum structure.
    pub fn declare(&self, qs: &mut crate::semantics::QuantumStructure) {
        let mut seen = std::collections::BTreeSet::new();
        for r in &self.registers {
            if seen.insert(r.decl.name.clone()) {
                qs.declare_qvar(r.decl.clone());
            }
        }
    }

    fn random_regs(&self, g: &mut Gen, max: usize) -> Vec<QuantumRef> {
        let n = g.pick(max + 1);
        let mut idx: Vec<usize> = (0..self.registers.len()).collect();
        // Partial Fisher-Yates.
        for i in 0..n.min(idx.len()) {
            let j = i + g.pick(idx.len() - i);
            idx.swap(i, j);
        }
        idx.truncate(n.min(self.registers.len()));
        idx.into_iter().map(|i| self.registers[i].clone()).collect()
    }

    fn random_label(&self, g: &mut Gen) -> Expr {
        Expr::bool(g.flag())
    }

    fn random_scalar(&self, g: &mut Gen) -> Expr {
        Expr::complex(g.real(), g.real())
    }

    /// A leaf with the exact syntactic signature `dom -> cod`: a tensor of
    /// kets and bras, or a gate/identity when the signature is square.
    fn leaf(&self, g: &mut Gen, dom: &[QuantumRef], cod: &[QuantumRef]) -> FormalOp {
        use crate::stdlib::gates;
        if dom.is_empty() && cod.is_empty() {
            return FormalOp::scalar(self.random_scalar(g)).unwrap();
        }
        if dom == cod {
            if dom.len() == 1 && g.flag() {
                let d = [gates::h_decl, gates::x_decl, gates::y_decl, gates::z_decl]
                    [g.pick(4)]();
                return gates::gate1(d, dom[0].clone());
            }
            if dom.len() == 2 && g.pick(3) == 0 {
                return gates::gate2(gates::cnot_decl(), dom[0].clone(), dom[1].clone());
            }
            return gates::identity_on(dom.to_vec()).unwrap();
        }
        let mut factors: Vec<FormalOp> = Vec::new();
        for q in dom {
            factors.push(FormalOp::ket(self.random_label(g), q.clone()).unwrap());
        }
        for q in cod {
            factors.push(FormalOp::bra(self.random_label(g), q.clone()).unwrap());
        }
        let mut it = factors.into_iter();
        let first = it.next().expect("at least one register");
        it.fold(first, FormalOp::tensor)
    }

    /// A random term with the exact syntactic signature `dom -> cod`.
    pub fn term_with_sig(
        &self,
        g: &mut Gen,
        depth: usize,
        dom: &[QuantumRef],
        cod: &[QuantumRef],
    ) -> FormalOp {
        if depth == 0 {
            return self.leaf(g, dom, cod);
        }
        match g.pick(12) {
            0 | 1 => FormalOp::scale(
                self.random_scalar(g),
                self.term_with_sig(g, depth - 1, dom, cod),
            )
            .unwrap(),
            2 | 3 => FormalOp::adjoint(self.term_with_sig(g, depth - 1, cod, dom)),
            4..=6 => FormalOp::sum(
                self.term_with_sig(g, depth - 1, dom, cod),
                self.term_with_sig(g, depth - 1, dom, cod),
            )
            .unwrap(),
            7 | 8 => {
                // Route through a random middle register string.
                let mid = self.random_regs(g, 2);
                FormalOp::product(
                    self.term_with_sig(g, depth - 1, dom, &mid),
                    self.term_with_sig(g, depth - 1, &mid, cod),
                )
                .unwrap()
            }
            9 | 10 => {
                let dsplit = g.pick(dom.len() + 1);
                let csplit = g.pick(cod.len() + 1);
                FormalOp::tensor(
                    self.term_with_sig(g, depth - 1, &dom[..dsplit], &cod[..csplit]),
                    self.term_with_sig(g, depth - 1, &dom[dsplit..], &cod[csplit..]),
                )
            }
            _ => self.leaf(g, dom, cod),
        }
    }

    /// A random well-signed term together with its intended signature.
    pub fn well_signed(
        &self,
        g: &mut Gen,
        depth: usize,
    ) -> (FormalOp, Vec<QuantumRef>, Vec<QuantumRef>) {
        let dom = self.random_regs(g, 3);
        let cod = if g.flag() { dom.clone() } else { self.random_regs(g, 2) };
        let t = self.term_with_sig(g, depth, &dom, &cod);
        (t, dom, cod)
    }

    /// A deliberately ill-signed term and the rule expected to reject it.
    pub fn ill_signed(&self, g: &mut Gen) -> (FormalOp, &'static str) {
        use crate::stdlib::gates;
        let q = self.registers[g.pick(self.registers.len())].clone();
        let mut r = self.registers[g.pick(self.registers.len())].clone();
        while r == q {
            r = self.registers[g.pick(self.registers.len())].clone();
        }
        match g.pick(4) {
            0 => {
                // Same register twice in one constant signature.
                let t = FormalOp::opconst(
                    gates::identity_decl(),
                    vec![],
                    crate::term::Signature::square(vec![q.clone(), q]),
                )
                .unwrap();
                (t, "Sign-OpC")
            }
            1 => {
                // Tensor operands overlapping on a register.
                let t = FormalOp::tensor(
                    FormalOp::ket(Expr::bool(false), q.clone()).unwrap(),
                    FormalOp::ket(Expr::bool(true), q).unwrap(),
                );
                (t, "Sign-Tensor")
            }
            2 => {
                // Product with mismatched middle registers.
                let t = FormalOp::product(
                    gates::gate1(gates::h_decl(), q),
                    gates::gate1(gates::h_decl(), r),
                )
                .unwrap();
                (t, "Sign-Mult")
            }
            _ => {
                // Summands on different registers.
                let t = FormalOp::sum(
                    FormalOp::ket(Expr::bool(false), q).unwrap(),
                    FormalOp::ket(Expr::bool(false), r).unwrap(),
                )
                .unwrap();
                (t, "Sign-Add")
            }
        }
    }
}
