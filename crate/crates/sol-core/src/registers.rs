//! Quantum variables, subscripted registers, distinctness and grounding.
//!
//! A quantum variable carries a classical type; its state space is the
//! Hilbert space spanned by the (finite) classical domain of that type. An
//! array quantum variable is never materialised as a whole — only the
//! subscripted cells occurring in a term are ever allocated.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::classical::{
    eval_expr, BasicType, BuiltinOp, DiscreteValue, Domain, EvalError, Expr, Formula, State,
    Structure,
};

/// Declaration of a simple (`arg_types` empty) or array quantum variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuantumVarDecl {
    pub name: Arc<str>,
    pub arg_types: Vec<BasicType>,
    pub value_type: BasicType,
    /// Domain override for an `Int` value type; without it the global
    /// enumeration range applies.
    pub value_range: Option<(i64, i64)>,
}

impl QuantumVarDecl {
    pub fn qubit(name: impl Into<Arc<str>>) -> Arc<Self> {
        Arc::new(QuantumVarDecl {
            name: name.into(),
            arg_types: Vec::new(),
            value_type: BasicType::Bool,
            value_range: None,
        })
    }

    pub fn qubit_array(name: impl Into<Arc<str>>, arg_types: Vec<BasicType>) -> Arc<Self> {
        Arc::new(QuantumVarDecl {
            name: name.into(),
            arg_types,
            value_type: BasicType::Bool,
            value_range: None,
        })
    }

    pub fn is_simple(&self) -> bool {
        self.arg_types.is_empty()
    }

    /// The value domain of the variable under the structure's configuration.
    pub fn value_domain(&self, st: &Structure) -> Result<Domain, RegisterError> {
        match (self.value_type, self.value_range) {
            (BasicType::Int, Some((lo, hi))) => Ok(Domain::Int { lo, hi }),
            (t, _) => st
                .domain_of_type(t)
                .ok_or_else(|| RegisterError::NonEnumerable { name: self.name.to_string() }),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RegisterError {
    #[error("quantum variable {name} has a non-enumerable value type")]
    NonEnumerable { name: String },
    #[error("{name} expects {expected} subscripts, got {actual}")]
    Arity { name: String, expected: usize, actual: usize },
    #[error("subscript {pos} of {name}: expected {expected}, got {actual}")]
    SubscriptType { name: String, pos: usize, expected: BasicType, actual: BasicType },
    #[error("subscript of {name} evaluated to a non-discrete value")]
    NonDiscreteIndex { name: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A simple or subscripted quantum variable `q[s1,...,sn]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumRef {
    pub decl: Arc<QuantumVarDecl>,
    pub indices: Vec<Expr>,
}

impl QuantumRef {
    pub fn simple(decl: Arc<QuantumVarDecl>) -> Result<QuantumRef, RegisterError> {
        QuantumRef::subscripted(decl, Vec::new())
    }

    pub fn subscripted(
        decl: Arc<QuantumVarDecl>,
        indices: Vec<Expr>,
    ) -> Result<QuantumRef, RegisterError> {
        if indices.len() != decl.arg_types.len() {
            return Err(RegisterError::Arity {
                name: decl.name.to_string(),
                expected: decl.arg_types.len(),
                actual: indices.len(),
            });
        }
        for (pos, (s, want)) in indices.iter().zip(&decl.arg_types).enumerate() {
            if s.ty() != *want {
                return Err(RegisterError::SubscriptType {
                    name: decl.name.to_string(),
                    pos,
                    expected: *want,
                    actual: s.ty(),
                });
            }
        }
        Ok(QuantumRef { decl, indices })
    }

    pub fn value_type(&self) -> BasicType {
        self.decl.value_type
    }

    /// Ground the reference under a state: subscripts are evaluated to
    /// concrete values.
    pub fn ground(&self, st: &Structure, sigma: &State) -> Result<GroundRef, RegisterError> {
        let mut indices = Vec::with_capacity(self.indices.len());
        for s in &self.indices {
            let v = eval_expr(st, sigma, s)?;
            indices.push(v.to_discrete().ok_or_else(|| RegisterError::NonDiscreteIndex {
                name: self.decl.name.to_string(),
            })?);
        }
        Ok(GroundRef {
            decl: self.decl.clone(),
            indices,
            domain: self.decl.value_domain(st)?,
        })
    }

    /// Substitute classical expressions into the subscripts.
    pub fn subst(&self, bindings: &[crate::classical::Binding]) -> QuantumRef {
        QuantumRef {
            decl: self.decl.clone(),
            indices: self
                .indices
                .iter()
                .map(|s| crate::classical::subst_expr(s, bindings))
                .collect(),
        }
    }
}

impl fmt::Display for QuantumRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.decl.name)?;
        if !self.indices.is_empty() {
            write!(f, "[")?;
            for (i, s) in self.indices.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{s}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// A ground quantum variable: base variable plus concrete subscript values.
///
/// Two ground references denote the same subsystem exactly when base name
/// and all subscripts are equal. The derived order (name, then subscripts)
/// is the canonical register order used for reproducible bases.
#[derive(Clone, Debug, Eq)]
pub struct GroundRef {
    pub decl: Arc<QuantumVarDecl>,
    pub indices: Vec<DiscreteValue>,
    /// Value domain; fixes the basis labels and the dimension.
    pub domain: Domain,
}

impl GroundRef {
    pub fn name(&self) -> &Arc<str> {
        &self.decl.name
    }

    pub fn dim(&self) -> usize {
        self.domain.size()
    }

    /// The syntactic reference with constant subscripts denoting this
    /// subsystem.
    pub fn to_quantum_ref(&self) -> QuantumRef {
        QuantumRef {
            decl: self.decl.clone(),
            indices: self.indices.iter().map(|d| Expr::Const((*d).into())).collect(),
        }
    }
}

impl PartialEq for GroundRef {
    fn eq(&self, other: &Self) -> bool {
        self.decl.name == other.decl.name && self.indices == other.indices
    }
}

impl PartialOrd for GroundRef {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroundRef {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.decl.name.cmp(&other.decl.name).then_with(|| self.indices.cmp(&other.indices))
    }
}

impl std::hash::Hash for GroundRef {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.decl.name.hash(state);
        self.indices.hash(state);
    }
}

impl fmt::Display for GroundRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.decl.name)?;
        if !self.indices.is_empty() {
            write!(f, "[")?;
            for (i, s) in self.indices.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{s}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Dimension of an enumerable type: the size of its domain.
pub fn dim_of_type(st: &Structure, ty: BasicType) -> Option<usize> {
    st.domain_of_type(ty).map(|d| d.size())
}

/// Dimension of a register string: the product of member dimensions.
pub fn dim_of_string(st: &Structure, refs: &[QuantumRef]) -> Result<usize, RegisterError> {
    let mut dim = 1usize;
    for q in refs {
        dim = dim.saturating_mul(q.decl.value_domain(st)?.size());
    }
    Ok(dim)
}

pub fn dim_of_ground(refs: &[GroundRef]) -> usize {
    refs.iter().map(|r| r.dim()).product()
}

/// The distinctness formula for a register string: for every pair with the
/// same base variable, some subscript position must differ. Two occurrences
/// of the same simple variable yield an unsatisfiable conjunct.
pub fn distinctness_formula(refs: &[QuantumRef]) -> Formula {
    let mut conjuncts = Vec::new();
    for i in 0..refs.len() {
        for j in (i + 1)..refs.len() {
            if refs[i].decl.name != refs[j].decl.name {
                continue;
            }
            let disj: Vec<Formula> = refs[i]
                .indices
                .iter()
                .zip(&refs[j].indices)
                .map(|(a, b)| {
                    Formula::Atom(
                        Expr::app(BuiltinOp::Ne, vec![a.clone(), b.clone()])
                            .expect("subscripts of one array share types"),
                    )
                })
                .collect();
            conjuncts.push(Formula::disj(disj));
        }
    }
    Formula::conj(conjuncts)
}

/// Ground a register string pointwise.
pub fn ground_string(
    st: &Structure,
    sigma: &State,
    refs: &[QuantumRef],
) -> Result<Vec<GroundRef>, RegisterError> {
    refs.iter().map(|q| q.ground(st, sigma)).collect()
}

pub fn display_string(refs: &[GroundRef]) -> String {
    let items: Vec<String> = refs.iter().map(|r| r.to_string()).collect();
    format!("({})", items.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{satisfies, Value};
    use crate::config::Config;

    fn setup() -> (Structure, Arc<QuantumVarDecl>) {
        let mut st = Structure::new(Config::default());
        st.declare_var("x", BasicType::Int);
        st.declare_var("y", BasicType::Int);
        st.declare_var("k", BasicType::Int);
        let q = QuantumVarDecl::qubit_array("q", vec![BasicType::Int, BasicType::Int]);
        (st, q)
    }

    fn int_expr(n: i64) -> Expr {
        Expr::int(n)
    }

    #[test]
    fn dims() {
        let st = Structure::new(Config { int_range: (0, 7), ..Config::default() });
        assert_eq!(dim_of_type(&st, BasicType::Bool), Some(2));
        assert_eq!(dim_of_type(&st, BasicType::Int), Some(8));
        assert_eq!(dim_of_type(&st, BasicType::Complex), None);
        let q1 = QuantumRef::simple(QuantumVarDecl::qubit("a")).unwrap();
        let q2 = QuantumRef::simple(QuantumVarDecl::qubit("b")).unwrap();
        let q3 = QuantumRef::simple(QuantumVarDecl::qubit("c")).unwrap();
        assert_eq!(dim_of_string(&st, &[q1, q2, q3]).unwrap(), 8);
    }

    #[test]
    fn grounding_evaluates_subscripts() {
        let (st, q) = setup();
        let sigma = st.default_state().update("x", Value::Int(5)).update("y", Value::Int(-1));
        // q[2x+y, 7-3y] grounds to q[9, 10]
        let two_x_plus_y = Expr::app(
            BuiltinOp::Add,
            vec![
                Expr::app(BuiltinOp::Mul, vec![int_expr(2), Expr::var("x", BasicType::Int)])
                    .unwrap(),
                Expr::var("y", BasicType::Int),
            ],
        )
        .unwrap();
        let seven_minus_3y = Expr::app(
            BuiltinOp::Sub,
            vec![
                int_expr(7),
                Expr::app(BuiltinOp::Mul, vec![int_expr(3), Expr::var("y", BasicType::Int)])
                    .unwrap(),
            ],
        )
        .unwrap();
        let r = QuantumRef::subscripted(q, vec![two_x_plus_y, seven_minus_3y]).unwrap();
        let g = r.ground(&st, &sigma).unwrap();
        assert_eq!(g.indices, vec![DiscreteValue::Int(9), DiscreteValue::Int(10)]);
    }

    #[test]
    fn simple_variable_grounds_to_itself() {
        let st = Structure::new(Config::default());
        let q = QuantumRef::simple(QuantumVarDecl::qubit("q")).unwrap();
        let g = q.ground(&st, &st.default_state()).unwrap();
        assert_eq!(&**g.name(), "q");
        assert!(g.indices.is_empty());
    }

    #[test]
    fn pointwise_grounding_of_strings() {
        let mut st = Structure::new(Config::default());
        st.declare_var("k", BasicType::Int);
        let sigma = st.default_state().update("k", Value::Int(0));
        let q = QuantumVarDecl::qubit_array("q", vec![BasicType::Int]);
        let k = Expr::var("k", BasicType::Int);
        let k1 = Expr::app(BuiltinOp::Add, vec![k.clone(), int_expr(1)]).unwrap();
        let s = vec![
            QuantumRef::subscripted(q.clone(), vec![k]).unwrap(),
            QuantumRef::subscripted(q, vec![k1]).unwrap(),
        ];
        let g = ground_string(&st, &sigma, &s).unwrap();
        assert_eq!(g[0].indices, vec![DiscreteValue::Int(0)]);
        assert_eq!(g[1].indices, vec![DiscreteValue::Int(1)]);
        assert_eq!(dim_of_ground(&g), 4);
    }

    #[test]
    fn grounding_commutes_with_substitution() {
        // ground(sigma, q[t/x]) equals ground(sigma[x := sigma(t)], q).
        let mut st = Structure::new(Config { int_range: (-8, 8), ..Config::default() });
        st.declare_var("x", BasicType::Int);
        st.declare_var("y", BasicType::Int);
        let q = QuantumVarDecl::qubit_array("q", vec![BasicType::Int]);
        let mut g = crate::randgen::Gen::new(19);
        let pool = crate::randgen::TermPool::small(&st);
        for _ in 0..100 {
            let sigma = pool.random_state(&st, &mut g);
            let idx = pool.random_int_expr(&mut g, 3);
            let t = pool.random_int_expr(&mut g, 2);
            let x = crate::classical::VarRef::new("x", BasicType::Int);
            let r = QuantumRef::subscripted(q.clone(), vec![idx]).unwrap();
            let binding = crate::classical::Binding::var(x, t.clone()).unwrap();
            let lhs = r.subst(std::slice::from_ref(&binding)).ground(&st, &sigma);
            let rhs = match crate::classical::eval_expr(&st, &sigma, &t) {
                Ok(tv) => r.ground(&st, &sigma.update("x", tv)),
                Err(_) => {
                    assert!(lhs.is_err());
                    continue;
                }
            };
            match (lhs, rhs) {
                (Ok(a), Ok(b)) => assert_eq!(a, b),
                (Err(_), Err(_)) => {}
                (a, b) => panic!("divergent grounding: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn grounding_preserves_dimension() {
        let mut st = Structure::new(Config { int_range: (0, 3), ..Config::default() });
        st.declare_var("k", BasicType::Int);
        let sigma = st.default_state().update("k", Value::Int(2));
        let q = QuantumVarDecl::qubit_array("q", vec![BasicType::Int]);
        let s = vec![
            QuantumRef::subscripted(q.clone(), vec![Expr::var("k", BasicType::Int)]).unwrap(),
            QuantumRef::subscripted(q, vec![Expr::int(0)]).unwrap(),
        ];
        let grounded = ground_string(&st, &sigma, &s).unwrap();
        assert_eq!(dim_of_ground(&grounded), dim_of_string(&st, &s).unwrap());
    }

    #[test]
    fn distinctness_constant_indices() {
        let (st, q) = setup();
        let r1 = QuantumRef::subscripted(q.clone(), vec![int_expr(1), int_expr(0)]).unwrap();
        let r2 = QuantumRef::subscripted(q, vec![int_expr(2), int_expr(0)]).unwrap();
        let dist = distinctness_formula(&[r1, r2]);
        assert!(satisfies(&st, &st.default_state(), &dist).unwrap());
    }

    #[test]
    fn distinctness_fails_on_equal_ground() {
        let (st, q) = setup();
        let sigma = st.default_state().update("x", Value::Int(3)).update("y", Value::Int(3));
        let r1 = QuantumRef::subscripted(
            q.clone(),
            vec![Expr::var("x", BasicType::Int), int_expr(0)],
        )
        .unwrap();
        let r2 =
            QuantumRef::subscripted(q, vec![Expr::var("y", BasicType::Int), int_expr(0)]).unwrap();
        let dist = distinctness_formula(&[r1.clone(), r2.clone()]);
        assert!(!satisfies(&st, &sigma, &dist).unwrap());
        // Satisfaction of the generated formula agrees with structural
        // distinctness of the grounded references.
        let g1 = r1.ground(&st, &sigma).unwrap();
        let g2 = r2.ground(&st, &sigma).unwrap();
        assert_eq!(g1, g2);
    }

    #[test]
    fn distinct_simple_variables_are_trivially_distinct() {
        let st = Structure::new(Config::default());
        let q = QuantumRef::simple(QuantumVarDecl::qubit("q")).unwrap();
        let r = QuantumRef::simple(QuantumVarDecl::qubit("r")).unwrap();
        let dist = distinctness_formula(&[q.clone(), r]);
        assert!(satisfies(&st, &st.default_state(), &dist).unwrap());
        // The same simple variable twice can never be distinct.
        let dist = distinctness_formula(&[q.clone(), q]);
        assert!(!satisfies(&st, &st.default_state(), &dist).unwrap());
    }
}
