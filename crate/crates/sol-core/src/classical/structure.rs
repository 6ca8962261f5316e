//! First-order structures and states.
//!
//! A [`Structure`] fixes the variable vocabulary, the interpretation of the
//! builtin function symbols and the finite enumeration domains. A [`State`]
//! is a total assignment of values to the declared variables.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::config::Config;

use super::expr::{ArrayRef, EvalError, Expr, VarRef};
use super::value::{BasicType, DiscreteValue, Domain, HigherType, Value};

#[derive(Clone, Debug)]
pub struct VarDecl {
    pub name: Arc<str>,
    pub ty: BasicType,
    /// Per-variable override of the global `Int` enumeration range.
    pub range: Option<(i64, i64)>,
}

#[derive(Clone, Debug)]
pub struct ArrayDecl {
    pub name: Arc<str>,
    pub ty: HigherType,
}

/// The fixed first-order structure: declared variables plus configuration.
///
/// Builtin function symbols are interpreted directly by the evaluator; there
/// is no user-supplied symbol interpretation in this kernel.
#[derive(Clone, Debug, Default)]
pub struct Structure {
    pub config: Config,
    vars: Vec<VarDecl>,
    arrays: Vec<ArrayDecl>,
}

impl Structure {
    pub fn new(config: Config) -> Self {
        Structure { config, vars: Vec::new(), arrays: Vec::new() }
    }

    pub fn declare_var(&mut self, name: impl Into<Arc<str>>, ty: BasicType) -> VarRef {
        let name = name.into();
        self.vars.push(VarDecl { name: name.clone(), ty, range: None });
        VarRef { name, ty }
    }

    pub fn declare_var_ranged(&mut self, name: impl Into<Arc<str>>, lo: i64, hi: i64) -> VarRef {
        let name = name.into();
        self.vars.push(VarDecl { name: name.clone(), ty: BasicType::Int, range: Some((lo, hi)) });
        VarRef { name, ty: BasicType::Int }
    }

    pub fn declare_array(
        &mut self,
        name: impl Into<Arc<str>>,
        args: Vec<BasicType>,
        value: BasicType,
    ) -> ArrayRef {
        let name = name.into();
        let ty = HigherType { args, value };
        self.arrays.push(ArrayDecl { name: name.clone(), ty: ty.clone() });
        ArrayRef { name, ty }
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn arrays(&self) -> &[ArrayDecl] {
        &self.arrays
    }

    pub fn lookup_var(&self, name: &str) -> Option<&VarDecl> {
        self.vars.iter().find(|v| &*v.name == name)
    }

    pub fn lookup_array(&self, name: &str) -> Option<&ArrayDecl> {
        self.arrays.iter().find(|a| &*a.name == name)
    }

    /// Enumeration domain of a basic type; `None` for `Complex`.
    pub fn domain_of_type(&self, ty: BasicType) -> Option<Domain> {
        match ty {
            BasicType::Bool => Some(Domain::Bool),
            BasicType::Int => {
                let (lo, hi) = self.config.int_range;
                Some(Domain::Int { lo, hi })
            }
            BasicType::Complex => None,
        }
    }

    /// Enumeration domain of a declared variable, honouring its range
    /// override when present.
    pub fn domain_of_var(&self, v: &VarRef) -> Option<Domain> {
        if let Some(decl) = self.lookup_var(&v.name) {
            if let Some((lo, hi)) = decl.range {
                return Some(Domain::Int { lo, hi });
            }
        }
        self.domain_of_type(v.ty)
    }

    fn default_value(&self, ty: BasicType, range: Option<(i64, i64)>) -> Value {
        match ty {
            BasicType::Bool => Value::Bool(false),
            BasicType::Int => {
                let (lo, hi) = range.unwrap_or(self.config.int_range);
                Value::Int(0.clamp(lo, hi))
            }
            BasicType::Complex => Value::Complex(num_complex::Complex64::new(0.0, 0.0)),
        }
    }

    /// The state assigning every declared variable its default value.
    pub fn default_state(&self) -> State {
        let scalars = self
            .vars
            .iter()
            .map(|d| (d.name.clone(), self.default_value(d.ty, d.range)))
            .collect();
        let arrays = self
            .arrays
            .iter()
            .map(|d| {
                let arg_domains: Vec<Domain> = d
                    .ty
                    .args
                    .iter()
                    .map(|t| self.domain_of_type(*t).expect("array argument types are enumerable"))
                    .collect();
                let cells = arg_domains.iter().map(|d| d.size()).product::<usize>().max(1);
                let default = self.default_value(d.ty.value, None);
                (d.name.clone(), ArrayValue { arg_domains, values: vec![default; cells] })
            })
            .collect();
        State { scalars, arrays }
    }
}

/// A total, finite map backing an array variable.
#[derive(Clone, Debug, PartialEq)]
pub struct ArrayValue {
    pub arg_domains: Vec<Domain>,
    /// Dense storage in mixed-radix order over the argument domains, first
    /// argument most significant.
    pub values: Vec<Value>,
}

impl ArrayValue {
    pub fn cell_index(&self, subs: &[DiscreteValue]) -> Option<usize> {
        if subs.len() != self.arg_domains.len() {
            return None;
        }
        let mut idx = 0usize;
        for (d, s) in self.arg_domains.iter().zip(subs) {
            idx = idx * d.size() + d.index_of(*s)?;
        }
        Some(idx)
    }

    pub fn get(&self, subs: &[DiscreteValue]) -> Option<Value> {
        self.cell_index(subs).map(|i| self.values[i])
    }

    pub fn set(&mut self, subs: &[DiscreteValue], v: Value) -> bool {
        match self.cell_index(subs) {
            Some(i) => {
                self.values[i] = v;
                true
            }
            None => false,
        }
    }
}

/// A classical state: a total assignment to the declared variables, possibly
/// extended with bindings for quantifier-bound variables.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct State {
    scalars: Vec<(Arc<str>, Value)>,
    arrays: Vec<(Arc<str>, ArrayValue)>,
}

impl State {
    pub fn get(&self, name: &str) -> Option<Value> {
        self.scalars.iter().rev().find(|(n, _)| &**n == name).map(|(_, v)| *v)
    }

    pub fn get_array(&self, name: &str) -> Option<&ArrayValue> {
        self.arrays.iter().rev().find(|(n, _)| &**n == name).map(|(_, v)| v)
    }

    /// In-place assignment; prefer [`State::update`] for the functional
    /// form.
    pub fn set(&mut self, name: impl Into<Arc<str>>, v: Value) {
        let name = name.into();
        match self.scalars.iter_mut().rev().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = v,
            None => self.scalars.push((name, v)),
        }
    }

    /// The updated state `self[name := v]`: equal everywhere except `name`.
    pub fn update(&self, name: impl Into<Arc<str>>, v: Value) -> State {
        let mut out = self.clone();
        out.set(name, v);
        out
    }

    /// Point update of an array cell: `self[a[subs] := v]`.
    pub fn update_cell(&self, name: &str, subs: &[DiscreteValue], v: Value) -> Option<State> {
        let mut out = self.clone();
        let slot = out.arrays.iter_mut().rev().find(|(n, _)| &**n == name)?;
        if slot.1.set(subs, v) {
            Some(out)
        } else {
            None
        }
    }

    pub fn set_array(&mut self, name: impl Into<Arc<str>>, v: ArrayValue) {
        let name = name.into();
        match self.arrays.iter_mut().rev().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = v,
            None => self.arrays.push((name, v)),
        }
    }

    pub fn scalars(&self) -> &[(Arc<str>, Value)] {
        &self.scalars
    }

    pub fn arrays(&self) -> &[(Arc<str>, ArrayValue)] {
        &self.arrays
    }
}

/// The enumeration space of all states over the declared variables, minus
/// any variables pinned to fixed values.
///
/// States are indexed `0..size()` in mixed-radix order (first declared
/// variable most significant); this index is the deterministic tie-breaker
/// for witness selection under parallel enumeration.
pub struct StateSpace {
    base: State,
    dims: Vec<VarDim>,
    size: u64,
}

enum VarDim {
    /// Scalar variable at a fixed slot of the base state's storage.
    Scalar { slot: usize, domain: Domain },
    /// Array variable: every cell enumerated over the value domain.
    Array { name: Arc<str>, value_domain: Domain, cells: usize },
}

impl StateSpace {
    /// Builds the space over all declared variables not listed in `pinned`.
    /// Fails when a free variable has a non-enumerable type or the total
    /// size overflows the configured cap.
    pub fn new(st: &Structure, pinned: &BTreeSet<Arc<str>>) -> Result<StateSpace, EvalError> {
        StateSpace::over(st, st.default_state(), pinned)
    }

    /// Like [`StateSpace::new`] with an explicit base state carrying the
    /// values of pinned variables.
    pub fn over(
        st: &Structure,
        base: State,
        pinned: &BTreeSet<Arc<str>>,
    ) -> Result<StateSpace, EvalError> {
        let mut dims = Vec::new();
        let mut size: u64 = 1;
        let cap = st.config.max_states;
        let grow = |size: &mut u64, by: u64| -> Result<(), EvalError> {
            *size = size
                .checked_mul(by)
                .filter(|s| *s <= cap)
                .ok_or(EvalError::StateSpace(cap))?;
            Ok(())
        };
        for d in st.vars() {
            if pinned.contains(&d.name) {
                continue;
            }
            let domain = st
                .domain_of_var(&VarRef { name: d.name.clone(), ty: d.ty })
                .ok_or_else(|| EvalError::UnsupportedQuantifier(d.name.to_string()))?;
            grow(&mut size, domain.size() as u64)?;
            let slot = base
                .scalars
                .iter()
                .position(|(n, _)| *n == d.name)
                .expect("declared variable present in the base state");
            dims.push(VarDim::Scalar { slot, domain });
        }
        for d in st.arrays() {
            if pinned.contains(&d.name) {
                continue;
            }
            let value_domain = st
                .domain_of_type(d.ty.value)
                .ok_or_else(|| EvalError::UnsupportedQuantifier(d.name.to_string()))?;
            let cells = base.get_array(&d.name).map(|a| a.values.len()).unwrap_or(0);
            for _ in 0..cells {
                grow(&mut size, value_domain.size() as u64)?;
            }
            dims.push(VarDim::Array { name: d.name.clone(), value_domain, cells });
        }
        Ok(StateSpace { base, dims, size })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    /// The state at enumeration index `idx`.
    pub fn state_at(&self, idx: u64) -> State {
        let mut state = self.base.clone();
        let mut rem = idx;
        // Least significant dimension is the last declared one.
        for dim in self.dims.iter().rev() {
            match dim {
                VarDim::Scalar { slot, domain } => {
                    let n = domain.size() as u64;
                    let v = domain.value_at((rem % n) as usize);
                    rem /= n;
                    state.scalars[*slot].1 = v.into();
                }
                VarDim::Array { name, value_domain, cells } => {
                    let n = value_domain.size() as u64;
                    let mut arr = state.get_array(name).cloned().expect("declared array");
                    for c in (0..*cells).rev() {
                        let v = value_domain.value_at((rem % n) as usize);
                        rem /= n;
                        arr.values[c] = v.into();
                    }
                    state.set_array(name.clone(), arr);
                }
            }
        }
        state
    }
}

/// Evaluate an expression in a state.
pub fn eval_expr(st: &Structure, sigma: &State, e: &Expr) -> Result<Value, EvalError> {
    match e {
        Expr::Var(v) => sigma.get(&v.name).ok_or_else(|| EvalError::Unbound(v.name.to_string())),
        Expr::Const(c) => Ok(*c),
        Expr::App(op, args, _) => match args.as_slice() {
            [a] => {
                let va = eval_expr(st, sigma, a)?;
                super::expr::apply_builtin(*op, &[va], st.config.tol, || e.to_string())
            }
            [a, b] => {
                let va = eval_expr(st, sigma, a)?;
                let vb = eval_expr(st, sigma, b)?;
                super::expr::apply_builtin(*op, &[va, vb], st.config.tol, || e.to_string())
            }
            _ => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(eval_expr(st, sigma, a)?);
                }
                super::expr::apply_builtin(*op, &vals, st.config.tol, || e.to_string())
            }
        },
        Expr::Index(a, subs) => {
            let arr = sigma
                .get_array(&a.name)
                .ok_or_else(|| EvalError::UnboundArray(a.name.to_string()))?;
            let mut idx = Vec::with_capacity(subs.len());
            for s in subs {
                let v = eval_expr(st, sigma, s)?;
                idx.push(v.to_discrete().ok_or_else(|| EvalError::IllTyped(e.to_string()))?);
            }
            arr.get(&idx).ok_or_else(|| EvalError::SubscriptRange {
                array: a.name.to_string(),
                index: idx.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", "),
            })
        }
        Expr::If(c, t, el) => {
            let g = eval_expr(st, sigma, c)?;
            match g.as_bool() {
                Some(true) => eval_expr(st, sigma, t),
                Some(false) => eval_expr(st, sigma, el),
                None => Err(EvalError::IllTyped(e.to_string())),
            }
        }
    }
}
