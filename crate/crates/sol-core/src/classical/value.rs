//! Value types and enumerable domains.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

/// Basic types of the expression language.
///
/// `Complex` is non-enumerable: it never serves as a quantifier domain or as
/// the value type of a quantum variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BasicType {
    Bool,
    Int,
    Complex,
}

impl BasicType {
    pub fn is_enumerable(self) -> bool {
        !matches!(self, BasicType::Complex)
    }
}

impl fmt::Display for BasicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicType::Bool => write!(f, "Bool"),
            BasicType::Int => write!(f, "Int"),
            BasicType::Complex => write!(f, "C"),
        }
    }
}

/// A higher (array/function) type `T1 x ... x Tn -> T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HigherType {
    pub args: Vec<BasicType>,
    pub value: BasicType,
}

impl fmt::Display for HigherType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, " -> {}", self.value)
    }
}

/// A scalar runtime value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Complex(Complex64),
}

impl Value {
    pub fn ty(&self) -> BasicType {
        match self {
            Value::Bool(_) => BasicType::Bool,
            Value::Int(_) => BasicType::Int,
            Value::Complex(_) => BasicType::Complex,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_complex(&self) -> Option<Complex64> {
        match self {
            Value::Complex(c) => Some(*c),
            Value::Int(n) => Some(Complex64::new(*n as f64, 0.0)),
            _ => None,
        }
    }

    /// Equality with absolute tolerance on the complex component.
    pub fn approx_eq(&self, other: &Value, tol: f64) -> bool {
        match (self, other) {
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Complex(a), Value::Complex(b)) => (a - b).norm() <= tol,
            (Value::Int(a), Value::Complex(b)) | (Value::Complex(b), Value::Int(a)) => {
                (Complex64::new(*a as f64, 0.0) - b).norm() <= tol
            }
            _ => false,
        }
    }

    pub fn to_discrete(&self) -> Option<DiscreteValue> {
        match self {
            Value::Bool(b) => Some(DiscreteValue::Bool(*b)),
            Value::Int(n) => Some(DiscreteValue::Int(*n)),
            Value::Complex(_) => None,
        }
    }
}

impl From<DiscreteValue> for Value {
    fn from(d: DiscreteValue) -> Self {
        match d {
            DiscreteValue::Bool(b) => Value::Bool(b),
            DiscreteValue::Int(n) => Value::Int(n),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Complex(c) => {
                if c.im == 0.0 {
                    write!(f, "{:?}", c.re)
                } else if c.re == 0.0 {
                    write!(f, "{:?}i", c.im)
                } else if c.im < 0.0 {
                    write!(f, "({:?}-{:?}i)", c.re, -c.im)
                } else {
                    write!(f, "({:?}+{:?}i)", c.re, c.im)
                }
            }
        }
    }
}

/// A value of an enumerable type; totally ordered, hashable, exact.
///
/// Used for array subscripts, register indices and basis labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiscreteValue {
    Bool(bool),
    Int(i64),
}

impl fmt::Display for DiscreteValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscreteValue::Bool(b) => write!(f, "{b}"),
            DiscreteValue::Int(n) => write!(f, "{n}"),
        }
    }
}

/// A finite, totally ordered domain. The order fixes the basis/enumeration
/// order everywhere downstream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Domain {
    Bool,
    Int { lo: i64, hi: i64 },
}

impl Domain {
    pub fn size(&self) -> usize {
        match self {
            Domain::Bool => 2,
            Domain::Int { lo, hi } => (hi - lo + 1).max(0) as usize,
        }
    }

    pub fn value_at(&self, idx: usize) -> DiscreteValue {
        match self {
            Domain::Bool => DiscreteValue::Bool(idx == 1),
            Domain::Int { lo, .. } => DiscreteValue::Int(lo + idx as i64),
        }
    }

    pub fn index_of(&self, v: DiscreteValue) -> Option<usize> {
        match (self, v) {
            (Domain::Bool, DiscreteValue::Bool(b)) => Some(b as usize),
            (Domain::Int { lo, hi }, DiscreteValue::Int(n)) if n >= *lo && n <= *hi => {
                Some((n - lo) as usize)
            }
            _ => None,
        }
    }

    /// Position of a scalar value in this domain, coercing a numeric value
    /// within `tol` of a domain element onto that element. `0`/`1` coerce to
    /// the booleans.
    pub fn index_of_value(&self, v: &Value, tol: f64) -> Option<usize> {
        match v {
            Value::Bool(b) => self.index_of(DiscreteValue::Bool(*b)),
            Value::Int(n) => match self {
                Domain::Bool if *n == 0 || *n == 1 => Some(*n as usize),
                _ => self.index_of(DiscreteValue::Int(*n)),
            },
            Value::Complex(c) => {
                if c.im.abs() > tol {
                    return None;
                }
                let r = c.re.round();
                if (c.re - r).abs() > tol {
                    return None;
                }
                self.index_of_value(&Value::Int(r as i64), tol)
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = DiscreteValue> + '_ {
        (0..self.size()).map(move |i| self.value_at(i))
    }
}
