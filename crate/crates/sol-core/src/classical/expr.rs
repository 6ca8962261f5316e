//! Typed expressions and their evaluation.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use super::value::{BasicType, HigherType, Value};

/// A reference to a simple variable; carries its type so expressions are
/// self-contained for typing and display.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarRef {
    pub name: Arc<str>,
    pub ty: BasicType,
}

impl VarRef {
    pub fn new(name: impl Into<Arc<str>>, ty: BasicType) -> Self {
        VarRef { name: name.into(), ty }
    }
}

/// A reference to an array (higher-typed) variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArrayRef {
    pub name: Arc<str>,
    pub ty: HigherType,
}

impl ArrayRef {
    pub fn new(name: impl Into<Arc<str>>, args: Vec<BasicType>, value: BasicType) -> Self {
        ArrayRef { name: name.into(), ty: HigherType { args, value } }
    }
}

/// Interpreted function symbols. Arithmetic is overloaded over `Int` and
/// `Complex` with promotion inserted at construction time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinOp {
    Add,
    Sub,
    Mul,
    Neg,
    /// Complex division.
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Not,
    Xor,
    Conj,
    /// Complex modulus, as a real-valued complex.
    Abs,
    Exp,
    Cos,
    Sin,
    Sqrt,
    /// Int-to-complex promotion; printed transparently.
    ToComplex,
}

impl BuiltinOp {
    pub fn name(self) -> &'static str {
        use BuiltinOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Neg => "-",
            Div => "/",
            Eq => "=",
            Ne => "!=",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            And => "&&",
            Or => "||",
            Not => "!",
            Xor => "^",
            Conj => "conj",
            Abs => "abs",
            Exp => "exp",
            Cos => "cos",
            Sin => "sin",
            Sqrt => "sqrt",
            ToComplex => "toC",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TypeError {
    #[error("operator {op} not applicable to argument types {args:?}")]
    BadOperands { op: &'static str, args: Vec<BasicType> },
    #[error("expected {expected}, got {actual}")]
    Mismatch { expected: BasicType, actual: BasicType },
    #[error("array {array} expects {expected} subscripts, got {actual}")]
    Arity { array: String, expected: usize, actual: usize },
    #[error("conditional guard must be Bool, got {0}")]
    Guard(BasicType),
    #[error("conditional branches have different types: {0} vs {1}")]
    Branches(BasicType, BasicType),
    #[error("substitution replaces {target} of type {expected} with expression of type {actual}")]
    SubstType { target: String, expected: BasicType, actual: BasicType },
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("unbound array variable {0}")]
    UnboundArray(String),
    #[error("integer overflow evaluating {0}")]
    IntOverflow(String),
    #[error("array subscript {index} outside domain of {array}")]
    SubscriptRange { array: String, index: String },
    #[error("quantifier over non-enumerable type C (variable {0})")]
    UnsupportedQuantifier(String),
    #[error("state space too large: {0} exceeds the enumeration cap")]
    StateSpace(u64),
    #[error("division by zero")]
    DivByZero,
    #[error("internal: ill-typed expression survived construction: {0}")]
    IllTyped(String),
}

/// A typed expression.
///
/// Construct through the checked helpers ([`Expr::app`], [`Expr::index`],
/// [`Expr::ite`]) or the convenience builders; each node knows its type.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Var(VarRef),
    Const(Value),
    App(BuiltinOp, Vec<Expr>, BasicType),
    Index(ArrayRef, Vec<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn ty(&self) -> BasicType {
        match self {
            Expr::Var(v) => v.ty,
            Expr::Const(c) => c.ty(),
            Expr::App(_, _, ty) => *ty,
            Expr::Index(a, _) => a.ty.value,
            Expr::If(_, t, _) => t.ty(),
        }
    }

    pub fn bool(b: bool) -> Expr {
        Expr::Const(Value::Bool(b))
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Value::Int(n))
    }

    pub fn complex(re: f64, im: f64) -> Expr {
        Expr::Const(Value::Complex(Complex64::new(re, im)))
    }

    pub fn real(re: f64) -> Expr {
        Expr::complex(re, 0.0)
    }

    pub fn var(name: impl Into<Arc<str>>, ty: BasicType) -> Expr {
        Expr::Var(VarRef::new(name, ty))
    }

    fn promote(self) -> Expr {
        match self.ty() {
            BasicType::Int => Expr::App(BuiltinOp::ToComplex, vec![self], BasicType::Complex),
            _ => self,
        }
    }

    /// Typed application of a builtin symbol; inserts `Int -> C` promotion
    /// where the operator is complex-valued or the operands are mixed.
    /// Closed arithmetic applications are folded to constants (comparison
    /// operators are left alone: their tolerance is a runtime matter).
    pub fn app(op: BuiltinOp, args: Vec<Expr>) -> Result<Expr, TypeError> {
        let e = Expr::app_unfolded(op, args)?;
        Ok(e.fold_const())
    }

    fn fold_const(self) -> Expr {
        use BuiltinOp::*;
        let Expr::App(op, args, ty) = &self else { return self };
        let foldable = matches!(
            op,
            Add | Sub | Mul | Neg | Div | Conj | Abs | Exp | Cos | Sin | Sqrt | ToComplex
        );
        if !foldable || !args.iter().all(|a| matches!(a, Expr::Const(_))) {
            return self;
        }
        let vals: Vec<Value> = args
            .iter()
            .map(|a| match a {
                Expr::Const(v) => *v,
                _ => unreachable!(),
            })
            .collect();
        match apply_builtin(*op, &vals, 0.0, String::new) {
            Ok(v) if v.ty() == *ty => Expr::Const(v),
            _ => self,
        }
    }

    fn app_unfolded(op: BuiltinOp, args: Vec<Expr>) -> Result<Expr, TypeError> {
        use BasicType::*;
        use BuiltinOp::*;
        let tys: Vec<BasicType> = args.iter().map(|a| a.ty()).collect();
        let bad = || TypeError::BadOperands { op: op.name(), args: tys.clone() };
        let expect_arity = |n: usize| -> Result<(), TypeError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(TypeError::BadOperands { op: op.name(), args: tys.clone() })
            }
        };
        match op {
            Add | Sub | Mul => {
                expect_arity(2)?;
                match (tys[0], tys[1]) {
                    (Int, Int) => Ok(Expr::App(op, args, Int)),
                    (Int | Complex, Int | Complex) => {
                        let args = args.into_iter().map(Expr::promote).collect();
                        Ok(Expr::App(op, args, Complex))
                    }
                    _ => Err(bad()),
                }
            }
            Neg => {
                expect_arity(1)?;
                match tys[0] {
                    Int => Ok(Expr::App(op, args, Int)),
                    Complex => Ok(Expr::App(op, args, Complex)),
                    _ => Err(bad()),
                }
            }
            Div => {
                expect_arity(2)?;
                if tys.iter().all(|t| matches!(t, Int | Complex)) {
                    let args = args.into_iter().map(Expr::promote).collect();
                    Ok(Expr::App(op, args, Complex))
                } else {
                    Err(bad())
                }
            }
            Eq | Ne => {
                expect_arity(2)?;
                match (tys[0], tys[1]) {
                    (Bool, Bool) | (Int, Int) | (Complex, Complex) => {
                        Ok(Expr::App(op, args, Bool))
                    }
                    (Int, Complex) | (Complex, Int) => {
                        let args = args.into_iter().map(Expr::promote).collect();
                        Ok(Expr::App(op, args, Bool))
                    }
                    _ => Err(bad()),
                }
            }
            Lt | Le | Gt | Ge => {
                expect_arity(2)?;
                if tys == [Int, Int] {
                    Ok(Expr::App(op, args, Bool))
                } else {
                    Err(bad())
                }
            }
            And | Or | Xor => {
                expect_arity(2)?;
                if tys == [Bool, Bool] {
                    Ok(Expr::App(op, args, Bool))
                } else {
                    Err(bad())
                }
            }
            Not => {
                expect_arity(1)?;
                if tys == [Bool] {
                    Ok(Expr::App(op, args, Bool))
                } else {
                    Err(bad())
                }
            }
            Conj | Abs | Exp | Cos | Sin | Sqrt => {
                expect_arity(1)?;
                if matches!(tys[0], Int | Complex) {
                    let args = args.into_iter().map(Expr::promote).collect();
                    Ok(Expr::App(op, args, Complex))
                } else {
                    Err(bad())
                }
            }
            ToComplex => {
                expect_arity(1)?;
                if tys == [Int] {
                    Ok(Expr::App(op, args, Complex))
                } else {
                    Err(bad())
                }
            }
        }
    }

    /// Subscripted array access `a[s1,...,sn]`.
    pub fn index(array: ArrayRef, subs: Vec<Expr>) -> Result<Expr, TypeError> {
        if subs.len() != array.ty.args.len() {
            return Err(TypeError::Arity {
                array: array.name.to_string(),
                expected: array.ty.args.len(),
                actual: subs.len(),
            });
        }
        for (s, want) in subs.iter().zip(&array.ty.args) {
            if s.ty() != *want {
                return Err(TypeError::Mismatch { expected: *want, actual: s.ty() });
            }
        }
        Ok(Expr::Index(array, subs))
    }

    /// `if b then s1 else s0 fi`.
    pub fn ite(guard: Expr, then: Expr, otherwise: Expr) -> Result<Expr, TypeError> {
        if guard.ty() != BasicType::Bool {
            return Err(TypeError::Guard(guard.ty()));
        }
        if then.ty() != otherwise.ty() {
            return Err(TypeError::Branches(then.ty(), otherwise.ty()));
        }
        Ok(Expr::If(Box::new(guard), Box::new(then), Box::new(otherwise)))
    }

    /// All variable names occurring in the expression, simple and array.
    pub fn collect_vars(&self, out: &mut std::collections::BTreeSet<Arc<str>>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.name.clone());
            }
            Expr::Const(_) => {}
            Expr::App(_, args, _) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
            Expr::Index(a, subs) => {
                out.insert(a.name.clone());
                for s in subs {
                    s.collect_vars(out);
                }
            }
            Expr::If(c, t, e) => {
                c.collect_vars(out);
                t.collect_vars(out);
                e.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Arc<str>> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

pub(crate) fn apply_builtin(
    op: BuiltinOp,
    args: &[Value],
    tol: f64,
    display: impl Fn() -> String,
) -> Result<Value, EvalError> {
    use BuiltinOp::*;
    let int2 = |f: fn(i64, i64) -> Option<i64>| -> Result<Value, EvalError> {
        let (a, b) = (args[0].as_int().unwrap(), args[1].as_int().unwrap());
        f(a, b).map(Value::Int).ok_or_else(|| EvalError::IntOverflow(display()))
    };
    let cpx = |i: usize| -> Complex64 { args[i].as_complex().unwrap() };
    Ok(match op {
        Add => match args[0] {
            Value::Int(_) => return int2(i64::checked_add),
            _ => Value::Complex(cpx(0) + cpx(1)),
        },
        Sub => match args[0] {
            Value::Int(_) => return int2(i64::checked_sub),
            _ => Value::Complex(cpx(0) - cpx(1)),
        },
        Mul => match args[0] {
            Value::Int(_) => return int2(i64::checked_mul),
            _ => Value::Complex(cpx(0) * cpx(1)),
        },
        Neg => match args[0] {
            Value::Int(n) => Value::Int(
                n.checked_neg().ok_or_else(|| EvalError::IntOverflow(display()))?,
            ),
            Value::Complex(c) => Value::Complex(-c),
            Value::Bool(_) => return Err(EvalError::IllTyped(display())),
        },
        Div => {
            let d = cpx(1);
            if d.norm() == 0.0 {
                return Err(EvalError::DivByZero);
            }
            Value::Complex(cpx(0) / d)
        }
        Eq => Value::Bool(args[0].approx_eq(&args[1], tol)),
        Ne => Value::Bool(!args[0].approx_eq(&args[1], tol)),
        Lt => Value::Bool(args[0].as_int().unwrap() < args[1].as_int().unwrap()),
        Le => Value::Bool(args[0].as_int().unwrap() <= args[1].as_int().unwrap()),
        Gt => Value::Bool(args[0].as_int().unwrap() > args[1].as_int().unwrap()),
        Ge => Value::Bool(args[0].as_int().unwrap() >= args[1].as_int().unwrap()),
        And => Value::Bool(args[0].as_bool().unwrap() && args[1].as_bool().unwrap()),
        Or => Value::Bool(args[0].as_bool().unwrap() || args[1].as_bool().unwrap()),
        Xor => Value::Bool(args[0].as_bool().unwrap() ^ args[1].as_bool().unwrap()),
        Not => Value::Bool(!args[0].as_bool().unwrap()),
        Conj => Value::Complex(cpx(0).conj()),
        Abs => Value::Complex(Complex64::new(cpx(0).norm(), 0.0)),
        Exp => Value::Complex(cpx(0).exp()),
        Cos => Value::Complex(cpx(0).cos()),
        Sin => Value::Complex(cpx(0).sin()),
        Sqrt => Value::Complex(cpx(0).sqrt()),
        ToComplex => Value::Complex(cpx(0)),
    })
}

// Precedence levels for display; higher binds tighter.
fn prec(op: BuiltinOp) -> u8 {
    use BuiltinOp::*;
    match op {
        Or => 1,
        And => 2,
        Xor => 2,
        Eq | Ne | Lt | Le | Gt | Ge => 3,
        Add | Sub => 4,
        Mul | Div => 5,
        Neg | Not => 6,
        _ => 7,
    }
}

impl Expr {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        match self {
            Expr::Var(v) => write!(f, "{}", v.name),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::App(BuiltinOp::ToComplex, args, _) => args[0].fmt_prec(f, min),
            Expr::App(op @ (BuiltinOp::Neg | BuiltinOp::Not), args, _) => {
                let p = prec(*op);
                if p < min {
                    write!(f, "(")?;
                }
                write!(f, "{}", op.name())?;
                args[0].fmt_prec(f, p + 1)?;
                if p < min {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Expr::App(op, args, _) if args.len() == 2 => {
                let p = prec(*op);
                if p < min {
                    write!(f, "(")?;
                }
                args[0].fmt_prec(f, p)?;
                write!(f, " {} ", op.name())?;
                args[1].fmt_prec(f, p + 1)?;
                if p < min {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Expr::App(op, args, _) => {
                write!(f, "{}(", op.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    a.fmt_prec(f, 0)?;
                }
                write!(f, ")")
            }
            Expr::Index(a, subs) => {
                write!(f, "{}[", a.name)?;
                for (i, s) in subs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    s.fmt_prec(f, 0)?;
                }
                write!(f, "]")
            }
            Expr::If(c, t, e) => {
                write!(f, "if ")?;
                c.fmt_prec(f, 0)?;
                write!(f, " then ")?;
                t.fmt_prec(f, 0)?;
                write!(f, " else ")?;
                e.fmt_prec(f, 0)?;
                write!(f, " fi")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
