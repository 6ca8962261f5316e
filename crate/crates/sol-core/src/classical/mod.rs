//! The embedded classical first-order layer: types, expressions, formulas,
//! structures, states, evaluation, satisfaction and substitution.
//!
//! All values are immutable after construction; evaluation is pure and safe
//! to call from concurrent workers sharing one [`Structure`].

mod expr;
mod formula;
mod structure;
mod value;

pub use expr::{ArrayRef, BuiltinOp, EvalError, Expr, TypeError, VarRef};
pub use formula::{satisfies, subst_expr, subst_formula, Binding, Formula, SubstTarget};
pub use structure::{
    eval_expr, ArrayDecl, ArrayValue, State, StateSpace, Structure, VarDecl,
};
pub use value::{BasicType, DiscreteValue, Domain, HigherType, Value};

#[cfg(test)]
mod tests;
