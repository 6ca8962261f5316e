//! Conditional equational rewriting: dyad normal forms, ground equality
//! decision, pattern rules with side-condition discharge, and the order-law
//! property suites.

mod normal_form;
mod order_laws;
mod rules;


pub use normal_form::{decide_ground_equality, normalize, NormalForm};
pub use order_laws::order_laws_suite;
pub use rules::{
    builtin_rules, coefficient_addition, entails_classically, identity_rule,
    matrix_representation, match_term, self_outer_product, DischargeMode, MatchBindings,
    RewriteEngine, RewriteError, RewriteOutcome, RewriteRule, SideCondition,
};
