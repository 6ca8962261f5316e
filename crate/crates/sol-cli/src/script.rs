//! Parsed scripts: declarations plus directives, with a printer that
//! round-trips through the parser.

use std::fmt;
use std::sync::Arc;

use sol_core::classical::{BasicType, DiscreteValue, Expr, Formula, Structure};
use sol_core::semantics::QuantumStructure;
use sol_core::sol::SolFormula;
use sol_core::stdlib::RecursiveDef;
use sol_core::term::FormalOp;

/// A declaration, kept in source order for printing.
#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Qubit { name: Arc<str> },
    QVar { name: Arc<str>, ty: BasicType, range: Option<(i64, i64)> },
    QReg { name: Arc<str>, args: Vec<BasicType>, value: BasicType, range: Option<(i64, i64)> },
    Var { name: Arc<str>, ty: BasicType, range: Option<(i64, i64)> },
    Array { name: Arc<str>, args: Vec<BasicType>, value: BasicType },
    OpVar { name: Arc<str>, dom: Vec<BasicType>, cod: Vec<BasicType> },
    Def { def: Arc<RecursiveDef>, source: String },
}

#[derive(Clone, Debug)]
pub enum Directive {
    Let { line: usize, name: Arc<str>, cell: Option<Vec<DiscreteValue>>, value: Expr },
    Assume { line: usize, formula: Formula },
    Assert { line: usize, goal: SolFormula },
    Entail { line: usize, sigma: Vec<Formula>, gamma: Vec<SolFormula>, goal: SolFormula },
    Eval { line: usize, term: FormalOp },
    Sign { line: usize, term: FormalOp },
    Normalize { line: usize, term: FormalOp },
    Suite { line: usize, name: String },
}

impl PartialEq for Directive {
    /// Structural equality; source positions are not part of the syntax.
    fn eq(&self, other: &Self) -> bool {
        use Directive::*;
        match (self, other) {
            (
                Let { name: a, cell: b, value: c, .. },
                Let { name: x, cell: y, value: z, .. },
            ) => a == x && b == y && c == z,
            (Assume { formula: a, .. }, Assume { formula: b, .. }) => a == b,
            (Assert { goal: a, .. }, Assert { goal: b, .. }) => a == b,
            (
                Entail { sigma: a, gamma: b, goal: c, .. },
                Entail { sigma: x, gamma: y, goal: z, .. },
            ) => a == x && b == y && c == z,
            (Eval { term: a, .. }, Eval { term: b, .. }) => a == b,
            (Sign { term: a, .. }, Sign { term: b, .. }) => a == b,
            (Normalize { term: a, .. }, Normalize { term: b, .. }) => a == b,
            (Suite { name: a, .. }, Suite { name: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl Directive {
    pub fn line(&self) -> usize {
        match self {
            Directive::Let { line, .. }
            | Directive::Assume { line, .. }
            | Directive::Assert { line, .. }
            | Directive::Entail { line, .. }
            | Directive::Eval { line, .. }
            | Directive::Sign { line, .. }
            | Directive::Normalize { line, .. }
            | Directive::Suite { line, .. } => *line,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Directive::Let { .. } => "let",
            Directive::Assume { .. } => "assume",
            Directive::Assert { .. } => "assert",
            Directive::Entail { .. } => "entail",
            Directive::Eval { .. } => "eval",
            Directive::Sign { .. } => "sign",
            Directive::Normalize { .. } => "normalize",
            Directive::Suite { .. } => "suite",
        }
    }
}

/// A parsed script: the structures to run against plus the directive list.
#[derive(Debug)]
pub struct Script {
    pub structure: Structure,
    pub quantum: QuantumStructure,
    pub decls: Vec<Decl>,
    pub directives: Vec<Directive>,
    /// Non-fatal notes surfaced in the report (e.g. finite-range
    /// approximation of Int-valued quantum state spaces).
    pub warnings: Vec<String>,
}

impl PartialEq for Script {
    fn eq(&self, other: &Self) -> bool {
        self.decls == other.decls && self.directives == other.directives
    }
}

fn fmt_ty(ty: BasicType, range: Option<(i64, i64)>) -> String {
    match (ty, range) {
        (BasicType::Int, Some((lo, hi))) => format!("Int[{lo}..{hi}]"),
        (t, _) => t.to_string(),
    }
}

fn fmt_tylist(tys: &[BasicType]) -> String {
    if tys.is_empty() {
        "()".to_string()
    } else {
        tys.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" * ")
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Qubit { name } => write!(f, "qubit {name};"),
            Decl::QVar { name, ty, range } => {
                write!(f, "qvar {name} : {};", fmt_ty(*ty, *range))
            }
            Decl::QReg { name, args, value, range } => {
                write!(f, "qreg {name} : {} -> {};", fmt_tylist(args), fmt_ty(*value, *range))
            }
            Decl::Var { name, ty, range } => {
                write!(f, "var {name} : {};", fmt_ty(*ty, *range))
            }
            Decl::Array { name, args, value } => {
                write!(f, "array {name} : {} -> {value};", fmt_tylist(args))
            }
            Decl::OpVar { name, dom, cod } => {
                if dom == cod {
                    write!(f, "opvar {name} : {};", fmt_tylist(dom))
                } else {
                    write!(f, "opvar {name} : {} -> {};", fmt_tylist(dom), fmt_tylist(cod))
                }
            }
            Decl::Def { source, .. } => write!(f, "{source}"),
        }
    }
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Directive::Let { name, cell, value, .. } => {
                write!(f, "let {name}")?;
                if let Some(cell) = cell {
                    write!(f, "[")?;
                    for (i, d) in cell.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{d}")?;
                    }
                    write!(f, "]")?;
                }
                write!(f, " := {value};")
            }
            Directive::Assume { formula, .. } => write!(f, "assume {formula};"),
            Directive::Assert { goal, .. } => write!(f, "assert {goal};"),
            Directive::Entail { sigma, gamma, goal, .. } => {
                write!(f, "entail ")?;
                for (i, s) in sigma.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, " |- ")?;
                for (i, g) in gamma.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, " => {goal};")
            }
            Directive::Eval { term, .. } => write!(f, "eval {term};"),
            Directive::Sign { term, .. } => write!(f, "sign {term};"),
            Directive::Normalize { term, .. } => write!(f, "normalize {term};"),
            Directive::Suite { name, .. } => write!(f, "suite {name};"),
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        for d in &self.directives {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}
