//! Recursive-descent parser for `.sol` scripts.
//!
//! The parser is single-pass: declarations extend the symbol table as they
//! are seen, and directive bodies are lowered to typed core terms
//! immediately, so type errors carry source positions. A handful of
//! positions need backtracking (scale prefixes, parenthesised formulas);
//! those save and restore the token index.

use std::f64::consts::PI;
use std::sync::Arc;

use sol_core::classical::{
    eval_expr, ArrayRef, BasicType, BuiltinOp, Expr, Formula, State, Structure,
    Value, VarRef,
};
use sol_core::config::Config;
use sol_core::registers::{QuantumRef, QuantumVarDecl};
use sol_core::semantics::PredicateKind;
use sol_core::sol::{SolFormula, SolRel};
use sol_core::stdlib::recursive::{DefBody, DefCase, DefParam, Template};
use sol_core::stdlib::{gates, RecursiveDef};
use sol_core::term::{FormalOp, OpConstDecl, OpVarDecl, QuantumTypeSpec, Signature};

use crate::lexer::{tokenize, Tok, Token};
use crate::script::{Decl, Directive, Script};

#[derive(Debug, thiserror::Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn lex(e: crate::lexer::LexError) -> ParseError {
        ParseError { line: e.line, col: e.col, message: e.message }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    structure: Structure,
    decls: Vec<Decl>,
    qvars: Vec<Arc<QuantumVarDecl>>,
    opvars: Vec<Arc<OpVarDecl>>,
    consts: Vec<Arc<OpConstDecl>>,
    defs: Vec<Arc<RecursiveDef>>,
    /// Parameters of the definition currently being parsed, shadowing
    /// globals inside its body.
    def_scope: Vec<DefParam>,
    /// Name of the definition currently being parsed (for self-calls).
    def_name: Option<Arc<str>>,
}

pub fn parse(text: &str, config: &Config) -> Result<Script, ParseError> {
    let tokens = tokenize(text).map_err(ParseError::lex)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        structure: Structure::new(config.clone()),
        decls: Vec::new(),
        qvars: Vec::new(),
        opvars: Vec::new(),
        consts: gates::builtin_decls(),
        defs: Vec::new(),
        def_scope: Vec::new(),
        def_name: None,
    };
    let mut directives = Vec::new();
    while !p.at_end() {
        if let Some(d) = p.item()? {
            directives.push(d);
        }
    }
    let mut quantum = gates::quantum_structure(p.structure.clone());
    let mut warnings = Vec::new();
    for q in &p.qvars {
        if q.value_type == BasicType::Int {
            let (lo, hi) = q.value_range.unwrap_or(config.int_range);
            warnings.push(format!(
                "quantum variable {} has value type Int: its state space is \
                 approximated by the finite range [{lo}, {hi}]",
                q.name
            ));
        }
        quantum.declare_qvar(q.clone());
    }
    for x in &p.opvars {
        quantum.declare_opvar(x.clone());
    }
    Ok(Script { structure: p.structure, quantum, decls: p.decls, directives, warnings })
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + k).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos.min(self.tokens.len().saturating_sub(1)))
            .map(|t| (t.line, t.col))
            .unwrap_or((0, 0))
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError { line, col, message: message.into() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            let found = self.peek().map(|t| t.to_string()).unwrap_or_else(|| "end of input".into());
            self.err(format!("expected `{tok}`, found `{found}`"))
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(s),
            other => {
                self.pos = self.pos.saturating_sub(usize::from(other.is_some()));
                self.err("expected an identifier")
            }
        }
    }

    fn line(&self) -> usize {
        self.here().0
    }

    // -- declarations and items --------------------------------------------

    fn item(&mut self) -> Result<Option<Directive>, ParseError> {
        let line = self.line();
        if self.eat_kw("qubit") {
            let name = self.ident()?;
            self.expect(Tok::Semi)?;
            self.declare_qvar(name.clone(), Vec::new(), BasicType::Bool, None)?;
            self.decls.push(Decl::Qubit { name: name.into() });
            return Ok(None);
        }
        if self.eat_kw("qvar") {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let (ty, range) = self.basic_type()?;
            self.expect(Tok::Semi)?;
            self.declare_qvar(name.clone(), Vec::new(), ty, range)?;
            self.decls.push(Decl::QVar { name: name.into(), ty, range });
            return Ok(None);
        }
        if self.eat_kw("qreg") {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let args = self.type_list()?;
            self.expect(Tok::Arrow)?;
            let (value, range) = self.basic_type()?;
            self.expect(Tok::Semi)?;
            self.declare_qvar(name.clone(), args.clone(), value, range)?;
            self.decls.push(Decl::QReg { name: name.into(), args, value, range });
            return Ok(None);
        }
        if self.eat_kw("var") {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let (ty, range) = self.basic_type()?;
            self.expect(Tok::Semi)?;
            if self.lookup_var(&name).is_some() {
                return self.err(format!("variable {name} is already declared"));
            }
            match range {
                Some((lo, hi)) => {
                    self.structure.declare_var_ranged(name.clone(), lo, hi);
                }
                None => {
                    self.structure.declare_var(name.clone(), ty);
                }
            }
            self.decls.push(Decl::Var { name: name.into(), ty, range });
            return Ok(None);
        }
        if self.eat_kw("array") {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let args = self.type_list()?;
            self.expect(Tok::Arrow)?;
            let (value, range) = self.basic_type()?;
            if range.is_some() {
                return self.err("array value types do not take range annotations");
            }
            self.expect(Tok::Semi)?;
            self.structure.declare_array(name.clone(), args.clone(), value);
            self.decls.push(Decl::Array { name: name.into(), args, value });
            return Ok(None);
        }
        if self.eat_kw("opvar") {
            let name = self.ident()?;
            if self.lookup_const(&name).is_some() {
                return self.err(format!("{name} is a built-in operator constant"));
            }
            if self.lookup_opvar(&name).is_some() {
                return self.err(format!("operator variable {name} is already declared"));
            }
            self.expect(Tok::Colon)?;
            let dom = self.type_list()?;
            let cod = if self.eat(&Tok::Arrow) { self.type_list()? } else { dom.clone() };
            self.expect(Tok::Semi)?;
            self.opvars.push(Arc::new(OpVarDecl {
                name: name.clone().into(),
                dom: dom.clone(),
                cod: cod.clone(),
            }));
            self.decls.push(Decl::OpVar { name: name.into(), dom, cod });
            return Ok(None);
        }
        if self.eat_kw("def") {
            return self.def_decl().map(|()| None);
        }
        // Directives.
        if self.eat_kw("let") {
            let name = self.ident()?;
            let cell = if self.eat(&Tok::LBracket) {
                let mut cells = Vec::new();
                loop {
                    let e = self.expr(true)?;
                    let v = self.const_value(&e)?;
                    cells.push(v.to_discrete().ok_or_else(|| ParseError {
                        line,
                        col: 0,
                        message: "array subscripts must be Bool or Int".into(),
                    })?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RBracket)?;
                Some(cells)
            } else {
                None
            };
            self.expect(Tok::Colon)?;
            self.expect(Tok::Eq)?;
            let value = self.expr(true)?;
            self.expect(Tok::Semi)?;
            if cell.is_none() && self.lookup_var(&name).is_none() {
                return self.err(format!("let target {name} is not a declared variable"));
            }
            if cell.is_some() && self.lookup_array(&name).is_none() {
                return self.err(format!("let target {name} is not a declared array"));
            }
            return Ok(Some(Directive::Let { line, name: name.into(), cell, value }));
        }
        if self.eat_kw("assume") {
            let formula = self.formula()?;
            self.expect(Tok::Semi)?;
            return Ok(Some(Directive::Assume { line, formula }));
        }
        if self.eat_kw("assert") {
            let goal = self.sol_formula()?;
            self.expect(Tok::Semi)?;
            return Ok(Some(Directive::Assert { line, goal }));
        }
        if self.eat_kw("entail") {
            let mut sigma = Vec::new();
            if self.peek() != Some(&Tok::Turnstile) {
                loop {
                    sigma.push(self.formula()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::Turnstile)?;
            let mut gamma = Vec::new();
            if self.peek() != Some(&Tok::FatArrow) {
                loop {
                    gamma.push(self.sol_formula()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::FatArrow)?;
            let goal = self.sol_formula()?;
            self.expect(Tok::Semi)?;
            return Ok(Some(Directive::Entail { line, sigma, gamma, goal }));
        }
        if self.eat_kw("eval") {
            let term = self.opterm()?;
            self.expect(Tok::Semi)?;
            return Ok(Some(Directive::Eval { line, term }));
        }
        if self.eat_kw("sign") {
            let term = self.opterm()?;
            self.expect(Tok::Semi)?;
            return Ok(Some(Directive::Sign { line, term }));
        }
        if self.eat_kw("normalize") {
            let term = self.opterm()?;
            self.expect(Tok::Semi)?;
            return Ok(Some(Directive::Normalize { line, term }));
        }
        if self.eat_kw("suite") {
            let name = self.ident()?;
            self.expect(Tok::Semi)?;
            return Ok(Some(Directive::Suite { line, name }));
        }
        self.err("expected a declaration or directive")
    }

    fn declare_qvar(
        &mut self,
        name: String,
        args: Vec<BasicType>,
        value: BasicType,
        range: Option<(i64, i64)>,
    ) -> Result<(), ParseError> {
        if self.lookup_qvar(&name).is_some() {
            return self.err(format!("quantum variable {name} is already declared"));
        }
        if !value.is_enumerable() {
            return self.err("quantum value types must be enumerable (Bool or Int)");
        }
        self.qvars.push(Arc::new(QuantumVarDecl {
            name: name.into(),
            arg_types: args,
            value_type: value,
            value_range: range,
        }));
        Ok(())
    }

    fn basic_type(&mut self) -> Result<(BasicType, Option<(i64, i64)>), ParseError> {
        let name = self.ident()?;
        match name.as_str() {
            "Bool" => Ok((BasicType::Bool, None)),
            "C" => Ok((BasicType::Complex, None)),
            "Int" => {
                if self.eat(&Tok::LBracket) {
                    let lo = self.int_literal()?;
                    self.expect(Tok::DotDot)?;
                    let hi = self.int_literal()?;
                    self.expect(Tok::RBracket)?;
                    if lo > hi {
                        return self.err("empty Int range");
                    }
                    Ok((BasicType::Int, Some((lo, hi))))
                } else {
                    Ok((BasicType::Int, None))
                }
            }
            other => self.err(format!("unknown type {other}")),
        }
    }

    fn int_literal(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat(&Tok::Minus);
        match self.bump() {
            Some(Tok::Int(n)) => Ok(if neg { -n } else { n }),
            _ => self.err("expected an integer literal"),
        }
    }

    fn type_list(&mut self) -> Result<Vec<BasicType>, ParseError> {
        if self.eat(&Tok::LParen) {
            self.expect(Tok::RParen)?;
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        loop {
            let (t, range) = self.basic_type()?;
            if range.is_some() {
                return self.err("type lists do not take range annotations");
            }
            out.push(t);
            if !self.eat(&Tok::Star) {
                break;
            }
        }
        Ok(out)
    }

    // -- symbol lookups ------------------------------------------------------

    fn lookup_var(&self, name: &str) -> Option<VarRef> {
        if let Some(p) = self.def_scope.iter().find(|p| &*p.name == name) {
            return Some(VarRef { name: p.name.clone(), ty: p.ty });
        }
        self.structure
            .lookup_var(name)
            .map(|d| VarRef { name: d.name.clone(), ty: d.ty })
    }

    fn lookup_array(&self, name: &str) -> Option<ArrayRef> {
        self.structure
            .lookup_array(name)
            .map(|d| ArrayRef { name: d.name.clone(), ty: d.ty.clone() })
    }

    fn lookup_qvar(&self, name: &str) -> Option<Arc<QuantumVarDecl>> {
        self.qvars.iter().find(|d| &*d.name == name).cloned()
    }

    fn lookup_opvar(&self, name: &str) -> Option<Arc<OpVarDecl>> {
        self.opvars.iter().find(|d| &*d.name == name).cloned()
    }

    fn lookup_const(&self, name: &str) -> Option<Arc<OpConstDecl>> {
        self.consts.iter().find(|d| &*d.name == name).cloned()
    }

    fn lookup_def(&self, name: &str) -> Option<Arc<RecursiveDef>> {
        self.defs.iter().find(|d| &*d.name == name).cloned()
    }

    fn const_value(&self, e: &Expr) -> Result<Value, ParseError> {
        if !e.vars().is_empty() {
            return self.err("expected a constant expression");
        }
        eval_expr(&self.structure, &State::default(), e)
            .map_err(|err| ParseError { line: self.line(), col: 0, message: err.to_string() })
    }

    // -- expressions ---------------------------------------------------------

    /// Classical expression; `allow_gt` is false at the top level of ket
    /// and bra labels, where `>` closes the bracket instead.
    fn expr(&mut self, allow_gt: bool) -> Result<Expr, ParseError> {
        self.expr_or(allow_gt)
    }

    fn expr_or(&mut self, allow_gt: bool) -> Result<Expr, ParseError> {
        let mut lhs = self.expr_and(allow_gt)?;
        while self.eat(&Tok::PipePipe) {
            let rhs = self.expr_and(allow_gt)?;
            lhs = self.app(BuiltinOp::Or, vec![lhs, rhs])?;
        }
        Ok(lhs)
    }

    fn expr_and(&mut self, allow_gt: bool) -> Result<Expr, ParseError> {
        let mut lhs = self.expr_cmp(allow_gt)?;
        loop {
            if self.eat(&Tok::AmpAmp) {
                let rhs = self.expr_cmp(allow_gt)?;
                lhs = self.app(BuiltinOp::And, vec![lhs, rhs])?;
            } else if self.peek() == Some(&Tok::Caret)
                && self.peek_at(1) != Some(&Tok::Plus)
            {
                self.bump();
                let rhs = self.expr_cmp(allow_gt)?;
                lhs = self.app(BuiltinOp::Xor, vec![lhs, rhs])?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn expr_cmp(&mut self, allow_gt: bool) -> Result<Expr, ParseError> {
        let lhs = self.expr_add(allow_gt)?;
        let op = match self.peek() {
            Some(Tok::Eq) => BuiltinOp::Eq,
            Some(Tok::Ne) => BuiltinOp::Ne,
            Some(Tok::Lt) => BuiltinOp::Lt,
            Some(Tok::Le) => BuiltinOp::Le,
            Some(Tok::Gt) if allow_gt => BuiltinOp::Gt,
            Some(Tok::Ge) => BuiltinOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.expr_add(allow_gt)?;
        self.app(op, vec![lhs, rhs])
    }

    fn expr_add(&mut self, allow_gt: bool) -> Result<Expr, ParseError> {
        let mut lhs = self.expr_mul(allow_gt)?;
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.expr_mul(allow_gt)?;
                lhs = self.app(BuiltinOp::Add, vec![lhs, rhs])?;
            } else if self.eat(&Tok::Minus) {
                let rhs = self.expr_mul(allow_gt)?;
                lhs = self.app(BuiltinOp::Sub, vec![lhs, rhs])?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn expr_mul(&mut self, allow_gt: bool) -> Result<Expr, ParseError> {
        let mut lhs = self.expr_unary(allow_gt)?;
        loop {
            if self.eat(&Tok::Star) {
                let rhs = self.expr_unary(allow_gt)?;
                lhs = self.app(BuiltinOp::Mul, vec![lhs, rhs])?;
            } else if self.eat(&Tok::Slash) {
                let rhs = self.expr_unary(allow_gt)?;
                lhs = self.app(BuiltinOp::Div, vec![lhs, rhs])?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn expr_unary(&mut self, allow_gt: bool) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            let inner = self.expr_unary(allow_gt)?;
            return self.app(BuiltinOp::Neg, vec![inner]);
        }
        if self.eat(&Tok::Bang) {
            let inner = self.expr_unary(allow_gt)?;
            return self.app(BuiltinOp::Not, vec![inner]);
        }
        self.expr_atom(allow_gt)
    }

    fn expr_atom(&mut self, allow_gt: bool) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.bump();
                Ok(Expr::int(n))
            }
            Some(Tok::Float(x)) => {
                self.bump();
                Ok(Expr::real(x))
            }
            Some(Tok::Imag(x)) => {
                self.bump();
                Ok(Expr::complex(0.0, x))
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.expr(true)?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                match name.as_str() {
                    "true" => {
                        self.bump();
                        return Ok(Expr::bool(true));
                    }
                    "false" => {
                        self.bump();
                        return Ok(Expr::bool(false));
                    }
                    "pi" => {
                        self.bump();
                        return Ok(Expr::real(PI));
                    }
                    "if" => {
                        self.bump();
                        let guard = self.expr(true)?;
                        if !self.eat_kw("then") {
                            return self.err("expected `then`");
                        }
                        let t = self.expr(true)?;
                        if !self.eat_kw("else") {
                            return self.err("expected `else`");
                        }
                        let e = self.expr(true)?;
                        if !self.eat_kw("fi") {
                            return self.err("expected `fi`");
                        }
                        return Expr::ite(guard, t, e).map_err(|e| ParseError {
                            line: self.line(),
                            col: 0,
                            message: e.to_string(),
                        });
                    }
                    _ => {}
                }
                // Function call, array index or plain variable.
                if self.peek_at(1) == Some(&Tok::LParen) {
                    if let Some(op) = builtin_fn(&name) {
                        self.bump();
                        self.bump();
                        let mut args = vec![self.expr(true)?];
                        while self.eat(&Tok::Comma) {
                            args.push(self.expr(true)?);
                        }
                        self.expect(Tok::RParen)?;
                        return self.app(op, args);
                    }
                    return self.err(format!("unknown function {name}"));
                }
                if self.peek_at(1) == Some(&Tok::LBracket) {
                    if let Some(arr) = self.lookup_array(&name) {
                        self.bump();
                        self.bump();
                        let mut subs = vec![self.expr(true)?];
                        while self.eat(&Tok::Comma) {
                            subs.push(self.expr(true)?);
                        }
                        self.expect(Tok::RBracket)?;
                        return Expr::index(arr, subs).map_err(|e| ParseError {
                            line: self.line(),
                            col: 0,
                            message: e.to_string(),
                        });
                    }
                    return self.err(format!("{name} is not a declared array"));
                }
                match self.lookup_var(&name) {
                    Some(v) => {
                        self.bump();
                        Ok(Expr::Var(v))
                    }
                    None => self.err(format!("{name} is not a declared variable")),
                }
            }
            _ => {
                let _ = allow_gt;
                self.err("expected an expression")
            }
        }
    }

    fn app(&self, op: BuiltinOp, args: Vec<Expr>) -> Result<Expr, ParseError> {
        Expr::app(op, args).map_err(|e| ParseError {
            line: self.line(),
            col: 0,
            message: e.to_string(),
        })
    }

    // -- classical formulas ---------------------------------------------------

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.formula_or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn formula_or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.formula_and()?;
        while self.eat(&Tok::Pipe) {
            let rhs = self.formula_and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn formula_and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.formula_unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.formula_unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn formula_unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Tok::Bang) {
            return Ok(Formula::not(self.formula_unary()?));
        }
        if self.eat_kw("forall") {
            let (v, body) = self.quantifier_body()?;
            return Ok(Formula::forall(v, body));
        }
        if self.eat_kw("exists") {
            let (v, body) = self.quantifier_body()?;
            return Ok(Formula::exists(v, body));
        }
        // Try an expression atom; fall back to a parenthesised formula.
        let save = self.pos;
        match self.expr(true) {
            Ok(e) if e.ty() == BasicType::Bool => Ok(Formula::Atom(e)),
            Ok(_) => {
                self.pos = save;
                self.err("formula atom must have type Bool")
            }
            Err(first) => {
                self.pos = save;
                if self.eat(&Tok::LParen) {
                    let f = self.formula()?;
                    self.expect(Tok::RParen)?;
                    Ok(f)
                } else {
                    Err(first)
                }
            }
        }
    }

    fn quantifier_body(&mut self) -> Result<(VarRef, Formula), ParseError> {
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let (ty, range) = self.basic_type()?;
        if range.is_some() {
            return self.err("quantified variables use the global range");
        }
        self.expect(Tok::Dot)?;
        let v = VarRef::new(name, ty);
        // The bound variable shadows globals inside its body.
        self.def_scope.push(DefParam { name: v.name.clone(), ty });
        let body = self.formula();
        self.def_scope.pop();
        Ok((v, body?))
    }

    // -- operator terms ---------------------------------------------------------

    fn qref(&mut self) -> Result<QuantumRef, ParseError> {
        let name = self.ident()?;
        let decl = self
            .lookup_qvar(&name)
            .ok_or_else(|| ParseError {
                line: self.line(),
                col: 0,
                message: format!("{name} is not a declared quantum variable"),
            })?;
        let indices = if self.eat(&Tok::LBracket) {
            let mut idx = vec![self.expr(true)?];
            while self.eat(&Tok::Comma) {
                idx.push(self.expr(true)?);
            }
            self.expect(Tok::RBracket)?;
            idx
        } else {
            Vec::new()
        };
        QuantumRef::subscripted(decl, indices).map_err(|e| ParseError {
            line: self.line(),
            col: 0,
            message: e.to_string(),
        })
    }

    fn qref_list(&mut self) -> Result<Vec<QuantumRef>, ParseError> {
        let mut out = vec![self.qref()?];
        while self.eat(&Tok::Comma) {
            out.push(self.qref()?);
        }
        Ok(out)
    }

    pub(crate) fn opterm(&mut self) -> Result<FormalOp, ParseError> {
        let mut lhs = self.opscale()?;
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.opscale()?;
                lhs = self.mk(FormalOp::sum(lhs, rhs))?;
            } else if self.peek() == Some(&Tok::Minus) && self.starts_opscale_after_minus() {
                self.bump();
                let rhs = self.opscale()?;
                lhs = self.mk(FormalOp::minus(lhs, rhs))?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn starts_opscale_after_minus(&self) -> bool {
        // `A - B`: a minus in term position always starts a subtrahend.
        true
    }

    fn opscale(&mut self) -> Result<FormalOp, ParseError> {
        // Try `expr . term`; backtrack to a plain product.
        let save = self.pos;
        if let Ok(c) = self.expr(true) {
            if self.eat(&Tok::Dot) {
                let inner = self.opscale()?;
                return self.mk(FormalOp::scale(c, inner));
            }
        }
        self.pos = save;
        self.opprod()
    }

    fn opprod(&mut self) -> Result<FormalOp, ParseError> {
        let mut lhs = self.optensor()?;
        while self.eat(&Tok::Star) {
            let rhs = self.optensor()?;
            lhs = self.mk(FormalOp::product(lhs, rhs))?;
        }
        Ok(lhs)
    }

    fn optensor(&mut self) -> Result<FormalOp, ParseError> {
        let mut lhs = self.opfactor()?;
        while self.eat(&Tok::Tensor) {
            let rhs = self.opfactor()?;
            lhs = FormalOp::tensor(lhs, rhs);
        }
        Ok(lhs)
    }

    fn opfactor(&mut self) -> Result<FormalOp, ParseError> {
        let mut t = self.opatom()?;
        while self.eat(&Tok::Adjoint) {
            t = FormalOp::adjoint(t);
        }
        Ok(t)
    }

    fn opatom(&mut self) -> Result<FormalOp, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Pipe) => {
                self.bump();
                // Ket `|expr>_q` or definition call `|Name(args)>`.
                let save = self.pos;
                if let Ok(label) = self.expr(false) {
                    if self.eat(&Tok::Gt) && self.eat(&Tok::Underscore) {
                        let q = self.qref()?;
                        return self.mk(FormalOp::ket(label, q));
                    }
                }
                self.pos = save;
                let name = self.ident()?;
                self.expect(Tok::LParen)?;
                let mut args = vec![self.expr(true)?];
                while self.eat(&Tok::Comma) {
                    args.push(self.expr(true)?);
                }
                self.expect(Tok::RParen)?;
                self.expect(Tok::Gt)?;
                if self.def_name.as_deref() == Some(name.as_str()) {
                    return self.err("self-calls are only meaningful inside `def` bodies");
                }
                let def = self.lookup_def(&name).ok_or_else(|| ParseError {
                    line: self.line(),
                    col: 0,
                    message: format!("{name} is not a defined state family"),
                })?;
                self.mk(FormalOp::defcall(def, args))
            }
            Some(Tok::Lt) => {
                self.bump();
                let label = self.expr(false)?;
                self.expect(Tok::Pipe)?;
                self.expect(Tok::Underscore)?;
                let q = self.qref()?;
                self.mk(FormalOp::bra(label, q))
            }
            Some(Tok::LParen) => {
                self.bump();
                let t = self.opterm()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Ident(name)) if name == "sc" && self.peek_at(1) == Some(&Tok::LParen) => {
                self.bump();
                self.bump();
                let e = self.expr(true)?;
                self.expect(Tok::RParen)?;
                self.mk(FormalOp::scalar(e))
            }
            Some(Tok::Ident(name)) => {
                self.bump();
                // Operator constant or variable applied at a signature.
                let params = if self.peek() == Some(&Tok::LParen)
                    && self.lookup_const(&name).is_some_and(|d| !d.param_types.is_empty())
                {
                    self.bump();
                    let mut ps = vec![self.expr(true)?];
                    while self.eat(&Tok::Comma) {
                        ps.push(self.expr(true)?);
                    }
                    self.expect(Tok::RParen)?;
                    ps
                } else {
                    Vec::new()
                };
                self.expect(Tok::LBracket)?;
                let dom =
                    if self.peek() == Some(&Tok::Arrow) { Vec::new() } else { self.qref_list()? };
                let cod = if self.eat(&Tok::Arrow) {
                    if self.peek() == Some(&Tok::RBracket) {
                        Vec::new()
                    } else {
                        self.qref_list()?
                    }
                } else {
                    // Without an arrow, the declaration decides: ket- and
                    // bra-typed operators take one-sided register lists,
                    // everything else is square.
                    let decl_cod = self
                        .lookup_const(&name)
                        .map(|d| d.qtype.clone())
                        .or_else(|| {
                            self.lookup_opvar(&name).map(|d| QuantumTypeSpec::Fixed {
                                dom: d.dom.clone(),
                                cod: d.cod.clone(),
                            })
                        });
                    match decl_cod {
                        Some(QuantumTypeSpec::Fixed { cod, .. }) if cod.is_empty() => Vec::new(),
                        _ => dom.clone(),
                    }
                };
                self.expect(Tok::RBracket)?;
                let sig = Signature { dom, cod };
                if let Some(d) = self.lookup_const(&name) {
                    return self.mk(FormalOp::opconst(d, params, sig));
                }
                if let Some(d) = self.lookup_opvar(&name) {
                    if !params.is_empty() {
                        return self.err("operator variables take no parameters");
                    }
                    return self.mk(FormalOp::opvar(d, sig));
                }
                self.err(format!("{name} is not a declared operator"))
            }
            _ => self.err("expected an operator term"),
        }
    }

    fn mk<T>(&self, r: Result<T, sol_core::term::TermError>) -> Result<T, ParseError> {
        r.map_err(|e| ParseError { line: self.line(), col: 0, message: e.to_string() })
    }

    // -- operator-level formulas ---------------------------------------------

    fn sol_formula(&mut self) -> Result<SolFormula, ParseError> {
        let lhs = self.sol_or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.sol_formula()?;
            return Ok(SolFormula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn sol_or(&mut self) -> Result<SolFormula, ParseError> {
        let mut lhs = self.sol_and()?;
        while self.eat(&Tok::Pipe) {
            let rhs = self.sol_and()?;
            lhs = SolFormula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn sol_and(&mut self) -> Result<SolFormula, ParseError> {
        let mut lhs = self.sol_unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.sol_unary()?;
            lhs = SolFormula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn sol_unary(&mut self) -> Result<SolFormula, ParseError> {
        if self.eat(&Tok::Bang) {
            return Ok(SolFormula::not(self.sol_unary()?));
        }
        if self.eat_kw("forall") {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let (ty, _) = self.basic_type()?;
            self.expect(Tok::Dot)?;
            let v = VarRef::new(name, ty);
            self.def_scope.push(DefParam { name: v.name.clone(), ty });
            let body = self.sol_formula();
            self.def_scope.pop();
            return Ok(SolFormula::forall_var(v, body?));
        }
        if self.eat_kw("forallOp") {
            let name = self.ident()?;
            self.expect(Tok::Dot)?;
            let decl = self.lookup_opvar(&name).ok_or_else(|| ParseError {
                line: self.line(),
                col: 0,
                message: format!("{name} is not a declared operator variable"),
            })?;
            let body = self.sol_formula()?;
            return Ok(SolFormula::forall_op(decl, body));
        }
        self.sol_atom()
    }

    fn sol_atom(&mut self) -> Result<SolFormula, ParseError> {
        // Keyword-led atoms.
        for (kw, kind) in [
            ("pure", PredicateKind::PureState),
            ("mixed", PredicateKind::MixedState),
            ("unitary", PredicateKind::Unitary),
            ("obs", PredicateKind::Observable),
        ] {
            if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
                && self.peek_at(1) == Some(&Tok::LParen)
            {
                self.bump();
                self.bump();
                let op = self.opterm()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Colon)?;
                let regs = self.qref_list()?;
                return Ok(SolFormula::Pred { kind, op, regs });
            }
        }
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "norm")
            && self.peek_at(1) == Some(&Tok::LParen)
        {
            self.bump();
            self.bump();
            let op = self.opterm()?;
            self.expect(Tok::RParen)?;
            let rel = self.sol_rel()?;
            let bound = self.const_scalar()?;
            if bound.im != 0.0 {
                return self.err("norm bounds are real constants");
            }
            return Ok(SolFormula::NormCmp { op, rel, bound: bound.re });
        }
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "tr")
            && self.peek_at(1) == Some(&Tok::LParen)
        {
            self.bump();
            self.bump();
            let op = self.opterm()?;
            self.expect(Tok::RParen)?;
            let rel = self.sol_rel()?;
            let bound = self.const_scalar()?;
            return Ok(SolFormula::TraceCmp { op, rel, bound });
        }
        // Operator-led atom `A == B` or `A <= B`; fall back to a
        // parenthesised formula.
        let save = self.pos;
        match self.opterm() {
            Ok(a) => {
                if self.eat(&Tok::EqEq) {
                    let b = self.opterm()?;
                    return Ok(SolFormula::OpEq(a, b));
                }
                if self.eat(&Tok::Le) {
                    let b = self.opterm()?;
                    return Ok(SolFormula::OpLeq(a, b));
                }
                self.pos = save;
            }
            Err(_) => {
                self.pos = save;
            }
        }
        if self.eat(&Tok::LParen) {
            let f = self.sol_formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        self.err("expected an operator-level formula")
    }

    fn sol_rel(&mut self) -> Result<SolRel, ParseError> {
        match self.bump() {
            Some(Tok::Eq) => Ok(SolRel::Eq),
            Some(Tok::Lt) => Ok(SolRel::Lt),
            Some(Tok::Gt) => Ok(SolRel::Gt),
            _ => self.err("expected `=`, `<` or `>`"),
        }
    }

    fn const_scalar(&mut self) -> Result<num_complex::Complex64, ParseError> {
        let e = self.expr(true)?;
        let v = self.const_value(&e)?;
        v.as_complex().ok_or_else(|| ParseError {
            line: self.line(),
            col: 0,
            message: "expected a numeric constant".into(),
        })
    }

    // -- recursive definitions -------------------------------------------------

    fn def_decl(&mut self) -> Result<(), ParseError> {
        let start = self.pos - 1;
        let name = self.ident()?;
        if self.lookup_def(&name).is_some() {
            return self.err(format!("definition {name} already exists"));
        }
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        loop {
            let pname = self.ident()?;
            self.expect(Tok::Colon)?;
            let (ty, range) = self.basic_type()?;
            if range.is_some() {
                return self.err("definition parameters use the global range");
            }
            params.push(DefParam { name: pname.into(), ty });
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Colon)?;
        self.expect(Tok::Eq)?;
        self.def_scope = params.clone();
        self.def_name = Some(name.clone().into());
        let mut cases = Vec::new();
        loop {
            if !self.eat_kw("when") {
                self.def_scope.clear();
                self.def_name = None;
                return self.err("expected `when`");
            }
            let guard = self.formula()?;
            self.expect(Tok::FatArrow)?;
            let body = self.template()?;
            cases.push(DefCase { guard, body: DefBody::Template(body) });
            if !self.eat(&Tok::Pipe) {
                break;
            }
        }
        self.def_scope.clear();
        self.def_name = None;
        self.expect(Tok::Semi)?;
        let def = Arc::new(RecursiveDef { name: name.into(), params, cases });
        self.defs.push(def.clone());
        // Keep the original text for printing.
        let end = self.pos;
        let source = self.render_tokens(start, end);
        self.decls.push(Decl::Def { def, source });
        Ok(())
    }

    fn render_tokens(&self, start: usize, end: usize) -> String {
        let mut out = String::new();
        for t in &self.tokens[start..end] {
            if !out.is_empty() && needs_space(&out, &t.tok) {
                out.push(' ');
            }
            out.push_str(&t.tok.to_string());
        }
        out
    }

    // Templates mirror the operator grammar, adding self-calls and
    // `apply(gate, state)`.
    fn template(&mut self) -> Result<Template, ParseError> {
        let mut lhs = self.template_scale()?;
        while self.eat(&Tok::Plus) {
            let rhs = self.template_scale()?;
            lhs = Template::Sum(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn template_scale(&mut self) -> Result<Template, ParseError> {
        let save = self.pos;
        if let Ok(c) = self.expr(true) {
            if self.eat(&Tok::Dot) {
                let inner = self.template_scale()?;
                return Ok(Template::Scale(c, Box::new(inner)));
            }
        }
        self.pos = save;
        self.template_prod()
    }

    fn template_prod(&mut self) -> Result<Template, ParseError> {
        let mut lhs = self.template_tensor()?;
        while self.eat(&Tok::Star) {
            let rhs = self.template_tensor()?;
            lhs = Template::Product(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn template_tensor(&mut self) -> Result<Template, ParseError> {
        let mut lhs = self.template_factor()?;
        while self.eat(&Tok::Tensor) {
            let rhs = self.template_factor()?;
            lhs = Template::Tensor(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn template_factor(&mut self) -> Result<Template, ParseError> {
        let mut t = self.template_atom()?;
        while self.eat(&Tok::Adjoint) {
            t = Template::Adjoint(Box::new(t));
        }
        Ok(t)
    }

    fn template_atom(&mut self) -> Result<Template, ParseError> {
        // apply(gate, state)
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "apply")
            && self.peek_at(1) == Some(&Tok::LParen)
        {
            self.bump();
            self.bump();
            let gate = self.template()?;
            self.expect(Tok::Comma)?;
            let state = self.template()?;
            self.expect(Tok::RParen)?;
            return Ok(Template::Apply(Box::new(gate), Box::new(state)));
        }
        // Self-call `|Name(args)>` of the definition being parsed.
        if self.peek() == Some(&Tok::Pipe) {
            if let (Some(Tok::Ident(name)), Some(Tok::LParen)) =
                (self.peek_at(1), self.peek_at(2))
            {
                if self.def_name.as_deref() == Some(name.as_str()) {
                    self.bump();
                    self.bump();
                    self.bump();
                    let mut args = vec![self.expr(true)?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.expr(true)?);
                    }
                    self.expect(Tok::RParen)?;
                    self.expect(Tok::Gt)?;
                    return Ok(Template::SelfCall(args));
                }
            }
        }
        if self.peek() == Some(&Tok::LParen) {
            self.bump();
            let t = self.template()?;
            self.expect(Tok::RParen)?;
            return Ok(t);
        }
        let atom = self.opatom()?;
        Ok(Template::Atom(atom))
    }
}

fn builtin_fn(name: &str) -> Option<BuiltinOp> {
    Some(match name {
        "cos" => BuiltinOp::Cos,
        "sin" => BuiltinOp::Sin,
        "exp" => BuiltinOp::Exp,
        "sqrt" => BuiltinOp::Sqrt,
        "conj" => BuiltinOp::Conj,
        "abs" => BuiltinOp::Abs,
        "toC" => BuiltinOp::ToComplex,
        _ => return None,
    })
}

fn needs_space(prev: &str, next: &Tok) -> bool {
    let last = prev.chars().last().unwrap_or(' ');
    let next = next.to_string();
    let first = next.chars().next().unwrap_or(' ');
    // Keep identifiers, numbers and keywords apart; let punctuation pack.
    (last.is_alphanumeric() || last == '_') && (first.is_alphanumeric() || first == '_')
        || matches!(next.as_str(), ":=" | "=>" | "when" | "->")
        || last == ','
        || last == '='
        || first == '='
        || last == '>' && first == '='
}
