//! Script front end for the symbolic operator logic kernel: tokenizer,
//! parser, and directive runner.

pub mod lexer;
pub mod parser;
pub mod runner;
pub mod script;
