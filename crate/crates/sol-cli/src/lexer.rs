//! Tokenizer for `.sol` scripts.

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Float(f64),
    /// Imaginary literal `1.5i`.
    Imag(f64),
    // Punctuation and operators.
    Semi,
    Colon,
    Comma,
    Dot,
    DotDot,
    Pipe,
    Turnstile, // |-
    LParen,
    RParen,
    LBracket,
    RBracket,
    Underscore,
    Plus,
    Minus,
    Star,
    Slash,
    Tensor, // ><
    Caret,  // ^ (xor)
    Adjoint, // ^+
    Lt,
    Gt,
    Le,
    Ge,
    Eq,        // =
    EqEq,      // ==
    Ne,        // !=
    Bang,      // !
    Amp,       // &
    AmpAmp,    // &&
    PipePipe,  // ||
    Arrow,     // ->
    FatArrow,  // =>
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Float(x) => write!(f, "{x:?}"),
            Tok::Imag(x) => write!(f, "{x:?}i"),
            Tok::Semi => write!(f, ";"),
            Tok::Colon => write!(f, ":"),
            Tok::Comma => write!(f, ","),
            Tok::Dot => write!(f, "."),
            Tok::DotDot => write!(f, ".."),
            Tok::Pipe => write!(f, "|"),
            Tok::Turnstile => write!(f, "|-"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::Underscore => write!(f, "_"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::Tensor => write!(f, "><"),
            Tok::Caret => write!(f, "^"),
            Tok::Adjoint => write!(f, "^+"),
            Tok::Lt => write!(f, "<"),
            Tok::Gt => write!(f, ">"),
            Tok::Le => write!(f, "<="),
            Tok::Ge => write!(f, ">="),
            Tok::Eq => write!(f, "="),
            Tok::EqEq => write!(f, "=="),
            Tok::Ne => write!(f, "!="),
            Tok::Bang => write!(f, "!"),
            Tok::Amp => write!(f, "&"),
            Tok::AmpAmp => write!(f, "&&"),
            Tok::PipePipe => write!(f, "||"),
            Tok::Arrow => write!(f, "->"),
            Tok::FatArrow => write!(f, "=>"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, thiserror::Error)]
#[error("lexical error at {line}:{col}: {message}")]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    let mut line = 1usize;
    let mut col = 1usize;
    let err = |line: usize, col: usize, message: String| LexError { line, col, message };

    macro_rules! push {
        ($tok:expr, $len:expr) => {{
            out.push(Token { tok: $tok, line, col });
            i += $len;
            col += $len;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let peek = |k: usize| chars.get(i + k).copied().unwrap_or('\0');
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '/' if peek(1) == '/' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            ';' => push!(Tok::Semi, 1),
            ':' => push!(Tok::Colon, 1),
            ',' => push!(Tok::Comma, 1),
            '(' => push!(Tok::LParen, 1),
            ')' => push!(Tok::RParen, 1),
            '[' => push!(Tok::LBracket, 1),
            ']' => push!(Tok::RBracket, 1),
            '+' => push!(Tok::Plus, 1),
            '*' => push!(Tok::Star, 1),
            '/' => push!(Tok::Slash, 1),
            '_' => push!(Tok::Underscore, 1),
            '.' if peek(1) == '.' => push!(Tok::DotDot, 2),
            '.' => push!(Tok::Dot, 1),
            '-' if peek(1) == '>' => push!(Tok::Arrow, 2),
            '-' => push!(Tok::Minus, 1),
            '>' if peek(1) == '<' => push!(Tok::Tensor, 2),
            '>' if peek(1) == '=' => push!(Tok::Ge, 2),
            '>' => push!(Tok::Gt, 1),
            '<' if peek(1) == '=' => push!(Tok::Le, 2),
            '<' => push!(Tok::Lt, 1),
            '=' if peek(1) == '=' => push!(Tok::EqEq, 2),
            '=' if peek(1) == '>' => push!(Tok::FatArrow, 2),
            '=' => push!(Tok::Eq, 1),
            '!' if peek(1) == '=' => push!(Tok::Ne, 2),
            '!' => push!(Tok::Bang, 1),
            '&' if peek(1) == '&' => push!(Tok::AmpAmp, 2),
            '&' => push!(Tok::Amp, 1),
            '|' if peek(1) == '-' && !peek(2).is_ascii_digit() => push!(Tok::Turnstile, 2),
            '|' if peek(1) == '|' => push!(Tok::PipePipe, 2),
            '|' => push!(Tok::Pipe, 1),
            '^' if peek(1) == '+' => push!(Tok::Adjoint, 2),
            '^' => push!(Tok::Caret, 1),
            d if d.is_ascii_digit() => {
                let start = i;
                let start_col = col;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let mut is_float = false;
                if i < chars.len()
                    && chars[i] == '.'
                    && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())
                {
                    is_float = true;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if chars.get(j) == Some(&'+') || chars.get(j) == Some(&'-') {
                        j += 1;
                    }
                    if chars.get(j).is_some_and(|c| c.is_ascii_digit()) {
                        is_float = true;
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let imag = i < chars.len() && chars[i] == 'i';
                let tok = if imag {
                    i += 1;
                    let v = text
                        .parse::<f64>()
                        .map_err(|e| err(line, start_col, e.to_string()))?;
                    Tok::Imag(v)
                } else if is_float {
                    let v = text
                        .parse::<f64>()
                        .map_err(|e| err(line, start_col, e.to_string()))?;
                    Tok::Float(v)
                } else {
                    let v = text
                        .parse::<i64>()
                        .map_err(|e| err(line, start_col, e.to_string()))?;
                    Tok::Int(v)
                };
                let width = i - start;
                out.push(Token { tok, line, col: start_col });
                col += width;
            }
            a if a.is_alphabetic() => {
                let start = i;
                let start_col = col;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let width = i - start;
                out.push(Token { tok: Tok::Ident(text), line, col: start_col });
                col += width;
            }
            other => {
                return Err(err(line, col, format!("unexpected character {other:?}")));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn dirac_shapes() {
        assert_eq!(
            toks("|0>_q"),
            vec![
                Tok::Pipe,
                Tok::Int(0),
                Tok::Gt,
                Tok::Underscore,
                Tok::Ident("q".into())
            ]
        );
        assert_eq!(
            toks("A >< <0|_r"),
            vec![
                Tok::Ident("A".into()),
                Tok::Tensor,
                Tok::Lt,
                Tok::Int(0),
                Tok::Pipe,
                Tok::Underscore,
                Tok::Ident("r".into())
            ]
        );
        assert_eq!(toks("A^+"), vec![Tok::Ident("A".into()), Tok::Adjoint]);
    }

    #[test]
    fn numbers_and_ranges() {
        assert_eq!(toks("0..10"), vec![Tok::Int(0), Tok::DotDot, Tok::Int(10)]);
        assert_eq!(toks("0.5"), vec![Tok::Float(0.5)]);
        assert_eq!(toks("2i"), vec![Tok::Imag(2.0)]);
        assert_eq!(toks("1e-9"), vec![Tok::Float(1e-9)]);
        assert_eq!(toks("0.5 . X"), vec![Tok::Float(0.5), Tok::Dot, Tok::Ident("X".into())]);
    }

    #[test]
    fn turnstile_and_arrows() {
        assert_eq!(toks("|-"), vec![Tok::Turnstile]);
        assert_eq!(toks("a -> b"), vec![Tok::Ident("a".into()), Tok::Arrow, Tok::Ident("b".into())]);
        assert_eq!(toks("=>"), vec![Tok::FatArrow]);
        // A pipe directly before a digit stays a pipe (ket of a negative
        // label needs parentheses anyway).
        assert_eq!(toks("|-1"), vec![Tok::Pipe, Tok::Minus, Tok::Int(1)]);
    }

    #[test]
    fn comments_and_lines() {
        let ts = tokenize("a // comment\nb").unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts[1].line, 2);
    }
}
