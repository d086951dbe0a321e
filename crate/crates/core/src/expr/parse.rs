//! Recursive-descent parser.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := ('-' | '+') unary | power
//! power    := primary ('^' exponent)?
//! exponent := ('-' | '+')* (INTEGER | '(' exponent ')') ('^' exponent)?
//! primary  := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and takes integer exponents only. The
//! variable name is reserved; `pi` and `I` (imaginary unit) are constants.
//! Every other identifier is a parameter.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use super::{AnalyticExpr, Func, Node};

#[derive(Clone, Debug, Error, PartialEq)]
#[error("parse error at offset {offset}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    /// Character offset into the input.
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, bool),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x, _) => format!("number {x}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' | '\u{00d7}' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ if c.is_ascii_digit() || c == '.' => {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // optional exponent, only if followed by digits
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit: String = chars[start..i].iter().collect();
                let value: f64 = lit.parse().map_err(|_| ParseError {
                    offset: start,
                    expected: vec!["number".into()],
                    found: format!("`{lit}`"),
                })?;
                let integral = lit.chars().all(|ch| ch.is_ascii_digit());
                out.push((start, Tok::Num(value, integral)));
                continue;
            }
            _ if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            _ => {
                return Err(ParseError {
                    offset: start,
                    expected: vec!["expression".into()],
                    found: format!("character `{c}`"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    var: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[what]))
        }
    }

    fn expr(&mut self) -> Result<Arc<Node>, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Arc::new(Node::Add(lhs, self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Arc::new(Node::Sub(lhs, self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Arc<Node>, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Arc::new(Node::Mul(lhs, self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Arc::new(Node::Div(lhs, self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Arc<Node>, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Arc::new(Node::Neg(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Arc<Node>, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let n = self.exponent()?;
            Ok(Arc::new(Node::Pow(base, n)))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let mut sign = 1i64;
        loop {
            match self.peek() {
                Tok::Minus => {
                    sign = -sign;
                    self.bump();
                }
                Tok::Plus => {
                    self.bump();
                }
                _ => break,
            }
        }
        let start = self.offset();
        let base: i64 = match self.peek().clone() {
            Tok::Num(v, true) if v <= i32::MAX as f64 => {
                self.bump();
                v as i64
            }
            Tok::LParen => {
                self.bump();
                let inner = self.exponent()?;
                self.expect(Tok::RParen, "`)`")?;
                inner as i64
            }
            _ => return Err(self.error(&["integer exponent"])),
        };
        let value = if *self.peek() == Tok::Caret {
            self.bump();
            let rhs = self.exponent()?;
            if rhs < 0 {
                return Err(ParseError {
                    offset: start,
                    expected: vec!["non-negative integer exponent in a power chain".into()],
                    found: format!("exponent {rhs}"),
                });
            }
            checked_ipow(base, rhs as u32)
        } else {
            Some(base)
        };
        value
            .map(|v| sign * v)
            .filter(|v| i32::try_from(*v).is_ok())
            .map(|v| v as i32)
            .ok_or(ParseError {
                offset: start,
                expected: vec!["exponent that fits in 32 bits".into()],
                found: "overflowing exponent".into(),
            })
    }

    fn primary(&mut self) -> Result<Arc<Node>, ParseError> {
        match self.peek().clone() {
            Tok::Num(v, _) => {
                self.bump();
                Ok(Arc::new(Node::Const(Complex64::new(v, 0.0))))
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(func) = Func::from_name(&name) {
                    self.expect(Tok::LParen, "`(`")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Arc::new(Node::Call(func, arg)));
                }
                if *self.peek() == Tok::LParen {
                    self.pos -= 1;
                    return Err(self.error(&["exp", "sin", "cos", "sqrt", "log"]));
                }
                Ok(Arc::new(if name == self.var {
                    Node::Var
                } else if name == "pi" {
                    Node::Const(Complex64::new(std::f64::consts::PI, 0.0))
                } else if name == "I" {
                    Node::Const(Complex64::new(0.0, 1.0))
                } else {
                    Node::Param(name)
                }))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error(&["number", "identifier", "`(`"])),
        }
    }
}

fn checked_ipow(base: i64, exp: u32) -> Option<i64> {
    base.checked_pow(exp)
}

/// Parses an expression in the variable `s`.
pub fn parse_expr(text: &str) -> Result<AnalyticExpr, ParseError> {
    parse_expr_in(text, "s")
}

/// Parses an expression in the given variable name.
pub fn parse_expr_in(text: &str, var: &str) -> Result<AnalyticExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, var };
    let root = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(AnalyticExpr::from_node(root, var))
}
