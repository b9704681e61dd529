//! Tiny expression grammar for user-supplied nonlinear functions.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | atom
//! atom  := NUMBER | 'na' | 'nb' | 'powneg1' '(' expr ')' | '(' expr ')'
//! ```
//!
//! `powneg1(x)` is `(-1)^x` and requires an integral argument. Division by
//! zero is a domain error at evaluation time.

use crate::error::{Result, TmnlcsError};

use super::NonlinearFunction;

#[derive(Debug, Clone)]
enum Expr {
    Num(f64),
    Na,
    Nb,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    PowNeg1(Box<Expr>),
}

impl Expr {
    fn eval(&self, na: f64, nb: f64) -> Option<f64> {
        Some(match self {
            Expr::Num(v) => *v,
            Expr::Na => na,
            Expr::Nb => nb,
            Expr::Neg(e) => -e.eval(na, nb)?,
            Expr::Add(a, b) => a.eval(na, nb)? + b.eval(na, nb)?,
            Expr::Sub(a, b) => a.eval(na, nb)? - b.eval(na, nb)?,
            Expr::Mul(a, b) => a.eval(na, nb)? * b.eval(na, nb)?,
            Expr::Div(a, b) => {
                let d = b.eval(na, nb)?;
                if d == 0.0 {
                    return None;
                }
                a.eval(na, nb)? / d
            }
            Expr::PowNeg1(e) => {
                let x = e.eval(na, nb)?;
                if x.fract() != 0.0 {
                    return None;
                }
                if x.rem_euclid(2.0) == 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v = text
                    .parse()
                    .map_err(|_| TmnlcsError::Parse(format!("bad number `{text}`")))?;
                out.push(Token::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => {
                return Err(TmnlcsError::Parse(format!(
                    "unexpected character `{other}` at {i}"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token) -> Result<()> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            got => Err(TmnlcsError::Parse(format!(
                "expected {want:?}, got {got:?}"
            ))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::Ident(name)) => match name.as_str() {
                "na" => Ok(Expr::Na),
                "nb" => Ok(Expr::Nb),
                "powneg1" => {
                    self.expect(Token::LParen)?;
                    let inner = self.expr()?;
                    self.expect(Token::RParen)?;
                    Ok(Expr::PowNeg1(Box::new(inner)))
                }
                _ => Err(TmnlcsError::UnknownName(name)),
            },
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            got => Err(TmnlcsError::Parse(format!("unexpected token {got:?}"))),
        }
    }
}

/// Parses an expression over `na`, `nb` into a nonlinear function.
pub fn parse_expression(src: &str) -> Result<NonlinearFunction> {
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err(TmnlcsError::Parse("empty expression".into()));
    }
    let mut parser = Parser { tokens, pos: 0 };
    let ast = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(TmnlcsError::Parse(format!(
            "trailing input after token {}",
            parser.pos
        )));
    }
    Ok(NonlinearFunction::real(
        format!("expr({})", src.trim()),
        move |na, nb| ast.eval(na as f64, nb as f64),
    ))
}
