//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar: integer literals, declared variable names, `+ - * ^` and
//! parentheses. Exponents must be integer literals. In the power-series
//! backend the name `t` denotes the uniformizer inside coefficients.

use num_bigint::BigInt;
use thiserror::Error;

use crate::mvpoly::MultiPoly;
use crate::scalar::Scalar;
use crate::valued::{Backend, RingContext};

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Lexed {
    tok: Tok,
    column: usize,
}

fn lex(text: &str, line: usize, first_column: usize) -> Result<Vec<Lexed>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = first_column + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push(Lexed { tok: Tok::Num(digits.parse().expect("digits")), column });
                continue;
            }
            a if a.is_alphabetic() || a == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Lexed { tok: Tok::Ident(chars[start..i].iter().collect()), column });
                continue;
            }
            other => return Err(ParseError::new(line, column, format!("unexpected character '{other}'"))),
        };
        out.push(Lexed { tok, column });
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Lexed>,
    pos: usize,
    line: usize,
    end_column: usize,
    ctx: RingContext,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_column, |l| l.column)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.column(), message)
    }

    fn constant(&self, c: Scalar) -> MultiPoly {
        MultiPoly::constant(self.ctx, self.vars, c)
    }

    fn expr(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly, ParseError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let exp = match self.peek() {
            Some(Tok::Num(n)) => u32::try_from(n).ok().filter(|&e| e <= MAX_EXPONENT),
            _ => None,
        };
        match exp {
            Some(e) => {
                self.pos += 1;
                Ok(base.pow(e))
            }
            None => Err(self.error(format!("malformed exponent (expected an integer literal at most {MAX_EXPONENT})"))),
        }
    }

    fn atom(&mut self) -> Result<MultiPoly, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("unexpected end of expression"));
        };
        match tok {
            Tok::Num(n) => {
                self.pos += 1;
                Ok(self.constant(self.ctx.scalar_from_bigint(&n)))
            }
            Tok::Ident(name) => {
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    self.pos += 1;
                    Ok(MultiPoly::var(self.ctx, self.vars, i))
                } else if name == "t" && self.ctx.backend() == Backend::Series {
                    self.pos += 1;
                    Ok(self.constant(self.ctx.uniformizer()))
                } else {
                    Err(self.error(format!("undefined variable '{name}'")))
                }
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.error("expected a number, variable or '('")),
        }
    }
}

/// Parses `text` as a polynomial in `vars`. `line` and `first_column`
/// locate the text in its source for diagnostics.
pub fn parse_poly(text: &str, ctx: RingContext, vars: &[String], line: usize, first_column: usize) -> Result<MultiPoly, ParseError> {
    let toks = lex(text, line, first_column)?;
    let end_column = first_column + text.chars().count();
    let mut parser = Parser { toks, pos: 0, line, end_column, ctx, vars };
    let poly = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(poly)
}

/// Parses a constant expression (an integer, or a polynomial in `t` for
/// the series backend).
pub fn parse_scalar(text: &str, ctx: RingContext, line: usize, first_column: usize) -> Result<Scalar, ParseError> {
    Ok(parse_poly(text, ctx, &[], line, first_column)?.constant_term())
}

/// Parses a comma-separated list of constants.
pub fn parse_scalar_list(text: &str, ctx: RingContext, line: usize, first_column: usize) -> Result<Vec<Scalar>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in text.split(',') {
        if part.trim().is_empty() {
            return Err(ParseError::new(line, first_column + offset, "empty vector component"));
        }
        out.push(parse_scalar(part, ctx, line, first_column + offset)?);
        offset += part.chars().count() + 1;
    }
    Ok(out)
}
