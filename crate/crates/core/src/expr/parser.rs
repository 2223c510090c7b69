//! Recursive-descent parser for rate expressions and guards.
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor ("*" factor)*
//! factor := "-" factor | "(" expr ")" | NUMBER | IDENT
//! guard  := gterm ("|" gterm)*
//! gterm  := atom ("&" atom)*
//! atom   := "(" guard ")" | expr CMP expr
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::ast::{CmpOp, Expr, GuardExpr};
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at byte {offset}")]
    UnknownCharacter { offset: usize, ch: char },
    #[error("malformed number {text:?} at byte {offset}")]
    BadNumber { offset: usize, text: String },
    #[error("syntax error at byte {offset}: found {found}, expected one of {}", expected.join(", "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<String>,
    },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::UnknownCharacter { offset, .. }
            | ParseError::BadNumber { offset, .. }
            | ParseError::Syntax { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Cmp(CmpOp),
    And,
    Or,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(_) => write!(f, "number"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Cmp(op) => write!(f, "`{}`", op.symbol()),
            Tok::And => write!(f, "`&`"),
            Tok::Or => write!(f, "`|`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'&' => out.push((start, Tok::And)),
            b'|' => out.push((start, Tok::Or)),
            b'=' => out.push((start, Tok::Cmp(CmpOp::Eq))),
            b'<' | b'>' => {
                let le = bytes.get(i + 1) == Some(&b'=');
                let op = match (c, le) {
                    (b'<', false) => CmpOp::Lt,
                    (b'<', true) => CmpOp::Le,
                    (_, false) => CmpOp::Gt,
                    (_, true) => CmpOp::Ge,
                };
                if le {
                    i += 1;
                }
                out.push((start, Tok::Cmp(op)));
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    i += 1;
                    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                        i += 1;
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let lit = &text[start..i];
                let value = parse_decimal(lit).ok_or_else(|| ParseError::BadNumber {
                    offset: start,
                    text: lit.to_string(),
                })?;
                out.push((start, Tok::Num(value)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('\u{fffd}');
                return Err(ParseError::UnknownCharacter { offset: start, ch });
            }
        }
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

/// Parses a decimal literal (`12`, `0.05`, `.5`, `1e-3`) into an exact rational.
pub fn parse_decimal(lit: &str) -> Option<Rational> {
    let (mantissa, exponent) = match lit.find(['e', 'E']) {
        Some(p) => (&lit[..p], lit[p + 1..].parse::<i32>().ok()?),
        None => (lit, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * ten.pow(scale as u32))
    } else {
        Rational::new(numer, ten.pow((-scale) as u32))
    };
    Some(value)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

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
        ParseError::Syntax {
            offset: self.offset(),
            found: self.peek().to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect_end(&self, expected: &[&str]) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["`)`", "`+`", "`-`", "`*`"]));
                }
                self.bump();
                Ok(e)
            }
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Expr::Var(name))
            }
            _ => Err(self.error(&["number", "identifier", "`(`", "`-`"])),
        }
    }

    fn guard(&mut self) -> Result<GuardExpr, ParseError> {
        let mut lhs = self.gterm()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = GuardExpr::Or(Box::new(lhs), Box::new(self.gterm()?));
        }
        Ok(lhs)
    }

    fn gterm(&mut self) -> Result<GuardExpr, ParseError> {
        let mut lhs = self.atom()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = GuardExpr::And(Box::new(lhs), Box::new(self.atom()?));
        }
        Ok(lhs)
    }

    /// `(` is ambiguous between a parenthesised guard and a parenthesised
    /// arithmetic operand; try the guard first and backtrack.
    fn atom(&mut self) -> Result<GuardExpr, ParseError> {
        if *self.peek() == Tok::LParen {
            let save = self.pos;
            self.bump();
            if let Ok(g) = self.guard() {
                if *self.peek() == Tok::RParen {
                    self.bump();
                    return Ok(g);
                }
            }
            self.pos = save;
        }
        let lhs = self.expr()?;
        let op = match self.peek() {
            Tok::Cmp(op) => *op,
            _ => return Err(self.error(&["`<`", "`<=`", "`=`", "`>=`", "`>`"])),
        };
        self.bump();
        let rhs = self.expr()?;
        Ok(GuardExpr::Cmp(op, lhs, rhs))
    }
}

pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.expect_end(&["`+`", "`-`", "`*`", "end of input"])?;
    Ok(e)
}

pub fn parse_guard(text: &str) -> Result<GuardExpr, ParseError> {
    let mut p = Parser::new(text)?;
    let g = p.guard()?;
    p.expect_end(&["`&`", "`|`", "end of input"])?;
    Ok(g)
}

/// Guard that always holds, used for commands without a guard.
pub fn guard_true() -> GuardExpr {
    GuardExpr::Cmp(
        CmpOp::Eq,
        Expr::Num(Rational::zero()),
        Expr::Num(Rational::zero()),
    )
}
