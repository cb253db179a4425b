//! Recursive-descent parser for field expressions.
//!
//! ```text
//! expr   ::= term (("+"|"-") term)*
//! term   ::= factor (("*"|"/") factor)*
//! factor ::= rational | ident | ident "^" integer | "(" expr ")" | "-" factor
//! ```
//! Identifiers `zeta_<k>` always denote the primitive k-th root of unity.

use super::cyclo::Cyc;
use super::field::FieldElem;
use super::{ConstDecl, ConstKind, FieldError};
use num_bigint::BigInt;
use num_rational::BigRational;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    decls: &'a [ConstDecl],
}

pub fn parse_expr(text: &str, decls: &[ConstDecl]) -> Result<FieldElem, FieldError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, decls };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> FieldError {
        FieldError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<FieldElem, FieldError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<FieldElem, FieldError> {
        let mut acc = self.factor()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                b'/' => {
                    self.pos += 1;
                    let d = self.factor()?;
                    acc = acc.checked_div(&d).ok_or(FieldError::DivisionByZero)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn integer(&mut self) -> Result<BigInt, FieldError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && self.src[self.pos] == b'-' {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            return Err(self.err("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn factor(&mut self) -> Result<FieldElem, FieldError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(FieldElem::from_rat(BigRational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                let base = self.ident(&name)?;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let e = self.integer()?;
                    let e: i64 = e.try_into().map_err(|_| self.err("exponent too large"))?;
                    return base.pow(e).ok_or(FieldError::DivisionByZero);
                }
                Ok(base)
            }
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn ident(&self, name: &str) -> Result<FieldElem, FieldError> {
        if let Some(d) = self.decls.iter().find(|d| d.name == name) {
            return Ok(match d.kind {
                ConstKind::Transcendental => FieldElem::var(name),
                ConstKind::RootOfUnity(n) => FieldElem::from_cyc(Cyc::zeta(n)),
            });
        }
        if let Some(k) = name.strip_prefix("zeta_").and_then(|s| s.parse::<u32>().ok()) {
            if k >= 1 {
                return Ok(FieldElem::from_cyc(Cyc::zeta(k)));
            }
        }
        Err(FieldError::Undeclared(name.to_string()))
    }
}
