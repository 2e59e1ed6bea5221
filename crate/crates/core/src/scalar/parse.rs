//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' ['-'] integer)?
//! atom  := integer | 'i' | variable | '(' expr ')'
//! ```

use std::str::FromStr;

use malachite_q::Rational;

use super::gauss::GaussianRational;
use super::rational::RationalExpr;
use super::vars::var_index;
use crate::error::{Error, Result};

pub fn parse_expr(src: &str) -> Result<RationalExpr> {
    let chars: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser { chars, pos: 0 };
    if p.chars.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let e = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(Error::Parse(format!(
            "unexpected '{}' at offset {} in {src:?}",
            p.chars[p.pos], p.pos
        )));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RationalExpr> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                '-' => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalExpr> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                '/' => {
                    self.pos += 1;
                    let d = self.unary()?;
                    acc = acc.div(&d)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RationalExpr> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalExpr> {
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let mut negative = false;
        if self.peek() == Some('-') {
            negative = true;
            self.pos += 1;
        } else if self.peek() == Some('(') {
            // allow q1^(-2)
            self.pos += 1;
            if self.peek() == Some('-') {
                negative = true;
                self.pos += 1;
            }
            let k = self.integer()?;
            if self.peek() != Some(')') {
                return Err(Error::Parse("expected ')' after exponent".into()));
            }
            self.pos += 1;
            return base.pow(exponent(k, negative)?);
        }
        let k = self.integer()?;
        base.pow(exponent(k, negative)?)
    }

    fn integer(&mut self) -> Result<String> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(format!("expected integer at offset {start}")));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn atom(&mut self) -> Result<RationalExpr> {
        match self.peek() {
            None => Err(Error::Parse("unexpected end of expression".into())),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::Parse(format!("expected ')' at offset {}", self.pos)));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let k = self.integer()?;
                let v = Rational::from_str(&k).map_err(|_| Error::Parse(format!("bad integer {k}")))?;
                Ok(RationalExpr::constant(GaussianRational::real(v)))
            }
            Some(c) if c.is_alphabetic() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_alphanumeric()) {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                if name == "i" {
                    return Ok(RationalExpr::i());
                }
                match var_index(&name) {
                    Some(v) => Ok(RationalExpr::var(v)),
                    None => Err(Error::Parse(format!("unknown symbol '{name}'"))),
                }
            }
            Some(c) => Err(Error::Parse(format!("unexpected '{c}' at offset {}", self.pos))),
        }
    }
}

fn exponent(k: String, negative: bool) -> Result<i32> {
    let k: i32 = k
        .parse()
        .map_err(|_| Error::Parse("exponent too large".into()))?;
    Ok(if negative { -k } else { k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::vars::{q, LAMBDA_VAR};

    #[test]
    fn grammar() {
        let a = parse_expr("(q1^2 - 1)/(q1 - 1)").unwrap();
        assert_eq!(a, parse_expr("q1 + 1").unwrap());
        let b = parse_expr(" 3/4 * i * q2^-2 ").unwrap();
        let c = RationalExpr::from_frac(3, 4)
            .mul(&RationalExpr::i())
            .div(&RationalExpr::var(q(1)).pow(2).unwrap())
            .unwrap();
        assert_eq!(b, c);
        assert_eq!(parse_expr("lambda").unwrap(), RationalExpr::var(LAMBDA_VAR));
        assert_eq!(parse_expr("-q1^2").unwrap(), RationalExpr::var(q(0)).pow(2).unwrap().neg());
        assert!(parse_expr("q7").is_err());
        assert!(parse_expr("1/0").is_err());
        assert!(parse_expr("(q1").is_err());
    }

    #[test]
    fn display_reparses() {
        for src in ["q1/(q2 + 1)", "(1 + 2*i)*q1^3 - q2/7", "-q1*p1 + λ^2/(q2^2 + q1)"] {
            let e = parse_expr(src).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{src}");
        }
    }
}
