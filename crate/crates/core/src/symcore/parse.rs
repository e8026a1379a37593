//! Recursive-descent parser for scalar expressions.
//!
//! ```text
//! expr   = term { ("+" | "-") term } ;
//! term   = unary { ("*" | "/") unary } ;
//! unary  = ("+" | "-") unary | power ;
//! power  = atom [ "^" ["-"] integer ] ;
//! atom   = number | coord | "(" expr ")" ;
//! number = digits [ "." digits ] ;
//! coord  = "x" index | "xt" index ;      (* 1 <= index <= m *)
//! ```
//!
//! Rationals are written as quotients (`3/4`); `-x1^2` parses as `-(x1^2)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::coords::CoordSystem;
use super::expr::ScalarExpr;
use super::SymError;

/// Parses `text` into a canonical [`ScalarExpr`] over `cs`.
pub fn parse_scalar(text: &str, cs: &CoordSystem) -> Result<ScalarExpr, SymError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, cs };
    p.skip_ws();
    if p.pos >= p.src.len() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(&format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    cs: &'a CoordSystem,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> SymError {
        SymError::Parse { pos: self.pos, msg: msg.to_string() }
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

    fn expr(&mut self) -> Result<ScalarExpr, SymError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<ScalarExpr, SymError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == b'*' {
                &acc * &rhs
            } else {
                acc.checked_div(&rhs).map_err(|_| SymError::Parse {
                    pos: at,
                    msg: "division by the zero polynomial".into(),
                })?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<ScalarExpr, SymError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ScalarExpr, SymError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer exponent"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let e: i32 = text.parse().map_err(|_| SymError::Parse { pos: start, msg: "exponent too large".into() })?;
        let e = if negative { -e } else { e };
        base.powi(e).map_err(|_| SymError::Parse { pos: start, msg: "division by the zero polynomial".into() })
    }

    fn atom(&mut self) -> Result<ScalarExpr, SymError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match self.cs.lookup(name) {
                    Some(v) => Ok(ScalarExpr::var(v)),
                    None => Err(SymError::UnknownCoordinate { pos: start, name: name.to_string() }),
                }
            }
            Some(c) => Err(self.error(&format!("unexpected '{}'", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<ScalarExpr, SymError> {
        let start = self.pos;
        let mut int_digits = String::new();
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            int_digits.push(self.src[self.pos] as char);
            self.pos += 1;
        }
        let mut frac_digits = String::new();
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                frac_digits.push(self.src[self.pos] as char);
                self.pos += 1;
            }
        }
        if int_digits.is_empty() && frac_digits.is_empty() {
            return Err(SymError::Parse { pos: start, msg: "malformed number".into() });
        }
        let digits = format!("{int_digits}{frac_digits}");
        let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().expect("digits") };
        let mut denom = BigInt::one();
        for _ in 0..frac_digits.len() {
            denom *= 10;
        }
        Ok(ScalarExpr::from_rational(BigRational::new(numer, denom)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::poly::Var;

    fn cs2() -> CoordSystem {
        CoordSystem::new(2).unwrap()
    }

    #[test]
    fn precedence_and_literals() {
        let cs = cs2();
        let e = parse_scalar("1 + 2*x1^2 - 0.5", &cs).unwrap();
        let x1 = ScalarExpr::var(Var::base(0));
        assert_eq!(e, &(&(&x1 * &x1) * &ScalarExpr::from_int(2)) + &ScalarExpr::ratio(1, 2));
        assert_eq!(parse_scalar("-x1^2", &cs).unwrap(), -(&x1 * &x1));
        assert_eq!(parse_scalar("x1^-1", &cs).unwrap(), x1.recip().unwrap());
        assert_eq!(parse_scalar("3/4", &cs).unwrap(), ScalarExpr::ratio(3, 4));
    }

    #[test]
    fn errors_report_position() {
        let cs = cs2();
        assert!(matches!(parse_scalar("x1 + x3", &cs), Err(SymError::UnknownCoordinate { pos: 5, .. })));
        assert!(matches!(parse_scalar("(x1", &cs), Err(SymError::Parse { pos: 3, .. })));
        assert!(matches!(parse_scalar("x1 / (x2 - x2)", &cs), Err(SymError::Parse { pos: 3, .. })));
        assert!(matches!(parse_scalar("x1 $", &cs), Err(SymError::Parse { pos: 3, .. })));
        assert!(parse_scalar("", &cs).is_err());
    }
}
