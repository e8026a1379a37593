//! Exact scalar algebra: rational functions of the distinguished coordinates.

mod coords;
mod expr;
pub mod gcd;
mod parse;
pub mod poly;

use num_rational::BigRational;
use thiserror::Error;

pub use coords::CoordSystem;
pub use expr::{max_degree, rational_to_f64, set_max_degree, CompiledExpr, ScalarExpr};
pub use parse::parse_scalar;
pub use poly::{Monomial, Poly, Var, MAX_M, MAX_VARS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown coordinate '{name}' at position {pos}")]
    UnknownCoordinate { pos: usize, name: String },
    #[error("division by the zero rational function")]
    DivisionByZero,
    #[error("denominator vanishes at the evaluation point")]
    Pole,
    #[error("total degree {degree} exceeds the limit {limit}")]
    DegreeOverflow { degree: u32, limit: u32 },
    #[error("{0}")]
    Dimension(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked field arithmetic: fails on division by zero and on results past
/// the configured degree limit.
pub fn scalar_arith(a: &ScalarExpr, b: &ScalarExpr, op: ArithOp) -> Result<ScalarExpr, SymError> {
    let r = match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.checked_div(b)?,
    };
    r.guard()?;
    Ok(r)
}

/// Partial derivative with respect to the frame coordinate `coord` (1-based, `1..=2m`).
pub fn scalar_diff(f: &ScalarExpr, coord: usize, cs: &CoordSystem) -> Result<ScalarExpr, SymError> {
    if coord == 0 || coord > cs.dim() {
        return Err(SymError::Dimension(format!("coordinate index {coord} outside 1..={}", cs.dim())));
    }
    Ok(f.diff(cs.var(coord - 1)))
}

/// Exact value at a point given in frame order (`2m` rationals).
pub fn scalar_eval(f: &ScalarExpr, point: &[BigRational], cs: &CoordSystem) -> Result<BigRational, SymError> {
    f.eval(&full_point(point, cs)?)
}

/// Spreads a frame-ordered point over the fixed variable slots.
pub fn full_point(point: &[BigRational], cs: &CoordSystem) -> Result<[BigRational; MAX_VARS], SymError> {
    if point.len() != cs.dim() {
        return Err(SymError::Dimension(format!("point has {} coordinates, expected {}", point.len(), cs.dim())));
    }
    let mut full: [BigRational; MAX_VARS] = Default::default();
    for (c, v) in point.iter().enumerate() {
        full[cs.var(c).index()] = v.clone();
    }
    Ok(full)
}

/// `f64` analogue of [`full_point`].
pub fn full_point_f64(point: &[f64], cs: &CoordSystem) -> [f64; MAX_VARS] {
    assert_eq!(point.len(), cs.dim(), "point dimension");
    let mut full = [0.0; MAX_VARS];
    for (c, v) in point.iter().enumerate() {
        full[cs.var(c).index()] = *v;
    }
    full
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn spec_examples() {
        let cs = CoordSystem::new(2).unwrap();
        let p = |s: &str| parse_scalar(s, &cs).unwrap();
        assert!(p("0").is_zero());
        assert_eq!(scalar_arith(&p("x1"), &p("-x1"), ArithOp::Add).unwrap(), ScalarExpr::zero());
        assert_eq!(scalar_arith(&p("x1/x2"), &p("x2"), ArithOp::Mul).unwrap(), p("x1"));
        assert_eq!(scalar_arith(&p("x1^2 - 1"), &p("x1 - 1"), ArithOp::Div).unwrap(), p("x1 + 1"));
        assert!(scalar_arith(&p("x1"), &p("0"), ArithOp::Div).is_err());
        assert_eq!(scalar_diff(&p("x1*xt1"), 3, &cs).unwrap(), p("x1"));
        assert_eq!(scalar_diff(&p("x1/x2"), 2, &cs).unwrap(), p("-x1/x2^2"));
        assert!(scalar_diff(&p("7"), 1, &cs).unwrap().is_zero());
        assert_eq!(scalar_eval(&p("x1*xt1"), &[q(2), q(0), q(3), q(0)], &cs).unwrap(), q(6));
        assert_eq!(scalar_eval(&p("(x1+1)/(x2^2+1)"), &[q(1), q(1), q(0), q(0)], &cs).unwrap(), q(1));
        assert_eq!(scalar_eval(&p("1/x1"), &[q(0), q(1), q(0), q(0)], &cs), Err(SymError::Pole));
    }

    #[test]
    fn degree_guard() {
        let cs = CoordSystem::new(1).unwrap();
        let big = parse_scalar("x1^20", &cs).unwrap();
        assert!(scalar_arith(&big, &big, ArithOp::Mul).is_err());
        assert!(scalar_arith(&big, &big, ArithOp::Add).is_ok());
    }

    #[test]
    fn display_round_trips() {
        let cs = CoordSystem::new(2).unwrap();
        for s in ["(x1+1)/(x2^2+1)", "-x1*xt1 + 3/4", "x1/(x1*xt2 - 2)"] {
            let e = parse_scalar(s, &cs).unwrap();
            assert_eq!(parse_scalar(&e.to_string(), &cs).unwrap(), e, "{s}");
        }
    }
}
