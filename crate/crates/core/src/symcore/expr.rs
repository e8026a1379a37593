//! Canonical rational functions.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::atomic::{AtomicU32, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::gcd::gcd;
use super::poly::{Poly, Var, MAX_VARS};
use super::SymError;

static MAX_DEGREE: AtomicU32 = AtomicU32::new(32);

/// Sets the total-degree limit enforced by [`ScalarExpr::guard`] and the
/// checked arithmetic entry points.
pub fn set_max_degree(limit: u32) {
    MAX_DEGREE.store(limit, Ordering::Relaxed);
}

pub fn max_degree() -> u32 {
    MAX_DEGREE.load(Ordering::Relaxed)
}

/// An exact rational function `num / den` of the distinguished coordinates.
///
/// Canonical form: `gcd(num, den) = 1`, `den` monic in lex order (so its
/// leading coefficient is `1`), and zero is `0 / 1`. Structural equality is
/// therefore value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalarExpr {
    num: Poly,
    den: Poly,
}

impl Default for ScalarExpr {
    fn default() -> Self {
        ScalarExpr::zero()
    }
}

impl ScalarExpr {
    pub fn zero() -> ScalarExpr {
        ScalarExpr { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> ScalarExpr {
        ScalarExpr::from_int(1)
    }

    pub fn from_int(c: i64) -> ScalarExpr {
        ScalarExpr { num: Poly::from_int(c), den: Poly::one() }
    }

    pub fn from_rational(c: BigRational) -> ScalarExpr {
        ScalarExpr { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn ratio(n: i64, d: i64) -> ScalarExpr {
        ScalarExpr::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn var(v: Var) -> ScalarExpr {
        ScalarExpr { num: Poly::var(v), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> ScalarExpr {
        ScalarExpr { num: p, den: Poly::one() }
    }

    /// Canonicalizes `num / den`.
    pub fn from_parts(num: Poly, den: Poly) -> Result<ScalarExpr, SymError> {
        if den.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(ScalarExpr::zero());
        }
        let g = gcd(&num, &den);
        let (n, d) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        Ok(Self::normalized(n, d))
    }

    /// Makes an already reduced pair canonical by scaling `den` to be monic.
    fn normalized(num: Poly, den: Poly) -> ScalarExpr {
        if num.is_zero() {
            return ScalarExpr::zero();
        }
        let lc = den.lead_coeff();
        if lc.is_one() {
            ScalarExpr { num, den }
        } else {
            let inv = lc.recip();
            ScalarExpr { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// Largest total degree of numerator and denominator.
    pub fn degree(&self) -> u32 {
        self.num.total_degree().max(self.den.total_degree())
    }

    /// Fails with [`SymError::DegreeOverflow`] past the configured limit.
    pub fn guard(&self) -> Result<(), SymError> {
        let limit = max_degree();
        let degree = self.degree();
        if degree > limit {
            Err(SymError::DegreeOverflow { degree, limit })
        } else {
            Ok(())
        }
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    /// True when no tilde coordinate occurs.
    pub fn is_foliated(&self) -> bool {
        let mask = self.num.var_mask() | self.den.var_mask();
        mask >> super::poly::MAX_M == 0
    }

    pub fn recip(&self) -> Result<ScalarExpr, SymError> {
        if self.num.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &ScalarExpr) -> Result<ScalarExpr, SymError> {
        Ok(self * &rhs.recip()?)
    }

    pub fn scale(&self, c: &BigRational) -> ScalarExpr {
        if c.is_zero() {
            return ScalarExpr::zero();
        }
        ScalarExpr { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn half(&self) -> ScalarExpr {
        self.scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    pub fn powi(&self, e: i32) -> Result<ScalarExpr, SymError> {
        if e >= 0 {
            let e = e as u32;
            Ok(ScalarExpr { num: self.num.pow(e), den: self.den.pow(e) })
        } else {
            self.recip()?.powi(-e)
        }
    }

    /// Exact partial derivative by the quotient rule.
    pub fn diff(&self, v: Var) -> ScalarExpr {
        if self.num.is_zero() {
            return ScalarExpr::zero();
        }
        if self.den.is_one() {
            return ScalarExpr { num: self.num.derivative(v), den: Poly::one() };
        }
        let dn = self.num.derivative(v);
        let dd = self.den.derivative(v);
        if dd.is_zero() {
            return Self::from_parts(dn, self.den.clone()).expect("nonzero denominator");
        }
        // (n' d - n d') / d^2; any common factor with d^2 divides d.
        let top = &(&dn * &self.den) - &(&self.num * &dd);
        if top.is_zero() {
            return ScalarExpr::zero();
        }
        let g = gcd(&top, &self.den);
        let top = top.div_exact(&g).expect("gcd divides");
        let d_reduced = self.den.div_exact(&g).expect("gcd divides");
        let g2 = gcd(&top, &self.den);
        let top = top.div_exact(&g2).expect("gcd divides");
        let d2 = self.den.div_exact(&g2).expect("gcd divides");
        Self::normalized(top, &d_reduced * &d2)
    }

    pub fn eval(&self, point: &[BigRational; MAX_VARS]) -> Result<BigRational, SymError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(SymError::Pole);
        }
        Ok(self.num.eval(point) / d)
    }

    pub fn eval_f64(&self, point: &[f64; MAX_VARS]) -> f64 {
        CompiledExpr::new(self).eval(point)
    }

    /// Substitutes rational functions for the variables.
    pub fn compose(&self, images: &[ScalarExpr; MAX_VARS]) -> Result<ScalarExpr, SymError> {
        let mut lcm_den = Poly::one();
        for img in images.iter() {
            if !img.den.is_one() {
                lcm_den = super::gcd::lcm(&lcm_den, &img.den);
            }
        }
        if lcm_den.is_one() {
            let polys: [Poly; MAX_VARS] = std::array::from_fn(|i| images[i].num.clone());
            let n = self.num.compose(&polys);
            let d = self.den.compose(&polys);
            return Self::from_parts(n, d);
        }
        let eval_poly = |p: &Poly| -> ScalarExpr {
            let mut acc = ScalarExpr::zero();
            for (m, c) in p.terms() {
                let mut t = ScalarExpr::from_rational(c.clone());
                for (v, e) in m.vars() {
                    t = &t * &images[v.index()].powi(e as i32).expect("positive power");
                }
                acc = &acc + &t;
            }
            acc
        };
        eval_poly(&self.num).checked_div(&eval_poly(&self.den))
    }
}

/// Fast `f64` evaluator for repeated point evaluation (quadrature).
#[derive(Clone, Debug)]
pub struct CompiledExpr {
    num: Vec<(f64, Vec<(usize, i32)>)>,
    den: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledExpr {
    pub fn new(e: &ScalarExpr) -> CompiledExpr {
        CompiledExpr { num: e.num.to_f64_terms(), den: e.den.to_f64_terms() }
    }

    fn eval_terms(terms: &[(f64, Vec<(usize, i32)>)], point: &[f64; MAX_VARS]) -> f64 {
        terms
            .iter()
            .map(|(c, vars)| vars.iter().fold(*c, |acc, &(v, e)| acc * point[v].powi(e)))
            .sum()
    }

    pub fn eval(&self, point: &[f64; MAX_VARS]) -> f64 {
        Self::eval_terms(&self.num, point) / Self::eval_terms(&self.den, point)
    }

    pub fn eval_den(&self, point: &[f64; MAX_VARS]) -> f64 {
        Self::eval_terms(&self.den, point)
    }
}

impl<'a> Add<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: &'a ScalarExpr) -> ScalarExpr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let n = &self.num + &rhs.num;
            if self.den.is_one() {
                return ScalarExpr { num: n, den: Poly::one() };
            }
            return ScalarExpr::from_parts(n, self.den.clone()).expect("nonzero denominator");
        }
        if self.den.is_one() {
            let n = &(&self.num * &rhs.den) + &rhs.num;
            return ScalarExpr::normalized(n, rhs.den.clone());
        }
        if rhs.den.is_one() {
            let n = &self.num + &(&rhs.num * &self.den);
            return ScalarExpr::normalized(n, self.den.clone());
        }
        // Henrici: with g = gcd(d1, d2), gcd(n, d1 d2 / g) = gcd(n, g).
        let g = gcd(&self.den, &rhs.den);
        let d1 = self.den.div_exact(&g).expect("gcd divides");
        let d2 = rhs.den.div_exact(&g).expect("gcd divides");
        let n = &(&self.num * &d2) + &(&rhs.num * &d1);
        let den = &self.den * &d2;
        if g.is_one() {
            return ScalarExpr::normalized(n, den);
        }
        let h = gcd(&n, &g);
        if h.is_one() {
            ScalarExpr::normalized(n, den)
        } else {
            ScalarExpr::normalized(n.div_exact(&h).expect("gcd divides"), den.div_exact(&h).expect("gcd divides"))
        }
    }
}

impl<'a> Sub<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: &'a ScalarExpr) -> ScalarExpr {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &'a ScalarExpr) -> ScalarExpr {
        if self.is_zero() || rhs.is_zero() {
            return ScalarExpr::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        if self.den.is_one() && rhs.den.is_one() {
            return ScalarExpr { num: &self.num * &rhs.num, den: Poly::one() };
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let exact = |p: &Poly, g: &Poly| if g.is_one() { p.clone() } else { p.div_exact(g).expect("gcd divides") };
        let n = &exact(&self.num, &g1) * &exact(&rhs.num, &g2);
        let d = &exact(&self.den, &g2) * &exact(&rhs.den, &g1);
        ScalarExpr::normalized(n, d)
    }
}

impl<'a> Div<&'a ScalarExpr> for &'a ScalarExpr {
    type Output = ScalarExpr;
    /// Panics on division by zero; use [`ScalarExpr::checked_div`] otherwise.
    fn div(self, rhs: &'a ScalarExpr) -> ScalarExpr {
        self.checked_div(rhs).expect("division by the zero rational function")
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: &'a ScalarExpr) -> ScalarExpr {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<ScalarExpr> for &'a ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&ScalarExpr> for ScalarExpr {
    fn add_assign(&mut self, rhs: &ScalarExpr) {
        *self = &*self + rhs;
    }
}

impl AddAssign<ScalarExpr> for ScalarExpr {
    fn add_assign(&mut self, rhs: ScalarExpr) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&ScalarExpr> for ScalarExpr {
    fn sub_assign(&mut self, rhs: &ScalarExpr) {
        *self = &*self - rhs;
    }
}

impl SubAssign<ScalarExpr> for ScalarExpr {
    fn sub_assign(&mut self, rhs: ScalarExpr) {
        *self = &*self - &rhs;
    }
}

impl std::iter::Sum for ScalarExpr {
    fn sum<I: Iterator<Item = ScalarExpr>>(iter: I) -> ScalarExpr {
        iter.fold(ScalarExpr::zero(), |acc, x| &acc + &x)
    }
}

impl From<i64> for ScalarExpr {
    fn from(c: i64) -> Self {
        ScalarExpr::from_int(c)
    }
}

impl From<BigRational> for ScalarExpr {
    fn from(c: BigRational) -> Self {
        ScalarExpr::from_rational(c)
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| if p.len() > 1 { format!("({p})") } else { p.to_string() };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

/// Converts a rational to `f64` (`NaN` if out of range).
pub fn rational_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}
