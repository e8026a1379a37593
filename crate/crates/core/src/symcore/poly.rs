//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are addressed by [`Var`]: slots `0..8` hold the base coordinates
//! `x1..x8`, slots `8..16` the tilde coordinates `xt1..xt8`. Terms are kept in
//! strictly descending lexicographic order with nonzero coefficients, so two
//! equal polynomials always have identical term vectors.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest supported half-dimension.
pub const MAX_M: usize = 8;
/// Number of variable slots in a [`Monomial`].
pub const MAX_VARS: usize = 2 * MAX_M;

/// A variable slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u8);

impl Var {
    /// The base coordinate `x^{i+1}`.
    pub fn base(i: usize) -> Var {
        assert!(i < MAX_M, "base coordinate index {i} out of range");
        Var(i as u8)
    }

    /// The tilde coordinate `x̃_{i+1}`.
    pub fn tilde(i: usize) -> Var {
        assert!(i < MAX_M, "tilde coordinate index {i} out of range");
        Var((MAX_M + i) as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_tilde(self) -> bool {
        self.index() >= MAX_M
    }

    pub fn name(self) -> String {
        if self.is_tilde() {
            format!("xt{}", self.index() - MAX_M + 1)
        } else {
            format!("x{}", self.index() + 1)
        }
    }
}

/// Exponent vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub [u16; MAX_VARS]);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial([0; MAX_VARS])
    }

    pub fn var(v: Var, exp: u16) -> Monomial {
        let mut e = [0; MAX_VARS];
        e[v.index()] = exp;
        Monomial(e)
    }

    pub fn exp(&self, v: Var) -> u16 {
        self.0[v.index()]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Monomial(e)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `self / other`, assuming `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a -= *b;
        }
        Monomial(e)
    }

    pub fn min(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = (*a).min(*b);
        }
        Monomial(e)
    }

    fn without(&self, v: Var) -> Monomial {
        let mut e = self.0;
        e[v.index()] = 0;
        Monomial(e)
    }

    pub fn vars(&self) -> impl Iterator<Item = (Var, u16)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (Var(i as u8), e))
    }
}

/// A polynomial in up to [`MAX_VARS`] variables over ℚ.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: Vec<(Monomial, BigRational)>,
}

fn merge_sorted(
    a: &[(Monomial, BigRational)],
    b: &[(Monomial, BigRational)],
    negate_b: bool,
) -> Vec<(Monomial, BigRational)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                let c = if negate_b { -&b[j].1 } else { b[j].1.clone() };
                out.push((b[j].0, c));
                j += 1;
            }
            Ordering::Equal => {
                let c = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(a[i..].iter().cloned());
    for t in &b[j..] {
        let c = if negate_b { -&t.1 } else { t.1.clone() };
        out.push((t.0, c));
    }
    out
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Monomial::one(), c)] }
        }
    }

    pub fn from_int(c: i64) -> Poly {
        Poly::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn var(v: Var) -> Poly {
        Poly::term(Monomial::var(v, 1), BigRational::one())
    }

    pub fn term(m: Monomial, c: BigRational) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from unsorted, possibly repeated terms.
    pub fn from_terms(mut terms: Vec<(Monomial, BigRational)>) -> Poly {
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, BigRational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += c,
                _ => {
                    if let Some(last) = out.last() {
                        if last.1.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if let Some(last) = out.last() {
            if last.1.is_zero() {
                out.pop();
            }
        }
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Leading term in lex order.
    pub fn lead(&self) -> Option<&(Monomial, BigRational)> {
        self.terms.first()
    }

    pub fn lead_coeff(&self) -> BigRational {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.iter().map(|t| t.0.exp(v)).max().unwrap_or(0)
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.iter().any(|t| t.0.exp(v) > 0)
    }

    /// Bitmask of variables that occur.
    pub fn var_mask(&self) -> u32 {
        let mut mask = 0u32;
        for (m, _) in &self.terms {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    mask |= 1 << i;
                }
            }
        }
        mask
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect() }
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(a, b)| (a.mul(m), b * c)).collect() }
    }

    /// Divides every coefficient by the leading one; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.terms.first() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, v: Var) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e > 0 {
                let mut nm = *m;
                nm.0[v.index()] = e - 1;
                out.push((nm, c * BigRational::from_integer(BigInt::from(e))));
            }
        }
        Poly::from_terms(out)
    }

    pub fn eval(&self, point: &[BigRational; MAX_VARS]) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.vars() {
                t *= num_traits::pow(point[v.index()].clone(), e as usize);
            }
            acc += t;
        }
        acc
    }

    /// Substitutes polynomials for variables (`images[v]` replaces slot `v`).
    pub fn compose(&self, images: &[Poly; MAX_VARS]) -> Poly {
        let mut acc = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (v, e) in m.vars() {
                t = &t * &images[v.index()].pow(e as u32);
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Coefficients with respect to `v`, highest power first.
    pub fn coeffs_in(&self, v: Var) -> Vec<(u16, Poly)> {
        let mut buckets: Vec<(u16, Vec<(Monomial, BigRational)>)> = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            match buckets.iter_mut().find(|b| b.0 == e) {
                Some(b) => b.1.push((m.without(v), c.clone())),
                None => buckets.push((e, vec![(m.without(v), c.clone())])),
            }
        }
        buckets.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        buckets.into_iter().map(|(e, t)| (e, Poly::from_terms(t))).collect()
    }

    /// Leading coefficient with respect to `v` (a polynomial free of `v`).
    pub fn lead_coeff_in(&self, v: Var) -> Poly {
        let d = self.degree_in(v);
        let terms = self
            .terms
            .iter()
            .filter(|t| t.0.exp(v) == d)
            .map(|(m, c)| (m.without(v), c.clone()))
            .collect();
        Poly::from_terms(terms)
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (lm_d, lc_d) = d.terms[0].clone();
        let inv = lc_d.recip();
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((lm, lc)) = rem.terms.first().cloned() {
            if !lm_d.divides(&lm) {
                return None;
            }
            let qm = lm.div(&lm_d);
            let qc = lc * &inv;
            rem = Poly { terms: merge_sorted(&rem.terms, &d.mul_term(&qm, &qc).terms, true) };
            quot.push((qm, qc));
        }
        // Quotient terms were produced in descending order.
        Some(Poly { terms: quot })
    }

    pub fn to_f64_terms(&self) -> Vec<(f64, Vec<(usize, i32)>)> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let cf = c.to_f64().unwrap_or(f64::NAN);
                (cf, m.vars().map(|(v, e)| (v.index(), e as i32)).collect())
            })
            .collect()
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        Poly { terms: merge_sorted(&self.terms, &rhs.terms, false) }
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        Poly { terms: merge_sorted(&self.terms, &rhs.terms, true) }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut out = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.push((ma.mul(mb), ca * cb));
            }
        }
        Poly::from_terms(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(fmt_rational(&abs));
            }
            for (v, e) in m.vars() {
                if e == 1 {
                    factors.push(v.name());
                } else {
                    factors.push(format!("{}^{}", v.name(), e));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(Var::base(i))
    }

    #[test]
    fn arithmetic_cancels() {
        let p = &x(0) + &x(1);
        let q = &p - &x(1);
        assert_eq!(q, x(0));
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn exact_division() {
        // (x1^2 - 1) / (x1 - 1) = x1 + 1
        let one = Poly::one();
        let a = &(&x(0) * &x(0)) - &one;
        let b = &x(0) - &one;
        assert_eq!(a.div_exact(&b).unwrap(), &x(0) + &one);
        assert!(b.div_exact(&a).is_none());
    }

    #[test]
    fn display_is_readable() {
        let p = &(&x(0) * &Poly::var(Var::tilde(0))) - &Poly::from_int(2);
        assert_eq!(p.to_string(), "x1*xt1 - 2");
    }
}
