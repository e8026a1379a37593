//! Multivariate gcd over ℚ by recursive primitive polynomial remainder
//! sequences.
//!
//! The result is normalized to be monic in lex order, so `gcd(a, b)` is unique.


use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::poly::{Monomial, Poly, Var, MAX_VARS};

/// Greatest common divisor, monic in lex order. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.is_monomial() {
        return monomial_gcd(&a.terms()[0].0, b);
    }
    if b.is_monomial() {
        return monomial_gcd(&b.terms()[0].0, a);
    }
    let (ma, mb) = (a.var_mask(), b.var_mask());
    if ma & !mb != 0 {
        return gcd_with_parts(b, coeffs_over(a, ma & !mb));
    }
    if mb & !ma != 0 {
        return gcd_with_parts(a, coeffs_over(b, mb & !ma));
    }
    if coprime_mod_p(a, b) {
        return Poly::one();
    }
    let (am, bm) = (a.monic(), b.monic());
    if am == bm {
        return am;
    }
    if a.len() <= b.len() {
        if b.div_exact(&am).is_some() {
            return am;
        }
    } else if a.div_exact(&bm).is_some() {
        return bm;
    }
    recursive_gcd(&am, &bm).monic()
}

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, PRIME - 2)
}

fn rational_mod(c: &BigRational) -> Option<u64> {
    let p = BigInt::from(PRIME);
    let reduce = |x: &BigInt| -> u64 {
        let r = ((x % &p) + &p) % &p;
        u64::try_from(r).expect("reduced below the prime")
    };
    let d = reduce(c.denom());
    (d != 0).then(|| mul_mod(reduce(c.numer()), inv_mod(d)))
}

/// Dense image of `p` in `F_p[v]` after substituting `point` for the other variables.
fn specialize(p: &Poly, v: Var, point: &[u64; MAX_VARS]) -> Option<Vec<u64>> {
    let mut out = vec![0u64; p.degree_in(v) as usize + 1];
    for (t, c) in p.terms() {
        let mut acc = rational_mod(c)?;
        for (w, e) in t.vars() {
            if w != v {
                acc = mul_mod(acc, pow_mod(point[w.0 as usize], e as u64));
            }
        }
        let k = t.exp(v) as usize;
        out[k] = (out[k] + acc) % PRIME;
    }
    Some(out)
}

fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Degree of the gcd of two nonzero dense polynomials over `F_p`.
fn gcd_degree_mod_p(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = inv_mod(*b.last().expect("nonempty"));
        while a.len() >= b.len() {
            let f = mul_mod(*a.last().expect("nonempty"), inv);
            let shift = a.len() - b.len();
            for (i, bi) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + PRIME - mul_mod(f, *bi)) % PRIME;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// True only when `a` and `b` are proven coprime: for every shared variable `v`
/// their images in `F_p[v]` keep their `v`-degree and have a constant gcd, so
/// a common factor could not involve any variable.
fn coprime_mod_p(a: &Poly, b: &Poly) -> bool {
    let mut point = [0u64; MAX_VARS];
    for (i, x) in point.iter_mut().enumerate() {
        *x = 1_000_003 + 7919 * i as u64;
    }
    let shared = a.var_mask() & b.var_mask();
    (0..MAX_VARS).filter(|i| shared & (1 << i) != 0).all(|i| {
        let v = Var(i as u8);
        let (Some(sa), Some(sb)) = (specialize(a, v, &point), specialize(b, v, &point)) else {
            return false;
        };
        let (da, db) = (a.degree_in(v) as usize, b.degree_in(v) as usize);
        sa[da] != 0 && sb[db] != 0 && gcd_degree_mod_p(sa, sb) == 0
    })
}

/// Coefficients of `p` as a polynomial in the variables of `mask`.
fn coeffs_over(p: &Poly, mask: u32) -> Vec<Poly> {
    let mut groups: BTreeMap<Monomial, Vec<(Monomial, BigRational)>> = BTreeMap::new();
    for (t, c) in p.terms() {
        let mut key = Monomial::one();
        let mut rest = *t;
        for i in 0..MAX_VARS {
            if mask & (1 << i) != 0 {
                key.0[i] = t.0[i];
                rest.0[i] = 0;
            }
        }
        groups.entry(key).or_default().push((rest, c.clone()));
    }
    let mut parts: Vec<Poly> = groups.into_values().map(Poly::from_terms).collect();
    parts.sort_by_key(|q| q.len());
    parts
}

/// A divisor of `b` is free of the variables `b` lacks, so it divides the
/// other operand iff it divides each of its coefficients in those variables.
fn gcd_with_parts(b: &Poly, parts: Vec<Poly>) -> Poly {
    let mut acc = b.monic();
    for c in parts {
        acc = gcd(&acc, &c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

/// Gcd of a monomial and a polynomial: the largest monomial dividing both.
fn monomial_gcd(m: &Monomial, p: &Poly) -> Poly {
    let mut acc = *m;
    for (t, _) in p.terms() {
        acc = Monomial::min(&acc, t);
        if acc.is_one() {
            break;
        }
    }
    Poly::term(acc, BigRational::from_integer(1.into()))
}

fn pick_var(a: &Poly, b: &Poly) -> Option<Var> {
    let both = a.var_mask() & b.var_mask();
    let mut best: Option<(u16, Var)> = None;
    for i in 0..MAX_VARS {
        if both & (1 << i) != 0 {
            let v = Var(i as u8);
            let d = a.degree_in(v).max(b.degree_in(v));
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, v));
            }
        }
    }
    best.map(|(_, v)| v)
}

/// Content of `p` with respect to `v`: gcd of its coefficients as a polynomial in `v`.
fn content_in(p: &Poly, v: Var) -> Poly {
    let mut acc = Poly::zero();
    for (_, c) in p.coeffs_in(v) {
        acc = gcd(&acc, &c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

fn recursive_gcd(a: &Poly, b: &Poly) -> Poly {
    let v = match pick_var(a, b) {
        Some(v) => v,
        // A common factor can only involve shared variables.
        None => return Poly::one(),
    };
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let g = primitive_prs(pa, pb, v);
    &c * &g
}

fn primitive_part(p: &Poly, v: Var) -> Poly {
    let c = content_in(p, v);
    p.div_exact(&c).expect("content divides").monic()
}

/// Pseudo-remainder of `a` by `b` as polynomials in `v`.
fn pseudo_rem(a: &Poly, b: &Poly, v: Var) -> Poly {
    let db = b.degree_in(v);
    let lcb = b.lead_coeff_in(v);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lcr = r.lead_coeff_in(v);
        let shift = Poly::term(Monomial::var(v, dr - db), BigRational::from_integer(1.into()));
        let sub = &(&lcr * &shift) * b;
        r = &(&lcb * &r) - &sub;
        r = shrink(r);
    }
    r
}

/// Removes a rational scalar factor to keep coefficients small.
fn shrink(p: Poly) -> Poly {
    if p.is_zero() {
        p
    } else {
        p.monic()
    }
}

/// Gcd of two polynomials that are primitive with respect to `v`.
fn primitive_prs(a: Poly, b: Poly, v: Var) -> Poly {
    let (mut f, mut g) = if a.degree_in(v) >= b.degree_in(v) { (a, b) } else { (b, a) };
    if g.degree_in(v) == 0 {
        // Primitive in v and free of v: g is a unit of the coefficient ring
        // up to its own content, which was removed.
        return Poly::one();
    }
    loop {
        let r = pseudo_rem(&f, &g, v);
        if r.is_zero() {
            return primitive_part(&g, v);
        }
        if r.degree_in(v) == 0 {
            return Poly::one();
        }
        f = g;
        g = primitive_part(&r, v);
    }
}

/// Least common multiple, monic.
pub fn lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let g = gcd(a, b);
    let q = a.div_exact(&g).expect("gcd divides");
    (&q * b).monic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::poly::Var;

    fn x(i: usize) -> Poly {
        Poly::var(Var::base(i))
    }
    fn xt(i: usize) -> Poly {
        Poly::var(Var::tilde(i))
    }
    fn c(k: i64) -> Poly {
        Poly::from_int(k)
    }

    #[test]
    fn univariate_common_factor() {
        // (x1 - 1)(x1 + 2) and (x1 - 1)(x1 - 3)
        let f = &(&x(0) - &c(1)) * &(&x(0) + &c(2));
        let g = &(&x(0) - &c(1)) * &(&x(0) - &c(3));
        assert_eq!(gcd(&f, &g), &x(0) - &c(1));
    }

    #[test]
    fn multivariate_common_factor() {
        let common = &(&(&x(0) * &xt(0)) + &x(1)) + &c(1);
        let f = &common * &(&x(0) + &xt(1));
        let g = &common * &(&(&x(1) * &x(1)) - &xt(0));
        assert_eq!(gcd(&f, &g), common.monic());
        let h = &(&x(0) + &c(3)) * &(&x(1) - &xt(0));
        assert!(gcd(&f, &h).is_one());
    }

    #[test]
    fn coprime_with_shared_variables() {
        let f = &(&x(0) * &x(0)) + &c(1);
        let g = &(&x(0) * &x(1)) + &c(1);
        assert!(gcd(&f, &g).is_one());
    }

    #[test]
    fn monomial_factors() {
        let f = &(&x(0) * &x(0)) * &x(1);
        let g = &(&x(0) * &x(1)) + &x(0);
        assert_eq!(gcd(&f, &g), x(0));
        assert!(num_traits::Zero::is_zero(&gcd(&Poly::zero(), &Poly::zero()).lead_coeff()));
    }
}
