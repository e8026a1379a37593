use doublegeom::symcore::{full_point, parse_scalar, CoordSystem, ScalarExpr, Var};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

/// A polynomial in `x1, x2, xt1` from `(coefficient, e1, e2, e3)` terms.
fn poly(terms: &[(i64, u16, u16, u16)]) -> ScalarExpr {
    terms
        .iter()
        .map(|&(c, a, b, d)| {
            let mut t = ScalarExpr::from_int(c);
            for (v, e) in [(Var::base(0), a), (Var::base(1), b), (Var::tilde(0), d)] {
                for _ in 0..e {
                    t = &t * &ScalarExpr::var(v);
                }
            }
            t
        })
        .sum()
}

fn terms() -> impl Strategy<Value = Vec<(i64, u16, u16, u16)>> {
    prop::collection::vec((-4i64..=4, 0u16..3, 0u16..3, 0u16..2), 1..4)
}

/// A rational function whose denominator is positive everywhere.
fn rational() -> impl Strategy<Value = ScalarExpr> {
    let den = prop::collection::vec((-3i64..=3, 0u16..2, 0u16..2, 0u16..2), 1..3);
    (terms(), den, 1i64..4).prop_map(|(n, d, c)| {
        let den = &poly(&d) * &poly(&d) + ScalarExpr::from_int(c);
        poly(&n).checked_div(&den).expect("positive denominator")
    })
}

fn point() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-5i64..=5, 1i64..=3), 4).prop_map(|v| {
        v.into_iter().map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d))).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn field_axioms(a in rational(), b in rational(), c in rational()) {
        prop_assert!((&(&a + &b) + &c - (&a + &(&b + &c))).is_zero());
        prop_assert!((&(&a * &b) * &c - (&a * &(&b * &c))).is_zero());
        prop_assert!((&a * &(&b + &c) - (&(&a * &b) + &(&a * &c))).is_zero());
        prop_assert_eq!(&a * &b, &b * &a);
        if !b.is_zero() {
            let q = a.checked_div(&b).unwrap();
            prop_assert_eq!(&q * &b, a.clone());
        }
    }

    #[test]
    fn mixed_partials_commute(a in rational()) {
        let vars = [Var::base(0), Var::base(1), Var::tilde(0)];
        for &u in &vars {
            for &v in &vars {
                prop_assert_eq!(a.diff(u).diff(v), a.diff(v).diff(u));
            }
        }
    }

    #[test]
    fn derivative_is_a_derivation(a in rational(), b in rational()) {
        let v = Var::base(1);
        prop_assert_eq!((&a * &b).diff(v), &a.diff(v) * &b + &a * &b.diff(v));
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in rational(), b in rational(), p in point()) {
        let cs = CoordSystem::new(2).unwrap();
        let full = full_point(&p, &cs).unwrap();
        let (va, vb) = (a.eval(&full).unwrap(), b.eval(&full).unwrap());
        prop_assert_eq!((&a * &b).eval(&full).unwrap(), &va * &vb);
        prop_assert_eq!((&a - &b).eval(&full).unwrap(), &va - &vb);
    }

    #[test]
    fn display_parses_back(a in rational()) {
        let cs = CoordSystem::new(2).unwrap();
        prop_assert_eq!(parse_scalar(&a.to_string(), &cs).unwrap(), a);
    }

    #[test]
    fn derivative_matches_central_difference(t in terms(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let cs = CoordSystem::new(2).unwrap();
        let f = poly(&t);
        let at = |x: f64| {
            let mut p = [0.0; doublegeom::symcore::MAX_VARS];
            p[Var::base(0).index()] = x;
            p[Var::base(1).index()] = y;
            p
        };
        let h = 1e-5;
        let fd = (f.eval_f64(&at(x + h)) - f.eval_f64(&at(x - h))) / (2.0 * h);
        let exact = f.diff(cs.var(0)).eval_f64(&at(x));
        prop_assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()), "fd {fd} exact {exact}");
    }
}

#[test]
fn canonical_form_cancels_common_factors() {
    let cs = CoordSystem::new(2).unwrap();
    let a = parse_scalar("(x1^2 - xt1^2)/(x1 + xt1)", &cs).unwrap();
    assert_eq!(a, parse_scalar("x1 - xt1", &cs).unwrap());
    assert!(a.is_polynomial());
    let b = parse_scalar("1/(1 + x2^2)", &cs).unwrap();
    assert_eq!(b.diff(Var::base(1)), parse_scalar("-2*x2/(1 + x2^2)^2", &cs).unwrap());
}

#[test]
fn poles_and_zero_division_are_errors() {
    let cs = CoordSystem::new(2).unwrap();
    let f = parse_scalar("1/x1", &cs).unwrap();
    let origin = full_point(&vec![BigRational::from_integer(0.into()); 4], &cs).unwrap();
    assert!(f.eval(&origin).is_err());
    assert!(f.checked_div(&ScalarExpr::zero()).is_err());
    assert!(parse_scalar("x9", &cs).is_err());
}
