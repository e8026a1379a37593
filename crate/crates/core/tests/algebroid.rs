use doublegeom::algebroid::*;
use doublegeom::random::{Generator, Support};
use doublegeom::symcore::{parse_scalar, CoordSystem, ScalarExpr};
use doublegeom::tensor::{pair_gamma, VectorField};
use proptest::prelude::*;

fn gen(m: usize, seed: u64) -> Generator {
    Generator::new(CoordSystem::new(m).unwrap(), seed)
}

fn field(cs: CoordSystem, comps: &[&str]) -> VectorField {
    VectorField::new(cs, comps.iter().map(|c| parse_scalar(c, &cs).unwrap()).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn star_is_metric_compatible(seed in any::<u64>(), m in 2usize..=3) {
        let mut g = gen(m, seed);
        let (x, y, z) = (g.vector(Support::All, 2), g.vector(Support::All, 2), g.vector(Support::All, 2));
        let lhs = z.apply(&pair_gamma(&x, &y).unwrap());
        let rhs = pair_gamma(&star_product(&z, &x), &y).unwrap() + pair_gamma(&x, &star_product(&z, &y)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_is_skew_with_function_rule(seed in any::<u64>()) {
        let mut g = gen(2, seed);
        let cs = *g.cs();
        let (x, y) = (g.vector(Support::All, 2), g.vector(Support::All, 2));
        let f = g.poly(Support::All, 2, 3);
        prop_assert!((&c_bracket(&x, &y) + &c_bracket(&y, &x)).is_zero());
        // [X, fY] = f[X,Y] + X(f)Y − γ(X,Y)∂f
        let lhs = c_bracket(&x, &y.scale(&f));
        let rhs = &(&c_bracket(&x, &y).scale(&f) + &y.scale(&x.apply(&f))) - &d_operator(cs, &f).scale(&pair_gamma(&x, &y).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn three_bracket_routes_agree(seed in any::<u64>()) {
        let mut g = gen(2, seed);
        let cs = *g.cs();
        let (x, y) = (g.vector(Support::All, 2), g.vector(Support::All, 2));
        let c = c_bracket(&x, &y);
        prop_assert_eq!(&c, &c_bracket_lwz(cs, &LPair::from_vector(&x), &LPair::from_vector(&y)).unwrap());
        prop_assert_eq!(&c, &c_bracket_split(&x, &y));
    }

    #[test]
    fn foliated_fields_satisfy_leibniz(seed in any::<u64>()) {
        let mut g = gen(2, seed);
        let (x, y, z) = (g.vector(Support::Base, 2), g.vector(Support::Base, 2), g.vector(Support::Base, 2));
        for r in jacobiator(&x, &y, &z, JacobiMode::Leibniz) {
            prop_assert!(r.is_zero());
        }
        for r in jacobiator(&x, &y, &z, JacobiMode::Cyclic) {
            prop_assert!(r.is_zero());
        }
    }
}

#[test]
fn spec_bracket_examples() {
    let cs = CoordSystem::new(2).unwrap();
    let half_t1 = field(cs, &["0", "0", "1/2", "0"]);
    assert_eq!(c_bracket(&field(cs, &["x1", "0", "0", "0"]), &VectorField::frame(cs, 2)), half_t1);
    assert_eq!(star_product(&field(cs, &["x1", "0", "0", "0"]), &VectorField::frame(cs, 2)), VectorField::frame(cs, 2));
    let lwz = c_bracket_lwz(
        cs,
        &LPair { x: vec![ScalarExpr::zero(); 2], alpha: vec![ScalarExpr::one(), ScalarExpr::zero()] },
        &LPair { x: vec![ScalarExpr::zero(); 2], alpha: vec![ScalarExpr::zero(), ScalarExpr::one()] },
    )
    .unwrap();
    assert!(lwz.is_zero());
}

#[test]
fn lwz_rejects_wrong_lengths() {
    let cs = CoordSystem::new(2).unwrap();
    let bad = LPair { x: vec![ScalarExpr::zero(); 3], alpha: vec![ScalarExpr::zero(); 2] };
    let ok = LPair { x: vec![ScalarExpr::zero(); 2], alpha: vec![ScalarExpr::zero(); 2] };
    assert!(c_bracket_lwz(cs, &bad, &ok).is_err());
}

#[test]
fn non_closed_s_field_breaks_the_bracket() {
    let cs = CoordSystem::new(3).unwrap();
    let x1 = parse_scalar("x1", &cs).unwrap();
    let z = ScalarExpr::zero();
    let s = SFieldForm::new(
        cs,
        vec![vec![z.clone(), z.clone(), z.clone()], vec![z.clone(), z.clone(), x1.clone()], vec![z.clone(), -&x1, z.clone()]],
    )
    .unwrap();
    assert!(!s.closed_on_l());
    let frames: Vec<VectorField> = (0..3).map(|k| VectorField::frame(cs, k)).collect();
    let broken = frames.iter().any(|a| {
        frames.iter().any(|b| s_field_transform(&s, &c_bracket(a, b)) != c_bracket(&s_field_transform(&s, a), &s_field_transform(&s, b)))
    });
    assert!(broken);
}
