use doublegeom::density::*;
use doublegeom::random::{Generator, Support};
use doublegeom::symcore::{parse_scalar, CoordSystem, ScalarExpr};
use doublegeom::tensor::Matrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn alpha_strategy() -> impl Strategy<Value = Vec<Vec<BigRational>>> {
    prop::collection::vec(-2i64..=2, 4)
        .prop_filter("invertible", |v| v[0] * v[3] - v[1] * v[2] != 0)
        .prop_map(|v| vec![vec![q(v[0]), q(v[1])], vec![q(v[2]), q(v[3])]])
}

fn offsets() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec(-2i64..=2, 2).prop_map(|v| v.into_iter().map(q).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lie_derivative_commutes_with_locally_affine_changes(
        seed in any::<u64>(), s in prop::sample::select(vec![-1i64, 0, 1, 2]),
        alpha in alpha_strategy(), a0 in offsets(), b0 in offsets(),
    ) {
        let cs = CoordSystem::new(2).unwrap();
        let mut g = Generator::new(cs, seed);
        let change = AffineChange::locafin(cs, &alpha, &a0, &b0).unwrap();
        prop_assert!(change.is_locafin());
        prop_assert_eq!(change.jacobian_det(), q(1));
        let d = Density::new(cs, q(s), g.poly(Support::Base, 2, 3));
        let x = g.vector(Support::Base, 1);
        let lhs = lie_density(&x, &d).unwrap().transform(&change).unwrap();
        let rhs = lie_density(&change.push_vector(&x).unwrap(), &d.transform(&change).unwrap()).unwrap();
        prop_assert_eq!(lhs.theta(), rhs.theta());
    }

    #[test]
    fn det_g_picks_up_det_alpha_squared(seed in any::<u64>(), alpha in alpha_strategy(), a0 in offsets(), b0 in offsets()) {
        let cs = CoordSystem::new(2).unwrap();
        let f = Generator::new(cs, seed).field(Support::Base, 1);
        let change = AffineChange::locafin(cs, &alpha, &a0, &b0).unwrap();
        let a = Matrix::from_fn(2, 2, |i, j| ScalarExpr::from_rational(alpha[i][j].clone()));
        let pulled = f.g().map(|e| change.pull_scalar(e).unwrap());
        let new_g = &(&a.transpose() * &pulled) * &a;
        let det_a = a.det();
        prop_assert_eq!(new_g.det(), &(&det_a * &det_a) * &change.pull_scalar(&f.g().det()).unwrap());
    }
}

#[test]
fn general_affine_changes_rescale_by_the_jacobian() {
    let cs = CoordSystem::new(2).unwrap();
    // old = M·new with det M = 2, so ψ = M⁻¹ has |det ψ| = 1/2.
    let mut rows = vec![vec![BigRational::zero(); 4]; 4];
    for (k, row) in rows.iter_mut().enumerate() {
        row[k] = q(1);
    }
    rows[0][0] = q(2);
    rows[1][2] = q(1);
    let change = AffineChange::new(cs, rows, vec![BigRational::zero(); 4]).unwrap();
    assert!(!change.is_locafin());
    let theta = parse_scalar("x1 + xt1", &cs).unwrap();
    let pulled = parse_scalar("2*x1 + xt1", &cs).unwrap();
    for (s, factor) in [(-1, (2, 1)), (0, (1, 1)), (1, (1, 2)), (2, (1, 4))] {
        let d = Density::new(cs, q(s), theta.clone()).transform(&change).unwrap();
        assert_eq!(d.theta(), &(&pulled * &ScalarExpr::ratio(factor.0, factor.1)), "s = {s}");
    }
}

#[test]
fn irrational_weights_are_rejected() {
    assert!(weight_factor(&q(2), &BigRational::new(1.into(), 2.into())).is_err());
    assert_eq!(weight_factor(&q(-4), &BigRational::new(1.into(), 2.into())).unwrap(), q(2));
    assert!(weight_factor(&q(0), &q(1)).is_err());
}

#[test]
fn lie_derivative_needs_foliated_inputs() {
    let cs = CoordSystem::new(2).unwrap();
    let x = doublegeom::tensor::VectorField::new(cs, vec![parse_scalar("xt1", &cs).unwrap(), ScalarExpr::zero(), ScalarExpr::zero(), ScalarExpr::zero()]).unwrap();
    let d = Density::new(cs, q(1), ScalarExpr::one());
    assert!(lie_density(&x, &d).is_err());
}
