use doublegeom::genmetric::*;
use doublegeom::random::{Generator, Support};
use doublegeom::symcore::{parse_scalar, CoordSystem, ScalarExpr};
use doublegeom::tensor::{pair_gamma, Matrix, VectorField};
use proptest::prelude::*;

fn gen(m: usize, seed: u64) -> Generator {
    Generator::new(CoordSystem::new(m).unwrap(), seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn h_round_trips_through_the_field(seed in any::<u64>(), m in 2usize..=3) {
        let f = gen(m, seed).field(Support::All, 1);
        let h = build_h(&f);
        let back = recover_field(&h).unwrap();
        prop_assert_eq!(back.g(), f.g());
        prop_assert_eq!(back.b(), f.b());
        let phi = h.phi_op();
        prop_assert_eq!(phi * phi, Matrix::identity(2 * m));
        prop_assert!(h.h().is_symmetric());
    }

    #[test]
    fn s_plus_and_s_minus_are_orthogonal_eigenspaces(seed in any::<u64>()) {
        let mut g = gen(2, seed);
        let f = g.field(Support::Base, 1);
        let h = build_h(&f);
        let sp = splitting(&f);
        for a in &sp.plus {
            prop_assert_eq!(&h.apply_phi(a), a);
            for b in &sp.minus {
                prop_assert!(pair_gamma(a, b).unwrap().is_zero());
                prop_assert!(h.pair(a, b).is_zero());
            }
        }
        let z = g.vector(Support::All, 1);
        let (zp, zm) = decompose_spm(&z, &f);
        prop_assert_eq!(&(&zp + &zm), &z);
        prop_assert_eq!(&h.apply_phi(&zm), &-&zm);
    }
}

#[test]
fn iota_rejects_non_l_vectors() {
    let cs = CoordSystem::new(2).unwrap();
    let f = FieldSpec::flat(cs);
    assert!(iota(Sign::Plus, &VectorField::frame(cs, 2), &f).is_err());
    let x = iota(Sign::Minus, &VectorField::frame(cs, 0), &f).unwrap();
    assert_eq!(x.tilde()[0], ScalarExpr::from_int(-1));
}

#[test]
fn signature_and_degeneracy_are_reported() {
    let cs = CoordSystem::new(2).unwrap();
    let p = |s: &str| parse_scalar(s, &cs).unwrap();
    let g = Matrix::from_rows(vec![vec![p("1"), p("0")], vec![p("0"), p("-1")]]).unwrap();
    let zero = Matrix::zeros(2, 2);
    let origin = vec![ScalarExpr::zero().as_constant().unwrap(); 4];
    assert!(FieldSpec::new(cs, g.clone(), zero.clone(), ScalarExpr::zero(), 1, 1, Some(origin.clone())).is_ok());
    assert!(FieldSpec::new(cs, g, zero.clone(), ScalarExpr::zero(), 2, 0, Some(origin)).is_err());
    let singular = Matrix::from_rows(vec![vec![p("x1"), p("0")], vec![p("0"), p("0")]]).unwrap();
    assert!(FieldSpec::with_metric(cs, singular, zero, ScalarExpr::zero()).is_err());
}

#[test]
fn translations_are_killing_and_generic_fields_are_not() {
    let cs = CoordSystem::new(2).unwrap();
    let p = |s: &str| parse_scalar(s, &cs).unwrap();
    let g = Matrix::from_rows(vec![vec![p("1 + x2^2"), p("0")], vec![p("0"), p("1")]]).unwrap();
    let f = FieldSpec::with_metric(cs, g, Matrix::zeros(2, 2), ScalarExpr::zero()).unwrap();
    assert!(is_generalized_killing(&VectorField::frame(cs, 0), &f).unwrap());
    assert!(!is_generalized_killing(&VectorField::frame(cs, 1), &f).unwrap());
    let rotation = VectorField::new(cs, vec![p("x2"), p("-x1"), p("0"), p("0")]).unwrap();
    let r = killing_report(&rotation, &f).unwrap();
    assert_eq!(r.generalized, r.classical);
}
