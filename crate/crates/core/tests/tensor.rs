use doublegeom::random::{Generator, Support};
use doublegeom::symcore::CoordSystem;
use doublegeom::tensor::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonical_structure_relations(seed in any::<u64>(), m in 1usize..=3) {
        let cs = CoordSystem::new(m).unwrap();
        let mut g = Generator::new(cs, seed);
        let (x, y) = (g.vector(Support::All, 2), g.vector(Support::All, 2));
        prop_assert_eq!(&apply_f(&apply_f(&x)), &x);
        prop_assert_eq!(pair_omega(&x, &y).unwrap(), pair_gamma(&apply_f(&x), &y).unwrap());
        prop_assert_eq!(pair_gamma(&apply_f(&x), &apply_f(&y)).unwrap(), -pair_gamma(&x, &y).unwrap());
        prop_assert_eq!(pair_gamma(&x, &y).unwrap(), pair_gamma(&y, &x).unwrap());
        let (xl, xt) = split_l(&x);
        prop_assert!(xl.in_l() && xt.in_l_tilde());
        prop_assert!(pair_gamma(&xl, &xl).unwrap().is_zero() && pair_gamma(&xt, &xt).unwrap().is_zero());
        prop_assert_eq!(&sharp_gamma(cs, &flat_gamma(&x)), &x);
    }

    #[test]
    fn lowering_and_raising_are_inverse(seed in any::<u64>()) {
        let cs = CoordSystem::new(2).unwrap();
        let mut g = Generator::new(cs, seed);
        let x = g.vector(Support::All, 2);
        let gamma = CanonicalStructure::new(cs).gamma;
        let low = musical(Musical::Flat, &gamma, &x.to_tensor()).unwrap();
        prop_assert_eq!(VectorField::from_tensor(&musical(Musical::Sharp, &gamma, &low).unwrap()).unwrap(), x);
    }
}

#[test]
fn matrices_agree_with_pairings() {
    let cs = CoordSystem::new(2).unwrap();
    let (gm, om, fm) = (gamma_matrix(&cs), omega_matrix(&cs), f_matrix(&cs));
    assert_eq!(&(&fm * &fm), &Matrix::identity(4));
    assert_eq!(&fm.transpose() * &gm, om);
    for a in 0..4 {
        for b in 0..4 {
            let (ea, eb) = (VectorField::frame(cs, a), VectorField::frame(cs, b));
            assert_eq!(gm.get(a, b), &pair_gamma(&ea, &eb).unwrap());
            assert_eq!(om.get(a, b), &pair_omega(&ea, &eb).unwrap());
        }
    }
}

#[test]
fn variance_strings_parse() {
    assert_eq!(parse_variance("vc").unwrap(), vec![Slot::Vector, Slot::Covector]);
    assert!(parse_variance("vx").is_err());
}
