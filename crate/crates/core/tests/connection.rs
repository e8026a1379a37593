use doublegeom::connection::*;
use doublegeom::genmetric::{build_h, iota, FieldSpec, Sign};
use doublegeom::random::{Generator, Support};
use doublegeom::symcore::{parse_scalar, CoordSystem, ScalarExpr};
use doublegeom::tensor::{Matrix, VectorField};
use proptest::prelude::*;

fn level_matched(m: usize, seed: u64) -> (Generator, FieldSpec) {
    let mut g = Generator::new(CoordSystem::new(m).unwrap(), seed);
    let f = g.field(Support::Base, 1);
    (g, f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn vtc_is_torsion_free_and_solves_the_cyclic_equation(seed in any::<u64>()) {
        let (mut g, f) = level_matched(2, seed);
        let vtc = vtc_connection(&f).unwrap();
        prop_assert!(vtc.preserves_gamma());
        prop_assert!(vtc.preserves_metric(build_h(&f).h()));
        for _ in 0..3 {
            let (x, y, z) = (g.vector(Support::All, 1), g.vector(Support::All, 1), g.vector(Support::All, 1));
            prop_assert!(gualtieri_torsion(&vtc, &x, &y, &z).unwrap().is_zero());
            prop_assert!(vtc_rhs(&vtc, &x, &y, &z).is_zero());
            prop_assert!(bianchi_residual(&vtc, &x, &y, &z).unwrap().is_zero());
        }
    }

    #[test]
    fn induced_dpm_satisfy_the_cyclic_identity(seed in any::<u64>()) {
        let (mut g, f) = level_matched(2, seed);
        let vtc = vtc_connection(&f).unwrap();
        let (dp, dm) = induced_l_connections(&vtc, &f);
        prop_assert!(dp.preserves_metric(f.g()) && dm.preserves_metric(f.g()));
        let (x, y, z) = (g.l_components(Support::Base, 1), g.l_components(Support::Base, 1), g.l_components(Support::Base, 1));
        prop_assert!(dpm_cyclic_residual(Sign::Plus, &dp, &f, &x, &y, &z).is_zero());
        prop_assert!(dpm_cyclic_residual(Sign::Minus, &dm, &f, &x, &y, &z).is_zero());
    }

    #[test]
    fn cwt_has_no_mixed_torsion(seed in any::<u64>()) {
        let (mut g, f) = level_matched(2, seed);
        let cwt = cwt_connection(&f).unwrap();
        let x = iota(Sign::Plus, &g.l_vector(Support::Base, 1), &f).unwrap();
        let y = iota(Sign::Minus, &g.l_vector(Support::Base, 1), &f).unwrap();
        let z = iota(Sign::Plus, &g.l_vector(Support::Base, 1), &f).unwrap();
        prop_assert!(gualtieri_torsion(&cwt, &x, &y, &z).unwrap().is_zero());
        let psi = vtc_deformation(&f).unwrap();
        prop_assert!(psi.totally_antisymmetric());
        prop_assert_eq!(vtc_connection(&f).unwrap().difference(&cwt).unwrap(), psi);
    }
}

#[test]
fn dpm_identity_carries_no_sign() {
    // With a ∓ sign on the right-hand side the minus identity would force the
    // cyclic sum Σ g(D⁻_{ι₋X}Y, Z) to vanish, since the unsigned one holds.
    let cs = CoordSystem::new(2).unwrap();
    let mut g = Generator::new(cs, 11);
    let f = g.field(Support::Base, 1);
    let (_, dm) = induced_l_connections(&vtc_connection(&f).unwrap(), &f);
    let (x, y, z) = (g.l_components(Support::Base, 1), g.l_components(Support::Base, 1), g.l_components(Support::Base, 1));
    assert!(dpm_cyclic_residual(Sign::Minus, &dm, &f, &x, &y, &z).is_zero());
    let zero = vec![ScalarExpr::zero(); 2];
    let term = |a: &[ScalarExpr], b: &[ScalarExpr], c: &[ScalarExpr]| {
        let ia = iota(Sign::Minus, &VectorField::from_parts(cs, a, &zero).unwrap(), &f).unwrap();
        f.g().bilinear(&dm.along(&ia, b), c)
    };
    let cyclic = &(&term(&x, &y, &z) + &term(&y, &z, &x)) + &term(&z, &x, &y);
    assert!(!cyclic.is_zero());
}

#[test]
fn scalar_curvature_is_basis_independent() {
    let cs = CoordSystem::new(2).unwrap();
    let mut g = Generator::new(cs, 5);
    let f = g.field(Support::Base, 1);
    let vtc = vtc_connection(&f).unwrap();
    let t = curvature_tensor(&vtc);
    let [a, b] = default_seeds(2);
    for _ in 0..4 {
        let pt: Vec<_> = (0..4).map(|_| g.rational(1, 4)).collect();
        let (ka, _) = scalar_curvature_with_seed(&t, &f, &pt, &a).unwrap();
        let (kb, _) = scalar_curvature_with_seed(&t, &f, &pt, &b).unwrap();
        assert!((ka - kb).abs() <= 1e-9 * ka.abs().max(1.0));
        assert!((scalar_curvature(&vtc, &f, &pt).unwrap() - ka).abs() <= 1e-9 * ka.abs().max(1.0));
    }
}

#[test]
fn levi_civita_of_a_warped_metric() {
    let cs = CoordSystem::new(2).unwrap();
    let p = |s: &str| parse_scalar(s, &cs).unwrap();
    let gm = Matrix::from_rows(vec![vec![p("1 + x1^2"), p("0")], vec![p("0"), p("1")]]).unwrap();
    let f = FieldSpec::with_metric(cs, gm, Matrix::zeros(2, 2), ScalarExpr::zero()).unwrap();
    let gamma = levi_civita_l(&f);
    // Γ^1_{11} = x1/(1 + x1²); every other symbol vanishes.
    let idx = |u: usize, b: usize, a: usize| (u * 2 + b) * 2 + a;
    assert_eq!(gamma[idx(0, 0, 0)], p("x1/(1 + x1^2)"));
    assert!((0..8).filter(|&k| k != idx(0, 0, 0)).all(|k| gamma[k].is_zero()));
}

#[test]
fn action_vanishes_for_constant_fields() {
    let cs = CoordSystem::new(2).unwrap();
    let f = Generator::new(cs, 3).constant_field();
    let a = action_value(&f, ActionKind::Vtc, &BoxDomain::unit(&cs), 4).unwrap();
    assert!(a.abs() < 1e-12);
}

#[test]
fn gamma_preservation_is_required() {
    let cs = CoordSystem::new(2).unwrap();
    let bad = Connection::from_fn(cs, |u, v, w| if (u, v, w) == (0, 0, 2) { ScalarExpr::one() } else { ScalarExpr::zero() });
    assert!(!bad.preserves_gamma());
    let x = VectorField::frame(cs, 0);
    assert!(gualtieri_torsion(&bad, &x, &x, &x).is_err());
    assert!(scalar_curvature(&bad, &FieldSpec::flat(cs), &vec![g0(); 4]).is_err());
}

fn g0() -> num_rational::BigRational {
    num_rational::BigRational::from_integer(0.into())
}
