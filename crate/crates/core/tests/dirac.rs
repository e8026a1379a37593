use doublegeom::dirac::*;
use doublegeom::genmetric::build_h;
use doublegeom::random::{Generator, Support};
use doublegeom::symcore::CoordSystem;
use doublegeom::tensor::{Matrix, VectorField};

#[test]
fn graph_isometry_routes_agree() {
    for m in 2..=3 {
        let cs = CoordSystem::new(m).unwrap();
        for seed in 0..6 {
            let mut gen = Generator::new(cs, 40 + seed);
            let f = gen.field(Support::Base, 1);
            let theta = gen.constant_antisymmetric();
            let d = graph_dirac(cs, GraphKind::TwoForm, &theta).unwrap();
            assert_eq!(j_from_graph(GraphKind::TwoForm, &theta, &f).unwrap(), isometry_from_dirac(&d, &f).unwrap());
            let p = gen.constant_antisymmetric();
            let d = graph_dirac(cs, GraphKind::Bivector, &p).unwrap();
            assert_eq!(j_from_graph(GraphKind::Bivector, &p, &f).unwrap(), isometry_from_dirac(&d, &f).unwrap(), "m={m} seed={seed}");
        }
    }
}

#[test]
fn isometry_round_trip() {
    let cs = CoordSystem::new(3).unwrap();
    for seed in 0..8 {
        let mut gen = Generator::new(cs, seed);
        let f = gen.constant_field();
        let j = IsometryJ::new(gen.orthogonal(f.g()), f.g()).unwrap();
        let d = dirac_from_isometry(&j, &f).unwrap();
        assert!(d.is_isotropic());
        assert_eq!(isometry_from_dirac(&d, &f).unwrap(), j);
        let (e, varpi) = d.reconstruction_data();
        assert!(varpi.is_antisymmetric());
        assert!(reconstruct(cs, &e, &varpi).unwrap().same_subbundle(&d));
    }
}

#[test]
fn orthogonal_complement_is_phi_image() {
    let cs = CoordSystem::new(2).unwrap();
    for seed in 0..6 {
        let mut gen = Generator::new(cs, 100 + seed);
        let f = gen.field(Support::Base, 1);
        let d = graph_dirac(cs, GraphKind::TwoForm, &gen.antisymmetric(Support::Base, 1)).unwrap();
        let h = build_h(&f);
        let perp = h_orthogonal(&d, &f).unwrap();
        let image: Vec<VectorField> = d.span().iter().map(|x| h.apply_phi(x)).collect();
        let image = ParaDirac::new(cs, image).unwrap();
        assert!(perp.same_subbundle(&image));
        for x in d.span() {
            for y in perp.span() {
                assert!(h.pair(x, y).is_zero());
            }
        }
        let psi = almost_product(&d, &f).unwrap();
        assert_eq!(&psi * &psi, Matrix::identity(4));
    }
}

#[test]
fn psi_triple_matches_almost_product() {
    for m in 2..=3 {
        let cs = CoordSystem::new(m).unwrap();
        for seed in 0..5 {
            let mut gen = Generator::new(cs, 7 * seed + m as u64);
            let f = gen.constant_field();
            let j = IsometryJ::new(gen.orthogonal(f.g()), f.g()).unwrap();
            let d = dirac_from_isometry(&j, &f).unwrap();
            let t = psi_triple(&d, &f).unwrap();
            assert!(t.invariants_hold());
            assert_eq!(t.psi(), almost_product(&d, &f).unwrap());
        }
    }
}

fn two_of_three(a: bool, b: bool, c: bool) {
    if [a, b, c].iter().filter(|&&t| t).count() >= 2 {
        assert!(a && b && c, "integrable={a} foliation={b} geodesic={c}");
    }
}

#[test]
fn criteria_agree_on_graphs() {
    let cs = CoordSystem::new(3).unwrap();
    for seed in 0..6 {
        let mut gen = Generator::new(cs, 300 + seed);
        let theta = gen.antisymmetric(Support::Base, 1);
        let closed = d_l_two_form(&cs, &theta).iter().all(|c| c.is_zero());
        let d = graph_dirac(cs, GraphKind::TwoForm, &theta).unwrap();
        for c in Criterion::ALL {
            assert_eq!(check_integrability(&d, c).unwrap(), closed, "θ criterion {}", c.label());
        }
        two_of_three(closed, is_lie_involutive(&d), is_totally_geodesic(&d));

        let p = gen.antisymmetric(Support::Base, 1);
        let poisson = schouten_pp(&cs, &p).iter().all(|c| c.is_zero());
        let d = graph_dirac(cs, GraphKind::Bivector, &p).unwrap();
        for c in Criterion::GENERAL {
            assert_eq!(check_integrability(&d, c).unwrap(), poisson, "P criterion {}", c.label());
        }
    }
}

#[test]
fn rank_and_shape_errors() {
    let cs = CoordSystem::new(2).unwrap();
    let x = VectorField::frame(cs, 0);
    assert!(ParaDirac::new(cs, vec![x.clone(), x.clone()]).is_err());
    assert!(ParaDirac::new(cs, vec![x]).is_err());
    let non_iso = ParaDirac::new(cs, vec![VectorField::frame(cs, 0), VectorField::frame(cs, 2)]).unwrap();
    assert!(!non_iso.is_isotropic());
    assert!(check_integrability(&non_iso, Criterion::Bracket).is_err());
    assert!(graph_dirac(cs, GraphKind::TwoForm, &Matrix::identity(2)).is_err());
}

#[test]
fn criteria_agree_on_non_foliated_structures() {
    let cs = CoordSystem::new(2).unwrap();
    for seed in 0..6 {
        let mut gen = Generator::new(cs, 500 + seed);
        let d = graph_dirac(cs, GraphKind::TwoForm, &gen.antisymmetric(Support::All, 1)).unwrap();
        let verdicts: Vec<bool> = Criterion::GENERAL.iter().map(|&c| check_integrability(&d, c).unwrap()).collect();
        assert!(verdicts.iter().all(|&v| v == verdicts[0]), "seed {seed}: {verdicts:?}");

        let f = gen.field(Support::Base, 1);
        let j = IsometryJ::new(gen.orthogonal(f.g()), f.g()).unwrap();
        let d = dirac_from_isometry(&j, &f).unwrap();
        let verdicts: Vec<bool> = Criterion::ALL.iter().map(|&c| check_integrability(&d, c).unwrap()).collect();
        assert!(verdicts.iter().all(|&v| v == verdicts[0]), "seed {seed}: {verdicts:?}");
    }
}

#[test]
fn bracket_criterion_is_function_linear_on_isotropic_spans() {
    let cs = CoordSystem::new(2).unwrap();
    let mut gen = Generator::new(cs, 77);
    let d = graph_dirac(cs, GraphKind::TwoForm, &gen.antisymmetric(Support::All, 1)).unwrap();
    let f = gen.poly(Support::All, 2, 3);
    let s = d.span();
    for x in s {
        for y in s {
            for z in s {
                let fy = y.scale(&f);
                let lhs = criterion_residual(Criterion::Bracket, x, &fy, z);
                let rhs = &f * &criterion_residual(Criterion::Bracket, x, y, z);
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn two_of_three_on_curated_instances() {
    let cs = CoordSystem::new(3).unwrap();
    let mut gen = Generator::new(cs, 9);
    let mut instances = vec![
        graph_dirac(cs, GraphKind::TwoForm, &Matrix::zeros(3, 3)).unwrap(),
        graph_dirac(cs, GraphKind::Bivector, &Matrix::zeros(3, 3)).unwrap(),
        graph_dirac(cs, GraphKind::TwoForm, &gen.constant_antisymmetric()).unwrap(),
        graph_dirac(cs, GraphKind::Bivector, &gen.constant_antisymmetric()).unwrap(),
    ];
    for _ in 0..3 {
        instances.push(graph_dirac(cs, GraphKind::TwoForm, &gen.antisymmetric(Support::Base, 1)).unwrap());
        instances.push(graph_dirac(cs, GraphKind::Bivector, &gen.antisymmetric(Support::Base, 1)).unwrap());
    }
    let mut full = 0;
    for d in &instances {
        let integrable = check_integrability(d, Criterion::Bracket).unwrap();
        let (fol, geo) = (is_lie_involutive(d), is_totally_geodesic(d));
        two_of_three(integrable, fol, geo);
        full += (integrable && fol && geo) as usize;
    }
    assert!(full >= 4);
}
