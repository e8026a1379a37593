//! Para-Dirac structures and densities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use super::{batch, Ctx, Tally};
use crate::density::{self, AffineChange, Density};
use crate::dirac::{
    self,
    almost_product, check_integrability, d_l_two_form, dirac_from_isometry, graph_dirac, h_orthogonal,
    is_lie_involutive, is_totally_geodesic, isometry_from_dirac, j_from_graph, reconstruct,
    schouten_pp, Criterion, GraphKind, IsometryJ, ParaDirac,
};
use crate::genmetric::build_h;
use crate::random::{Generator, Support};
use crate::symcore::{full_point, parse_scalar, CoordSystem, ScalarExpr};
use crate::tensor::{Matrix, VectorField};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `θ_ij = ∂_i a_j − ∂_j a_i`, a `d_L`-exact two-form.
fn exact_two_form(g: &mut Generator) -> Matrix {
    let cs = *g.cs();
    let a: Vec<ScalarExpr> = (0..cs.m()).map(|_| g.poly(Support::Base, 2, 3)).collect();
    Matrix::from_fn(cs.m(), cs.m(), |i, j| &a[j].diff(cs.var(i)) - &a[i].diff(cs.var(j)))
}

fn verdicts(t: &mut Tally, d: &ParaDirac, mut expected: Option<bool>) {
    let set: &[Criterion] = if d.is_strongly_foliated() { &Criterion::ALL } else { &Criterion::GENERAL };
    for &c in set {
        match check_integrability(d, c) {
            Ok(v) => {
                let want = *expected.get_or_insert(v);
                t.holds(v == want, || format!("criterion {} gives {v}, expected {want}", c.label()));
            }
            Err(e) => t.error(e),
        }
    }
}

pub(super) fn dirac_criteria(ctx: &Ctx) -> Tally {
    batch(ctx.pick(4, 30), |i, t| {
        let mut g = ctx.gen(2 + i % 2, "dirac-criteria", i);
        let cs = *g.cs();
        match i % 4 {
            0 => {
                let theta = g.antisymmetric(Support::Base, 1);
                let closed = d_l_two_form(&cs, &theta).iter().all(ScalarExpr::is_zero);
                verdicts(t, &graph_dirac(cs, GraphKind::TwoForm, &theta).expect("graph"), Some(closed));
            }
            1 => {
                let p = g.antisymmetric(Support::Base, 1);
                let poisson = schouten_pp(&cs, &p).iter().all(ScalarExpr::is_zero);
                verdicts(t, &graph_dirac(cs, GraphKind::Bivector, &p).expect("graph"), Some(poisson));
            }
            2 => verdicts(t, &graph_dirac(cs, GraphKind::TwoForm, &g.antisymmetric(Support::All, 1)).expect("graph"), None),
            _ => {
                let f = g.field(Support::Base, 1);
                let j = IsometryJ::new(g.orthogonal(f.g()), f.g()).expect("orthogonal");
                match dirac_from_isometry(&j, &f) {
                    Ok(d) => verdicts(t, &d, None),
                    Err(e) => t.error(e),
                }
            }
        }
    })
}

pub(super) fn graph_closedness(ctx: &Ctx) -> Tally {
    batch(ctx.pick(2, 6), |i, t| {
        let mut g = ctx.gen(3, "graph-closedness", i);
        let cs = *g.cs();
        let theta = if i % 2 == 0 { exact_two_form(&mut g) } else { g.antisymmetric(Support::Base, 1) };
        let closed = d_l_two_form(&cs, &theta).iter().all(ScalarExpr::is_zero);
        if i % 2 == 0 {
            t.holds(closed, || "d_L of an exact form is nonzero".into());
        }
        verdicts(t, &graph_dirac(cs, GraphKind::TwoForm, &theta).expect("graph"), Some(closed));
    })
}

pub(super) fn graph_poisson(ctx: &Ctx) -> Tally {
    batch(ctx.pick(2, 6), |i, t| {
        let mut g = ctx.gen(2 + i % 2, "graph-poisson", i);
        let cs = *g.cs();
        let p = match i % 3 {
            0 => g.constant_antisymmetric(),
            _ => g.antisymmetric(Support::Base, 1),
        };
        let poisson = schouten_pp(&cs, &p).iter().all(ScalarExpr::is_zero);
        if i % 3 == 0 || cs.m() == 2 {
            t.holds(poisson, || "[P,P] of a constant or planar bivector is nonzero".into());
        }
        verdicts(t, &graph_dirac(cs, GraphKind::Bivector, &p).expect("graph"), Some(poisson));
    })
}

pub(super) fn isometry_round_trip(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 20), |i, t| {
        let mut g = ctx.gen(2 + i % 2, "isometry-round-trip", i);
        let cs = *g.cs();
        let f = g.constant_field();
        let j = IsometryJ::new(g.orthogonal(f.g()), f.g()).expect("orthogonal");
        let d = match dirac_from_isometry(&j, &f) {
            Ok(d) => d,
            Err(e) => return t.error(e),
        };
        t.holds(d.is_isotropic(), || "D_J is not isotropic".into());
        match isometry_from_dirac(&d, &f) {
            Ok(back) => t.holds(back == j, || "J_D ≠ J".into()),
            Err(e) => t.error(e),
        }
        let (e, varpi) = d.reconstruction_data();
        t.holds(varpi.is_antisymmetric(), || "ϖ is not antisymmetric".into());
        match reconstruct(cs, &e, &varpi) {
            Ok(r) => t.holds(r.same_subbundle(&d), || "(E, ϖ) does not rebuild D".into()),
            Err(e) => t.error(e),
        }
    })
}

pub(super) fn graph_isometry(ctx: &Ctx) -> Tally {
    batch(ctx.pick(2, 20), |i, t| {
        let mut g = ctx.gen(2 + i % 2, "graph-isometry", i);
        let cs = *g.cs();
        let f = g.field(Support::Base, 1);
        let kind = if i % 2 == 0 { GraphKind::TwoForm } else { GraphKind::Bivector };
        let m = g.constant_antisymmetric();
        match (j_from_graph(kind, &m, &f), graph_dirac(cs, kind, &m).and_then(|d| isometry_from_dirac(&d, &f))) {
            (Ok(a), Ok(b)) => t.holds(a == b, || format!("{kind:?}: closed-form J differs from the Ψ route")),
            (Err(e), _) | (_, Err(e)) => t.error(e),
        }
    })
}

pub(super) fn phi_orthogonal(ctx: &Ctx) -> Tally {
    batch(ctx.pick(2, 10), |i, t| {
        let mut g = ctx.gen(2, "phi-orthogonal", i);
        let cs = *g.cs();
        let f = g.field(Support::Base, 1);
        let d = graph_dirac(cs, GraphKind::TwoForm, &g.antisymmetric(Support::Base, 1)).expect("graph");
        let h = build_h(&f);
        let perp = match h_orthogonal(&d, &f) {
            Ok(p) => p,
            Err(e) => return t.error(e),
        };
        let image = ParaDirac::new(cs, d.span().iter().map(|x| h.apply_phi(x)).collect()).expect("Φ is invertible");
        t.holds(perp.same_subbundle(&image), || "D^⊥ ≠ Φ(D)".into());
        for x in d.span() {
            for y in perp.span() {
                t.exact(&h.pair(x, y));
            }
        }
        match almost_product(&d, &f) {
            Ok(psi) => t.holds(&psi * &psi == Matrix::identity(2 * cs.m()), || "Ψ² ≠ Id".into()),
            Err(e) => t.error(e),
        }
    })
}

pub(super) fn psi_triple(ctx: &Ctx) -> Tally {
    batch(ctx.pick(2, 20), |i, t| {
        let mut g = ctx.gen(2 + i % 2, "psi-triple", i);
        let f = g.constant_field();
        let j = IsometryJ::new(g.orthogonal(f.g()), f.g()).expect("orthogonal");
        let d = match dirac_from_isometry(&j, &f) {
            Ok(d) => d,
            Err(e) => return t.error(e),
        };
        match (dirac::psi_triple(&d, &f), almost_product(&d, &f)) {
            (Ok(tr), Ok(psi)) => {
                t.holds(tr.invariants_hold(), || "triple invariants fail".into());
                t.holds(tr.psi() == psi, || "triple does not reassemble Ψ".into());
            }
            (Err(e), _) | (_, Err(e)) => t.error(e),
        }
    })
}

/// Any two of integrability, Lie closure and total geodesy imply the third.
pub(super) fn two_of_three(ctx: &Ctx) -> Tally {
    batch(ctx.pick(4, 10), |i, t| {
        let mut g = ctx.gen(3, "two-of-three", i);
        let cs = *g.cs();
        let d = match i % 4 {
            0 => graph_dirac(cs, GraphKind::TwoForm, &g.constant_antisymmetric()),
            1 => graph_dirac(cs, GraphKind::Bivector, &g.constant_antisymmetric()),
            2 => graph_dirac(cs, GraphKind::TwoForm, &g.antisymmetric(Support::Base, 1)),
            _ => graph_dirac(cs, GraphKind::Bivector, &g.antisymmetric(Support::Base, 1)),
        }
        .expect("graph");
        match check_integrability(&d, Criterion::Bracket) {
            Ok(a) => {
                let (b, c) = (is_lie_involutive(&d), is_totally_geodesic(&d));
                let held = [a, b, c].iter().filter(|&&v| v).count();
                t.holds(held < 2 || held == 3, || format!("integrable={a} foliation={b} geodesic={c}"));
            }
            Err(e) => t.error(e),
        }
    })
}

/// Hand-computed `𝔏_X θ` on `m = 2`: (base, tilde, ϑ, s, expected ϑ').
const LIE_CASES: [(&[&str; 2], &[&str; 2], &str, (i64, i64), &str); 10] = [
    (&["x1", "0"], &["0", "0"], "1", (1, 1), "1"),
    (&["1", "0"], &["0", "0"], "x1^2*x2", (1, 1), "2*x1*x2"),
    (&["x1", "x2"], &["0", "0"], "1", (2, 1), "4"),
    (&["x2", "x1"], &["0", "0"], "x1", (1, 1), "x2"),
    (&["x1^2", "0"], &["0", "0"], "x2", (-1, 1), "-2*x1*x2"),
    (&["x1", "0"], &["1", "0"], "x1", (1, 1), "2*x1"),
    (&["0", "1"], &["0", "0"], "1/(1 + x2^2)", (3, 1), "-2*x2/(1 + x2^2)^2"),
    (&["x1*x2", "0"], &["0", "0"], "x1", (1, 2), "3/2*x1*x2"),
    (&["0", "x2"], &["0", "0"], "x2^2", (-2, 1), "0"),
    (&["0", "1"], &["0", "0"], "x2", (0, 1), "1"),
];

pub(super) fn lie_density(ctx: &Ctx) -> Tally {
    let cs = CoordSystem::new(2).expect("m");
    let p = |s: &str| parse_scalar(s, &cs).expect("fixed input");
    batch(ctx.pick(3, LIE_CASES.len()), |i, t| {
        let (base, tilde, theta, (sn, sd), expected) = LIE_CASES[i];
        let x = VectorField::from_parts(cs, &base.map(p), &tilde.map(p)).expect("m components");
        let d = Density::new(cs, q(sn, sd), p(theta));
        match density::lie_density(&x, &d) {
            Ok(r) => t.exact(&(r.theta() - &p(expected))),
            Err(e) => t.error(e),
        }
    })
}

fn invertible_integer(g: &mut Generator, n: usize) -> Vec<Vec<BigRational>> {
    loop {
        let rows: Vec<Vec<BigRational>> = (0..n).map(|_| (0..n).map(|_| q(g.int(-2, 2), 1)).collect()).collect();
        let m = Matrix::from_fn(n, n, |i, j| ScalarExpr::from_rational(rows[i][j].clone()));
        if !m.det().is_zero() {
            return rows;
        }
    }
}

fn small_offset(g: &mut Generator, n: usize) -> Vec<BigRational> {
    (0..n).map(|_| q(g.int(-2, 2), 1)).collect()
}

/// Locally affine changes commute with `𝔏_X`; general affine changes
/// rescale `ϑ` by `|det ψ|^s`, checked pointwise.
pub(super) fn affine_equivariance(ctx: &Ctx) -> Tally {
    batch(ctx.pick(4, 10), |i, t| {
        let mut g = ctx.gen(2, "affine-equivariance", i);
        let cs = *g.cs();
        let m = cs.m();
        let s = q([-1, 0, 1, 2][i % 4], 1);
        let theta = g.poly(Support::Base, 2, 3);
        let d = Density::new(cs, s.clone(), theta.clone());
        if i % 2 == 0 {
            let alpha = invertible_integer(&mut g, m);
            let change = AffineChange::locafin(cs, &alpha, &small_offset(&mut g, m), &small_offset(&mut g, m)).expect("invertible α");
            t.holds(change.is_locafin(), || "locafin constructor gave a mixed change".into());
            let x = g.vector(Support::Base, 1);
            let lhs = density::lie_density(&x, &d).and_then(|l| l.transform(&change));
            let rhs = change.push_vector(&x).and_then(|px| d.transform(&change).and_then(|pd| density::lie_density(&px, &pd)));
            match (lhs, rhs) {
                (Ok(a), Ok(b)) => t.exact(&(a.theta() - b.theta())),
                (Err(e), _) | (_, Err(e)) => t.error(e),
            }
        } else {
            let rows = invertible_integer(&mut g, cs.dim());
            let offset = small_offset(&mut g, cs.dim());
            let change = AffineChange::new(cs, rows.clone(), offset.clone()).expect("invertible");
            let det = Matrix::from_fn(cs.dim(), cs.dim(), |a, b| ScalarExpr::from_rational(rows[a][b].clone()))
                .det()
                .as_constant()
                .expect("constant");
            // ψ = M⁻¹, so |det ψ|^s = |det M|^{-s}.
            let factor = num_traits::pow(det.abs().recip(), s.numer().magnitude().try_into().expect("small"));
            let factor = if s.is_negative() { factor.recip() } else { factor };
            let new_pt: Vec<BigRational> = (0..cs.dim()).map(|_| g.rational(3, 2)).collect();
            let old_pt: Vec<BigRational> = (0..cs.dim())
                .map(|a| &offset[a] + rows[a].iter().zip(&new_pt).map(|(c, x)| c * x).sum::<BigRational>())
                .collect();
            match d.transform(&change) {
                Ok(nd) => {
                    let lhs = nd.theta().eval(&full_point(&new_pt, &cs).expect("dim")).expect("polynomial");
                    let rhs = factor * theta.eval(&full_point(&old_pt, &cs).expect("dim")).expect("polynomial");
                    t.holds(lhs == rhs, || format!("ϑ' = {lhs}, expected {rhs}"));
                }
                Err(e) => t.error(e),
            }
        }
    })
}

/// `det(αᵀ (g∘old) α) = det(α)² (det g)∘old` under locally affine changes.
pub(super) fn det_g_weight(ctx: &Ctx) -> Tally {
    batch(ctx.pick(2, 10), |i, t| {
        let mut g = ctx.gen(2 + i % 2, "det-g-weight", i);
        let cs = *g.cs();
        let m = cs.m();
        let f = g.field(Support::Base, 1);
        let alpha = invertible_integer(&mut g, m);
        let change = AffineChange::locafin(cs, &alpha, &small_offset(&mut g, m), &small_offset(&mut g, m)).expect("invertible α");
        let a = Matrix::from_fn(m, m, |r, c| ScalarExpr::from_rational(alpha[r][c].clone()));
        let pulled = f.g().map(|e| change.pull_scalar(e).expect("polynomial change"));
        let new_g = &(&a.transpose() * &pulled) * &a;
        let det_a = a.det();
        let rhs = &(&det_a * &det_a) * &change.pull_scalar(&f.g().det()).expect("polynomial change");
        t.exact(&(&new_g.det() - &rhs));
    })
}
