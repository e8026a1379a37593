//! Generalized-metric and connection identities.

use num_rational::BigRational;

use super::{batch, Ctx, Tally};
use crate::algebroid::d_operator;
use crate::connection::{
    action_value, bianchi_residual, curvature_tensor, cwt_connection, cwt_l_connections, default_seeds,
    dpm_cyclic_residual, gualtieri_torsion, induced_l_connections, scalar_curvature_expr, scalar_curvature_with_seed,
    sigma, vtc_connection, vtc_deformation, vtc_rhs, ActionKind, BoxDomain, Connection,
};
use crate::density::{covariant_derivative, induced_density_connection, volume_density};
use crate::genmetric::{build_h, iota, killing_report, recover_field, FieldSpec, Sign};
use crate::random::{Generator, Support};
use crate::symcore::{full_point, parse_scalar, CoordSystem, ScalarExpr};
use crate::tensor::{gamma, Matrix, VectorField};

const SIGNS: [Sign; 2] = [Sign::Plus, Sign::Minus];

fn sign_expr(s: Sign) -> ScalarExpr {
    ScalarExpr::from_int(s.factor())
}

fn mat(cs: &CoordSystem, rows: &[&[&str]]) -> Matrix {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| parse_scalar(s, cs).expect("fixed input")).collect()).collect())
        .expect("rectangular")
}

/// Level-matched random fields shared by the cases of one batch.
fn fields(ctx: &Ctx, label: &str, m: usize, n: usize) -> Vec<FieldSpec> {
    (0..n).map(|k| ctx.gen(m, label, 10_000 + k).field(Support::Base, 1)).collect()
}

fn with_connections(fs: Vec<FieldSpec>, build: fn(&FieldSpec) -> crate::Result<Connection>) -> Vec<(FieldSpec, Connection)> {
    fs.into_iter().map(|f| {
        let c = build(&f).expect("canonical connection of a nondegenerate field");
        (f, c)
    }).collect()
}

fn l_field(g: &mut Generator, support: Support, degree: u32) -> VectorField {
    g.l_vector(support, degree)
}

pub(super) fn splitting_norms(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 50), |i, t| {
        let mut g = ctx.gen(2 + i % 2, "splitting-norms", i);
        let f = g.field(Support::All, 1);
        let h = build_h(&f);
        let (x, y) = (l_field(&mut g, Support::All, 1), l_field(&mut g, Support::All, 1));
        let gxy = f.g().bilinear(x.base(), y.base());
        for s in SIGNS {
            let (ix, iy) = (iota(s, &x, &f).expect("in L"), iota(s, &y, &f).expect("in L"));
            let two = &ScalarExpr::from_int(2) * &gxy;
            t.exact(&(&h.pair(&ix, &iy) - &two));
            t.exact(&(&gamma(&ix, &iy) - &(&sign_expr(s) * &two)));
        }
        let (px, my) = (iota(Sign::Plus, &x, &f).expect("in L"), iota(Sign::Minus, &y, &f).expect("in L"));
        t.exact(&h.pair(&px, &my));
        t.exact(&gamma(&px, &my));
    })
}

pub(super) fn h_description(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 50), |i, t| {
        let mut g = ctx.gen(2 + i % 2, "h-description", i);
        let f = g.field(Support::All, 1);
        let h = build_h(&f);
        let (z, u) = (g.vector(Support::All, 1), g.vector(Support::All, 1));
        // ♭_B X = i(X)B is the matrix −BX.
        let rz: Vec<ScalarExpr> = f.b().mul_vec(z.base()).iter().zip(z.tilde()).map(|(bx, a)| -&(bx + a)).collect();
        let ru: Vec<ScalarExpr> = f.b().mul_vec(u.base()).iter().zip(u.tilde()).map(|(bx, a)| -&(bx + a)).collect();
        let expect = &f.g().bilinear(z.base(), u.base()) + &f.g_inv().bilinear(&rz, &ru);
        t.exact(&(&h.pair(&z, &u) - &expect));
    })
}

pub(super) fn phi_eigenstructure(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 50), |i, t| {
        let mut g = ctx.gen(2 + i % 2, "phi-eigenstructure", i);
        let f = g.field(Support::All, 1);
        let h = build_h(&f);
        let x = l_field(&mut g, Support::All, 1);
        for s in SIGNS {
            let ix = iota(s, &x, &f).expect("in L");
            t.vector(&(&h.apply_phi(&ix) - &ix.scale(&sign_expr(s))));
        }
    })
}

pub(super) fn phi_compatibility(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 50), |i, t| {
        let mut g = ctx.gen(2 + i % 2, "phi-compatibility", i);
        let f = g.field(Support::All, 1);
        let h = build_h(&f);
        let (z, u) = (g.vector(Support::All, 1), g.vector(Support::All, 1));
        let (pz, pu) = (h.apply_phi(&z), h.apply_phi(&u));
        t.vector(&(&h.apply_phi(&pz) - &z));
        t.exact(&(&gamma(&pz, &pu) - &gamma(&z, &u)));
        t.exact(&(&h.pair(&pz, &pu) - &h.pair(&z, &u)));
        t.exact(&(&h.pair(&pz, &u) - &gamma(&z, &u)));
        t.exact(&(&h.pair(&z, &u) - &gamma(&pz, &u)));
        t.exact(&(&h.h().det() - &ScalarExpr::one()));
    })
}

pub(super) fn field_round_trip(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 50), |i, t| {
        let mut g = ctx.gen(2 + i % 2, "field-round-trip", i);
        let f = if i % 2 == 0 { g.constant_field() } else { g.field(Support::All, 1) };
        let h = build_h(&f);
        match recover_field(&h) {
            Ok(back) => {
                t.holds(back.g() == f.g() && back.b() == f.b(), || "recovered (g, B) differ".into());
                t.holds(build_h(&back) == h, || "ℋ rebuilt from the recovered field differs".into());
            }
            Err(e) => t.error(e),
        }
    })
}

pub(super) fn killing_criterion(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 30), |i, t| {
        let mut g = ctx.gen(2, "killing-criterion", i);
        let cs = *g.cs();
        let f = if i % 3 == 0 { g.constant_field() } else { g.field(Support::Base, 1) };
        let x = match i % 3 {
            0 => VectorField::frame(cs, i % cs.m()),
            1 => d_operator(cs, &g.poly(Support::Base, 3, 3)),
            _ => g.vector(Support::Base, 1),
        };
        match killing_report(&x, &f) {
            Ok(r) => {
                t.holds(r.generalized == r.classical, || format!("direct {} vs via L {}", r.generalized, r.classical));
                if i % 3 != 2 {
                    t.holds(r.generalized, || "translation or ∂f is not generalized Killing".into());
                }
            }
            Err(e) => t.error(e),
        }
    })
}

pub(super) fn double_metric(ctx: &Ctx) -> Tally {
    batch(ctx.pick(1, 5), |i, t| {
        let f = ctx.gen(2 + i % 2, "double-metric", i).field(Support::Base, 1);
        let h = build_h(&f);
        for build in [cwt_connection, vtc_connection] {
            match build(&f) {
                Ok(c) => {
                    t.holds(c.preserves_gamma(), || "connection does not preserve γ".into());
                    t.holds(c.preserves_metric(h.h()), || "connection does not preserve ℋ".into());
                }
                Err(e) => t.error(e),
            }
        }
        if let Ok((dp, dm)) = cwt_l_connections(&f) {
            t.holds(dp.preserves_metric(f.g()) && dm.preserves_metric(f.g()), || "D± do not preserve g".into());
        }
    })
}

pub(super) fn mixed_torsion_cwt(ctx: &Ctx) -> Tally {
    let n = ctx.pick(3, 50);
    let set = with_connections(fields(ctx, "mixed-torsion-cwt", 2, ctx.pick(1, 5)), cwt_connection);
    let patterns = [[0, 0, 1], [0, 1, 0], [1, 0, 0], [1, 1, 0], [1, 0, 1], [0, 1, 1]];
    batch(n, |i, t| {
        let (f, c) = &set[i % set.len()];
        let mut g = ctx.gen(2, "mixed-torsion-cwt", i);
        let args: Vec<VectorField> = patterns[i % 6]
            .iter()
            .map(|&s| iota(SIGNS[s], &l_field(&mut g, Support::Base, 1), f).expect("in L"))
            .collect();
        match gualtieri_torsion(c, &args[0], &args[1], &args[2]) {
            Ok(r) => t.exact(&r),
            Err(e) => t.error(e),
        }
    })
}

/// `2g(D_X Y, Z) = X g(Y,Z) + Y g(Z,X) − Z g(X,Y) + g([X,Y],Z) − g([Y,Z],X) + g([Z,X],Y)`
/// for `g = diag(1 + x1², 1)`, `B = x2 dx^1∧dx^2`, compared at rational points.
pub(super) fn levi_civita_oracle(ctx: &Ctx) -> Tally {
    let cs = CoordSystem::new(2).expect("m");
    let f = FieldSpec::with_metric(
        cs,
        mat(&cs, &[&["1 + x1^2", "0"], &["0", "1"]]),
        mat(&cs, &[&["0", "x2"], &["-x2", "0"]]),
        ScalarExpr::zero(),
    )
    .expect("Riemannian");
    let (dp, dm) = cwt_l_connections(&f).expect("nondegenerate");
    let gm = f.g();
    let gp = |a: &VectorField, b: &VectorField| gm.bilinear(a.base(), b.base());
    batch(ctx.pick(2, 5), |i, t| {
        let mut g = ctx.gen(2, "levi-civita-oracle", i);
        let (x, y, z) = (l_field(&mut g, Support::Base, 2), l_field(&mut g, Support::Base, 2), l_field(&mut g, Support::Base, 2));
        let koszul = &(&(&(&(&x.apply(&gp(&y, &z)) + &y.apply(&gp(&z, &x))) - &z.apply(&gp(&x, &y)))
            + &gp(&x.lie_bracket(&y), &z))
            - &gp(&y.lie_bracket(&z), &x))
            + &gp(&z.lie_bracket(&x), &y);
        let point: Vec<BigRational> = (0..cs.dim()).map(|_| g.rational(3, 2)).collect();
        let full = full_point(&point, &cs).expect("dimension");
        let oracle = koszul.half().eval(&full).expect("no pole");
        for d in [&dp, &dm] {
            let dxy = d.along(&x, y.base());
            let value = gm.bilinear(&dxy, z.base()).eval(&full).expect("no pole");
            t.holds(value == oracle, || format!("g(D_X Y, Z) = {value}, Koszul gives {oracle}"));
        }
    })
}

pub(super) fn vtc_torsion(ctx: &Ctx) -> Tally {
    let per = ctx.pick(3, 20);
    let set = with_connections(fields(ctx, "vtc-torsion", 2, ctx.pick(1, 5)), vtc_connection);
    batch(per * set.len(), |i, t| {
        let (_, c) = &set[i / per];
        let mut g = ctx.gen(2, "vtc-torsion", i);
        let (x, y, z) = (g.vector(Support::All, 1), g.vector(Support::All, 1), g.vector(Support::All, 1));
        match gualtieri_torsion(c, &x, &y, &z) {
            Ok(r) => t.exact(&r),
            Err(e) => t.error(e),
        }
    })
}

pub(super) fn vtc_skew(ctx: &Ctx) -> Tally {
    batch(ctx.pick(1, 5), |i, t| {
        let mut g = ctx.gen(2 + i % 2, "vtc-skew", i);
        let f = g.field(Support::Base, 1);
        match vtc_deformation(&f) {
            Ok(d) => t.holds(d.totally_antisymmetric(), || "VTC deformation is not totally antisymmetric".into()),
            Err(e) => t.error(e),
        }
        let k = g.constant_field();
        match (vtc_connection(&k), cwt_connection(&k)) {
            (Ok(v), Ok(c)) => t.holds(v == c, || "VTC ≠ CWT for a constant field".into()),
            (Err(e), _) | (_, Err(e)) => t.error(e),
        }
    })
}

pub(super) fn vtc_cyclic(ctx: &Ctx) -> Tally {
    let per = ctx.pick(3, 10);
    let set = with_connections(fields(ctx, "vtc-cyclic", 2, ctx.pick(1, 3)), vtc_connection);
    batch(per * set.len(), |i, t| {
        let (_, c) = &set[i / per];
        let mut g = ctx.gen(2, "vtc-cyclic", i);
        let (x, y, z) = (g.vector(Support::All, 1), g.vector(Support::All, 1), g.vector(Support::All, 1));
        t.exact(&vtc_rhs(c, &x, &y, &z));
    })
}

pub(super) fn vtc_uniqueness(ctx: &Ctx) -> Tally {
    batch(ctx.pick(1, 5), |i, t| {
        let f = ctx.gen(2, "vtc-uniqueness", i).field(Support::Base, 1);
        let cs = *f.cs();
        let (Ok(v), Ok(c), Ok(psi)) = (vtc_connection(&f), cwt_connection(&f), vtc_deformation(&f)) else {
            t.holds(false, || "canonical connections failed to build".into());
            return;
        };
        // The deformation equation re-solved on top of VTC has the zero solution.
        let frames: Vec<VectorField> = (0..cs.dim()).map(|k| VectorField::frame(cs, k)).collect();
        let again = frames.iter().all(|a| frames.iter().all(|b| frames.iter().all(|d| vtc_rhs(&v, a, b, d).is_zero())));
        t.holds(again, || "re-solving the deformation on VTC gives a nonzero Ψ".into());
        match v.difference(&c) {
            Ok(d) => t.holds(d == psi, || "VTC − CWT differs from the stored deformation".into()),
            Err(e) => t.error(e),
        }
    })
}

pub(super) fn dpm_cyclic(ctx: &Ctx) -> Tally {
    let per = ctx.pick(2, 10);
    let set = with_connections(fields(ctx, "dpm-cyclic", 2, ctx.pick(1, 3)), vtc_connection);
    let induced: Vec<_> = set.iter().map(|(f, c)| induced_l_connections(c, f)).collect();
    batch(per * set.len(), |i, t| {
        let (f, _) = &set[i / per];
        let (dp, dm) = &induced[i / per];
        let mut g = ctx.gen(2, "dpm-cyclic", i);
        let (x, y, z) = (g.l_components(Support::Base, 1), g.l_components(Support::Base, 1), g.l_components(Support::Base, 1));
        t.exact(&dpm_cyclic_residual(Sign::Plus, dp, f, &x, &y, &z));
        t.exact(&dpm_cyclic_residual(Sign::Minus, dm, f, &x, &y, &z));
    })
}

pub(super) fn sigma_pm(ctx: &Ctx) -> Tally {
    let per = ctx.pick(2, 10);
    let set = fields(ctx, "sigma-pm", 2, ctx.pick(1, 2));
    let ls: Vec<_> = set.iter().map(|f| cwt_l_connections(f).expect("nondegenerate")).collect();
    batch(per * set.len(), |i, t| {
        let f = &set[i / per];
        let (dp, dm) = &ls[i / per];
        let cs = *f.cs();
        let mut g = ctx.gen(2, "sigma-pm", i);
        let (x, y) = (l_field(&mut g, Support::Base, 1), l_field(&mut g, Support::Base, 1));
        let h = g.poly(Support::All, 2, 2);
        let dh: Vec<ScalarExpr> = (0..cs.dim()).map(|u| h.diff(cs.var(u))).collect();
        let gxy = f.g().bilinear(x.base(), y.base());
        for (s, d) in [(Sign::Plus, dp), (Sign::Minus, dm)] {
            let (ix, iy) = (iota(s, &x, f).expect("in L"), iota(s, &y, f).expect("in L"));
            let xy = sigma(s, d, f, &ix, &iy);
            let yx = sigma(s, d, f, &iy, &ix);
            let scaled = sigma(s, d, f, &ix, &iy.scale(&h));
            let sg = &sign_expr(s) * &gxy;
            for u in 0..cs.dim() {
                t.exact(&(&xy[u] + &yx[u]));
                t.exact(&(&(&scaled[u] - &(&h * &xy[u])) - &(&sg * &dh[u])));
            }
        }
    })
}

pub(super) fn bianchi(ctx: &Ctx) -> Tally {
    let per = ctx.pick(2, 10);
    let set = with_connections(fields(ctx, "bianchi", 2, ctx.pick(1, 3)), vtc_connection);
    batch(per * set.len(), |i, t| {
        let (_, c) = &set[i / per];
        let mut g = ctx.gen(2, "bianchi", i);
        let (x, y, z) = (g.vector(Support::All, 1), g.vector(Support::All, 1), g.vector(Support::All, 1));
        match bianchi_residual(c, &x, &y, &z) {
            Ok(r) => t.vector(&r),
            Err(e) => t.error(e),
        }
    })
}

/// All-`L` and all-`L̃` cyclic sums of the VTC curvature on `m = 3` fields,
/// starting with `g = Id`, `B = x3 dx^1∧dx^2`.
pub(super) fn cyclic_curvature(ctx: &Ctx) -> Tally {
    let cs = CoordSystem::new(3).expect("m");
    let fixed = FieldSpec::with_metric(
        cs,
        Matrix::identity(3),
        mat(&cs, &[&["0", "x3", "0"], &["-x3", "0", "0"], &["0", "0", "0"]]),
        ScalarExpr::zero(),
    )
    .expect("Riemannian");
    let mut set = vec![fixed];
    set.extend(fields(ctx, "cyclic-curvature", 3, ctx.pick(0, 1)));
    batch(set.len(), |i, t| {
        let c = vtc_connection(&set[i]).expect("nondegenerate");
        let r = curvature_tensor(&c);
        t.holds(r.cyclic_sum_vanishes_on(&[0, 1, 2]), || format!("field {i}: all-L cyclic sum is nonzero"));
        t.holds(r.cyclic_sum_vanishes_on(&[3, 4, 5]), || format!("field {i}: all-L̃ cyclic sum is nonzero"));
    })
}

pub(super) fn kappa_seeds(ctx: &Ctx) -> Tally {
    let f = ctx.gen(2, "kappa-seeds", 0).field(Support::Base, 1);
    let c = vtc_connection(&f).expect("nondegenerate");
    let r = curvature_tensor(&c);
    let closed = scalar_curvature_expr(&c, &f);
    let [s1, s2] = default_seeds(2);
    batch(ctx.pick(2, 10), |i, t| {
        let mut g = ctx.gen(2, "kappa-seeds", 1 + i);
        let point: Vec<BigRational> = (0..f.cs().dim()).map(|_| g.rational(1, 4)).collect();
        let full = full_point(&point, f.cs()).expect("dimension");
        match (scalar_curvature_with_seed(&r, &f, &point, &s1), scalar_curvature_with_seed(&r, &f, &point, &s2)) {
            (Ok((k1, _)), Ok((k2, _))) => {
                let scale = k1.abs().max(k2.abs()).max(1e-300);
                t.float((k1 - k2).abs() / scale, 1e-9);
                let exact = crate::symcore::rational_to_f64(&closed.eval(&full).expect("no pole"));
                t.float((k1 - exact).abs() / exact.abs().max(1e-300), 1e-9);
            }
            (Err(e), _) | (_, Err(e)) => t.error(e),
        }
    })
}

pub(super) fn kappa_constant(ctx: &Ctx) -> Tally {
    batch(ctx.pick(1, 5), |i, t| {
        let f = ctx.gen(2 + i % 2, "kappa-constant", i).constant_field();
        for build in [vtc_connection, cwt_connection] {
            match build(&f) {
                Ok(c) => t.exact(&scalar_curvature_expr(&c, &f)),
                Err(e) => t.error(e),
            }
        }
    })
}

pub(super) fn volume_parallel(ctx: &Ctx) -> Tally {
    batch(ctx.pick(1, 5), |i, t| {
        let f = ctx.gen(2 + i % 2, "volume-parallel", i).field(Support::Base, 1);
        let cs = *f.cs();
        let vol = match volume_density(&f) {
            Ok(v) => v,
            Err(e) => return t.error(e),
        };
        for build in [vtc_connection, cwt_connection] {
            match build(&f) {
                Ok(c) => covariant_derivative(&c, &vol).iter().for_each(|r| t.exact(r)),
                Err(e) => t.error(e),
            }
        }
        let flat = Connection::flat(cs);
        induced_density_connection(&flat, &BigRational::from_integer(3.into())).iter().for_each(|r| t.exact(r));
    })
}

pub(super) fn action_constant(ctx: &Ctx) -> Tally {
    batch(ctx.pick(1, 3), |i, t| {
        let f = ctx.gen(2, "action-constant", i).constant_field();
        match action_value(&f, ActionKind::Vtc, &BoxDomain::unit(f.cs()), 3) {
            Ok(a) => t.float(a.abs(), 1e-12),
            Err(e) => t.error(e),
        }
    })
}

/// Doubling the Gauss–Legendre order on a fixed smooth level-matched field.
pub(super) fn action_convergence(_ctx: &Ctx) -> Tally {
    let cs = CoordSystem::new(2).expect("m");
    let f = FieldSpec::with_metric(
        cs,
        mat(&cs, &[&["2 + x1*x2", "x1/4"], &["x1/4", "2 + x2^2"]]),
        mat(&cs, &[&["0", "x1 + x2^2"], &["-x1 - x2^2", "0"]]),
        ScalarExpr::zero(),
    )
    .expect("Riemannian");
    let mut t = Tally::default();
    let domain = BoxDomain::unit(&cs);
    match (action_value(&f, ActionKind::Vtc, &domain, 8), action_value(&f, ActionKind::Vtc, &domain, 16)) {
        (Ok(a), Ok(b)) => t.float((a - b).abs() / b.abs().max(1e-300), 1e-10),
        (Err(e), _) | (_, Err(e)) => t.error(e),
    }
    t
}
