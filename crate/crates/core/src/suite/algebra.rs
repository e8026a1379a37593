//! Scalar, tensor and metric-algebroid identities.

use super::{batch, Ctx, Tally};
use crate::algebroid::{
    c_bracket, c_bracket_lwz, c_bracket_split, d_operator, gen_lie_derivative, jacobiator, s_field_transform,
    wedge_nabla0, JacobiMode, LPair, SFieldForm,
};
use crate::random::Support;
use crate::symcore::{full_point_f64, parse_scalar, CoordSystem, ScalarExpr};
use crate::tensor::{apply_f, gamma, gamma_matrix, omega_matrix, pair_omega, split_l, Slot, TensorField, VectorField};

fn m_for(case: usize) -> usize {
    2 + case % 2
}

pub(super) fn ring_axioms(ctx: &Ctx) -> Tally {
    batch(ctx.pick(5, 100), |i, t| {
        let mut g = ctx.gen(2, "ring-axioms", i);
        let a = g.rational_function(Support::All, 2);
        let b = g.rational_function(Support::All, 2);
        let c = g.rational_function(Support::All, 2);
        t.exact(&(&(&(&a + &b) + &c) - &(&a + &(&b + &c))));
        t.exact(&(&(&(&a * &b) * &c) - &(&a * &(&b * &c))));
        t.exact(&(&(&a * &(&b + &c)) - &(&(&a * &b) + &(&a * &c))));
        t.exact(&(&(&a * &b) - &(&b * &a)));
        t.exact(&(&a + &(-&a)));
        if !a.is_zero() {
            t.exact(&(&(&a * &a.recip().expect("nonzero")) - &ScalarExpr::one()));
        }
    })
}

pub(super) fn mixed_partials(ctx: &Ctx) -> Tally {
    batch(ctx.pick(5, 100), |i, t| {
        let mut g = ctx.gen(2, "mixed-partials", i);
        let cs = *g.cs();
        let f = g.rational_function(Support::All, 3);
        let (x, y) = (cs.var(i % 2), cs.var(2 + (i / 2) % 2));
        t.exact(&(&f.diff(x).diff(y) - &f.diff(y).diff(x)));
    })
}

pub(super) fn finite_differences(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 30), |i, t| {
        let mut g = ctx.gen(2, "finite-differences", i);
        let cs = *g.cs();
        let f = g.rational_function(Support::All, 2);
        let p: Vec<f64> = g.point().iter().map(crate::symcore::rational_to_f64).collect();
        let c = i % cs.dim();
        let h = 1e-5;
        let at = |shift: f64| {
            let mut q = p.clone();
            q[c] += shift;
            f.eval_f64(&full_point_f64(&q, &cs))
        };
        let fd = (at(h) - at(-h)) / (2.0 * h);
        let exact = f.diff(cs.var(c)).eval_f64(&full_point_f64(&p, &cs));
        t.float((fd - exact).abs() / exact.abs().max(1.0), 1e-6);
    })
}

pub(super) fn product_structure(ctx: &Ctx) -> Tally {
    let mut t = batch(ctx.pick(4, 50), |i, t| {
        let mut g = ctx.gen(m_for(i), "product-structure", i);
        let x = g.vector(Support::All, 2);
        let y = g.vector(Support::All, 2);
        let om = |a: &VectorField, b: &VectorField| pair_omega(a, b).expect("same coordinates");
        let (fx, fy) = (apply_f(&x), apply_f(&y));
        t.vector(&(&apply_f(&fx) - &x));
        t.exact(&(&om(&fx, &fy) + &om(&x, &y)));
        t.exact(&(&gamma(&x, &y) - &om(&fx, &y)));
        t.exact(&(&om(&x, &y) - &gamma(&fx, &y)));
        t.exact(&(&gamma(&x, &y) - &gamma(&y, &x)));
        t.exact(&(&om(&x, &y) + &om(&y, &x)));
    });
    for m in [2, 3] {
        let cs = CoordSystem::new(m).expect("m");
        let sign = if m % 2 == 0 { 1 } else { -1 };
        let expect = ScalarExpr::from_int(sign);
        t.exact(&(&gamma_matrix(&cs).det() - &expect));
        t.holds(omega_matrix(&cs).det() == ScalarExpr::one(), || "det ω ≠ 1".into());
    }
    t
}

pub(super) fn lagrangian_isotropy(ctx: &Ctx) -> Tally {
    let ms: &[usize] = if ctx.pick(1, 2) == 1 { &[2] } else { &[2, 3] };
    let mut t = Tally::default();
    for &m in ms {
        let cs = CoordSystem::new(m).expect("m");
        for a in 0..m {
            for b in 0..m {
                t.exact(&gamma(&VectorField::frame(cs, a), &VectorField::frame(cs, b)));
                t.exact(&gamma(&VectorField::frame(cs, m + a), &VectorField::frame(cs, m + b)));
            }
        }
    }
    t
}

pub(super) fn metric_compatibility(ctx: &Ctx) -> Tally {
    batch(ctx.pick(4, 200), |i, t| {
        let mut g = ctx.gen(m_for(i), "metric-compatibility", i);
        let (x, y, z) = (g.vector(Support::All, 3), g.vector(Support::All, 3), g.vector(Support::All, 3));
        let r = &(&z.apply(&gamma(&x, &y)) - &gamma(&ctx.star(&z, &x), &y)) - &gamma(&x, &ctx.star(&z, &y));
        t.exact(&r);
    })
}

pub(super) fn normalization(ctx: &Ctx) -> Tally {
    batch(ctx.pick(4, 200), |i, t| {
        let mut g = ctx.gen(m_for(i), "normalization", i);
        let cs = *g.cs();
        let (x, y) = (g.vector(Support::All, 3), g.vector(Support::All, 3));
        t.vector(&(&ctx.star(&x, &x) - &d_operator(cs, &gamma(&x, &x))));
        let two_d = d_operator(cs, &gamma(&x, &y)).scale(&ScalarExpr::from_int(2));
        t.vector(&(&(&ctx.star(&x, &y) + &ctx.star(&y, &x)) - &two_d));
    })
}

pub(super) fn product_linearity(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 50), |i, t| {
        let mut g = ctx.gen(m_for(i), "product-linearity", i);
        let cs = *g.cs();
        let (x, y) = (g.vector(Support::All, 2), g.vector(Support::All, 2));
        let f = g.poly(Support::All, 2, 3);
        let xy = ctx.star(&x, &y);
        let a = &(&ctx.star(&x, &y.scale(&f)) - &xy.scale(&f)) - &y.scale(&x.apply(&f));
        t.vector(&a);
        let two_gd = d_operator(cs, &f).scale(&(&ScalarExpr::from_int(2) * &gamma(&x, &y)));
        let b = &(&(&ctx.star(&x.scale(&f), &y) - &xy.scale(&f)) + &x.scale(&y.apply(&f))) - &two_gd;
        t.vector(&b);
    })
}

pub(super) fn bracket_linearity(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 50), |i, t| {
        let mut g = ctx.gen(m_for(i), "bracket-linearity", i);
        let cs = *g.cs();
        let (x, y) = (g.vector(Support::All, 2), g.vector(Support::All, 2));
        let f = g.poly(Support::All, 2, 3);
        let gdf = d_operator(cs, &f).scale(&gamma(&x, &y));
        let br = &(&(&c_bracket(&x, &y.scale(&f)) - &c_bracket(&x, &y).scale(&f)) - &y.scale(&x.apply(&f))) + &gdf;
        t.vector(&br);
        let w = &(&wedge_nabla0(&x, &y.scale(&f)) - &wedge_nabla0(&x, &y).scale(&f)) - &gdf;
        t.vector(&w);
        t.vector(&(&wedge_nabla0(&x, &y) + &wedge_nabla0(&y, &x)));
    })
}

pub(super) fn bracket_concordance(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 50), |i, t| {
        let mut g = ctx.gen(m_for(i), "bracket-concordance", i);
        let cs = *g.cs();
        let (x, y) = (g.vector(Support::All, 2), g.vector(Support::All, 2));
        let c = c_bracket(&x, &y);
        match c_bracket_lwz(cs, &LPair::from_vector(&x), &LPair::from_vector(&y)) {
            Ok(lwz) => t.vector(&(&c - &lwz)),
            Err(e) => t.error(e),
        }
        t.vector(&(&c - &c_bracket_split(&x, &y)));
    })
}

pub(super) fn differential_products(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 30), |i, t| {
        let mut g = ctx.gen(m_for(i), "differential-products", i);
        let cs = *g.cs();
        let f = g.poly(Support::Base, 3, 3);
        let z = g.vector(Support::Base, 2);
        let df = d_operator(cs, &f);
        t.vector(&ctx.star(&df, &z));
        t.vector(&(&ctx.star(&z, &df) - &d_operator(cs, &z.apply(&f))));
    })
}

pub(super) fn foliated_projection(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 30), |i, t| {
        let mut g = ctx.gen(m_for(i), "foliated-projection", i);
        let (x, y) = (g.vector(Support::Base, 2), g.vector(Support::Base, 2));
        let w = wedge_nabla0(&x, &y);
        t.holds(w.base().iter().all(ScalarExpr::is_zero), || format!("X∧Y has an L-part: {w}"));
        let (xl, _) = split_l(&x);
        let (yl, _) = split_l(&y);
        let (cl, _) = split_l(&c_bracket(&x, &y));
        t.vector(&(&cl - &xl.lie_bracket(&yl)));
    })
}

fn field(cs: CoordSystem, comps: &[&str]) -> VectorField {
    VectorField::new(cs, comps.iter().map(|s| parse_scalar(s, &cs).expect("fixed input")).collect()).expect("dimension")
}

pub(super) fn leibniz(ctx: &Ctx) -> Tally {
    let mut t = batch(ctx.pick(3, 100), |i, t| {
        let mut g = ctx.gen(m_for(i), "leibniz", i);
        let (x, y, z) = (g.vector(Support::Base, 2), g.vector(Support::Base, 2), g.vector(Support::Base, 2));
        let r = &(&ctx.star(&x, &ctx.star(&y, &z)) - &ctx.star(&ctx.star(&x, &y), &z)) - &ctx.star(&y, &ctx.star(&x, &z));
        t.vector(&r);
    });
    // Outside the strongly foliated fields the identity fails.
    let cs = CoordSystem::new(2).expect("m");
    let (x, y, z) = (field(cs, &["xt1", "0", "0", "0"]), field(cs, &["0", "0", "1", "0"]), field(cs, &["x1", "0", "0", "0"]));
    let r = jacobiator(&x, &y, &z, JacobiMode::Leibniz).remove(0);
    t.holds(!r.is_zero(), || "non-foliated Leibniz residual vanished".into());
    // With ∂/∂x^1 as the third argument every product in the identity vanishes.
    let z = field(cs, &["1", "0", "0", "0"]);
    t.vector(&jacobiator(&x, &y, &z, JacobiMode::Leibniz).remove(0));
    t
}

pub(super) fn jacobiator_forms(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 50), |i, t| {
        let mut g = ctx.gen(m_for(i), "jacobiator-forms", i);
        let (x, y, z) = (g.vector(Support::Base, 2), g.vector(Support::Base, 2), g.vector(Support::Base, 2));
        for r in jacobiator(&x, &y, &z, JacobiMode::Cyclic) {
            t.vector(&r);
        }
    })
}

pub(super) fn lie_derivative_commutator(ctx: &Ctx) -> Tally {
    batch(ctx.pick(2, 20), |i, t| {
        let mut g = ctx.gen(2, "lie-derivative-commutator", i);
        let cs = *g.cs();
        let (x, y) = (g.vector(Support::Base, 1), g.vector(Support::Base, 1));
        let variance = if i % 2 == 0 { vec![Slot::Covector, Slot::Covector] } else { vec![Slot::Vector, Slot::Covector] };
        let comps: Vec<ScalarExpr> = (0..cs.dim().pow(2)).map(|_| g.poly(Support::Base, 1, 2)).collect();
        let tensor = TensorField::new(cs, variance, comps).expect("n² components");
        let run = || -> crate::Result<TensorField> {
            let xy = gen_lie_derivative(&x, &gen_lie_derivative(&y, &tensor)?)?;
            let yx = gen_lie_derivative(&y, &gen_lie_derivative(&x, &tensor)?)?;
            xy.try_sub(&yx)?.try_sub(&gen_lie_derivative(&ctx.star(&x, &y), &tensor)?)
        };
        match run() {
            Ok(r) => t.holds(r.is_zero(), || "commutator of generalized Lie derivatives differs".into()),
            Err(e) => t.error(e),
        }
    })
}

pub(super) fn cyclic_bracket(ctx: &Ctx) -> Tally {
    batch(ctx.pick(3, 50), |i, t| {
        let mut g = ctx.gen(m_for(i), "cyclic-bracket", i);
        let (x, y, z) = (g.vector(Support::All, 2), g.vector(Support::All, 2), g.vector(Support::All, 2));
        let cyc = [(&x, &y, &z), (&y, &z, &x), (&z, &x, &y)];
        let lie: ScalarExpr = cyc.iter().map(|(a, b, c)| gamma(&a.lie_bracket(b), c)).sum();
        let wedge: ScalarExpr = cyc.iter().map(|(a, b, c)| gamma(&wedge_nabla0(b, a), c)).sum();
        t.exact(&(&lie - &(&ScalarExpr::from_int(2) * &wedge)));
    })
}

/// `S = d_L a` for a random `x`-dependent 1-form `a`.
fn exact_two_form(g: &mut crate::random::Generator) -> Vec<Vec<ScalarExpr>> {
    let cs = *g.cs();
    let m = cs.m();
    let a: Vec<ScalarExpr> = (0..m).map(|_| g.poly(Support::Base, 2, 3)).collect();
    (0..m).map(|i| (0..m).map(|j| &a[j].diff(cs.var(i)) - &a[i].diff(cs.var(j))).collect()).collect()
}

fn automorphism_defect(s: &SFieldForm, x: &VectorField, y: &VectorField) -> VectorField {
    &s_field_transform(s, &c_bracket(x, y)) - &c_bracket(&s_field_transform(s, x), &s_field_transform(s, y))
}

pub(super) fn s_field_automorphism(ctx: &Ctx) -> Tally {
    let mut t = batch(ctx.pick(2, 10), |i, t| {
        let mut g = ctx.gen(3, "s-field-automorphism", i);
        let cs = *g.cs();
        let s = SFieldForm::new(cs, exact_two_form(&mut g)).expect("antisymmetric");
        t.holds(s.closed_on_l(), || "d_L(d_L a) ≠ 0".into());
        for _ in 0..2 {
            let (x, y) = (g.vector(Support::Base, 2), g.vector(Support::Base, 2));
            t.vector(&automorphism_defect(&s, &x, &y));
        }
    });
    // S = x1 dx2∧dx3 is not closed; the transform must break the bracket.
    let cs = CoordSystem::new(3).expect("m");
    let x1 = parse_scalar("x1", &cs).expect("fixed input");
    let z = ScalarExpr::zero();
    let s = SFieldForm::new(cs, vec![vec![z.clone(), z.clone(), z.clone()], vec![z.clone(), z.clone(), x1.clone()], vec![z.clone(), -&x1, z]])
        .expect("antisymmetric");
    t.holds(!s.closed_on_l(), || "x1 dx2∧dx3 reported closed".into());
    let frames: Vec<VectorField> = (0..cs.dim()).map(|c| VectorField::frame(cs, c)).collect();
    let broken = frames.iter().any(|a| frames.iter().any(|b| !automorphism_defect(&s, a, b).is_zero()));
    t.holds(broken, || "non-closed S preserved every frame bracket".into());
    t
}
