//! The metric algebroid `(TM, γ, Id, ⋆)` of the flat double manifold: the
//! `∂` operator, the `∧_{∇⁰}` product, the C-bracket, the `⋆` product, the
//! generalized Lie derivative and S-field transformations.

use rayon::prelude::*;

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::symcore::{CoordSystem, ScalarExpr};
use crate::tensor::{gamma, sharp_gamma, split_l, Slot, TensorField, VectorField};

/// `∂f = ½ ♯_γ df`, i.e. `γ(∂f, Z) = ½ Z(f)`.
pub fn d_operator(cs: CoordSystem, f: &ScalarExpr) -> VectorField {
    let df: Vec<ScalarExpr> = (0..cs.dim()).map(|c| f.diff(cs.var(c)).half()).collect();
    sharp_gamma(cs, &df)
}

/// `X ∧_{∇⁰} Y`, defined by `γ(Z, X∧Y) = ½[γ(X, ∇⁰_Z Y) − γ(Y, ∇⁰_Z X)]`.
pub fn wedge_nabla0(x: &VectorField, y: &VectorField) -> VectorField {
    let cs = *x.cs();
    let w: Vec<ScalarExpr> = (0..cs.dim())
        .map(|u| {
            let v = cs.var(u);
            (&gamma(x, &y.map(|c| c.diff(v))) - &gamma(y, &x.map(|c| c.diff(v)))).half()
        })
        .collect();
    sharp_gamma(cs, &w)
}

/// The C-bracket `[X, Y]_{∇⁰} = [X, Y] − X ∧_{∇⁰} Y`.
pub fn c_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    &x.lie_bracket(y) - &wedge_nabla0(x, y)
}

/// `X ⋆ Y = [X, Y]_{∇⁰} + ∂(γ(X, Y))`.
pub fn star_product(x: &VectorField, y: &VectorField) -> VectorField {
    &c_bracket(x, y) + &d_operator(*x.cs(), &gamma(x, y))
}

/// An element `(X, α)` of `L ⊕ L*`, with `X = ξ^i ∂/∂x^i` and `α = α_i dx^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPair {
    pub x: Vec<ScalarExpr>,
    pub alpha: Vec<ScalarExpr>,
}

impl LPair {
    /// The field `X + ♯_γ α`.
    pub fn to_vector(&self, cs: CoordSystem) -> VectorField {
        VectorField::from_parts(cs, &self.x, &self.alpha).expect("m components each")
    }

    pub fn from_vector(v: &VectorField) -> LPair {
        LPair { x: v.base().to_vec(), alpha: v.tilde().to_vec() }
    }
}

/// Operators of the Lie algebroids `L` (anchor the inclusion) and `L*`
/// (bracket `♭_γ[♯_γα, ♯_γβ]`, anchor `♯_γ`).
struct Bialgebroid {
    cs: CoordSystem,
}

impl Bialgebroid {
    fn dx(&self, f: &ScalarExpr, h: usize) -> ScalarExpr {
        f.diff(self.cs.var(h))
    }

    fn dxt(&self, f: &ScalarExpr, h: usize) -> ScalarExpr {
        f.diff(self.cs.var(self.cs.m() + h))
    }

    fn pair(a: &[ScalarExpr], b: &[ScalarExpr]) -> ScalarExpr {
        a.iter().zip(b).map(|(p, q)| p * q).sum()
    }

    fn lie_l(&self, x: &[ScalarExpr], y: &[ScalarExpr]) -> Vec<ScalarExpr> {
        let m = self.cs.m();
        (0..m)
            .map(|h| (0..m).map(|j| &(&x[j] * &self.dx(&y[h], j)) - &(&y[j] * &self.dx(&x[h], j))).sum())
            .collect()
    }

    fn bracket_star(&self, a: &[ScalarExpr], b: &[ScalarExpr]) -> Vec<ScalarExpr> {
        let m = self.cs.m();
        (0..m)
            .map(|h| (0..m).map(|j| &(&a[j] * &self.dxt(&b[h], j)) - &(&b[j] * &self.dxt(&a[h], j))).sum())
            .collect()
    }

    /// `ℒ_X β` in `L`: `ξ^j ∂_j β_h + β_j ∂_h ξ^j`.
    fn lie_deriv_l(&self, x: &[ScalarExpr], beta: &[ScalarExpr]) -> Vec<ScalarExpr> {
        let m = self.cs.m();
        (0..m)
            .map(|h| (0..m).map(|j| &(&x[j] * &self.dx(&beta[h], j)) + &(&beta[j] * &self.dx(&x[j], h))).sum())
            .collect()
    }

    /// `ℒ*_β X` in `L*`: `β_j ∂̃^j ξ^h + ξ^j ∂̃^h β_j`.
    fn lie_deriv_star(&self, beta: &[ScalarExpr], x: &[ScalarExpr]) -> Vec<ScalarExpr> {
        let m = self.cs.m();
        (0..m)
            .map(|h| (0..m).map(|j| &(&beta[j] * &self.dxt(&x[h], j)) + &(&x[j] * &self.dxt(&beta[j], h))).sum())
            .collect()
    }

    fn d_l(&self, f: &ScalarExpr) -> Vec<ScalarExpr> {
        (0..self.cs.m()).map(|h| self.dx(f, h)).collect()
    }

    /// `d* f = ∂̃^h f ∂/∂x^h`.
    fn d_star(&self, f: &ScalarExpr) -> Vec<ScalarExpr> {
        (0..self.cs.m()).map(|h| self.dxt(f, h)).collect()
    }
}

/// The C-bracket in the `L ⊕ L*` picture, through the Lie algebroid
/// operators of `L` and `L*` (the double of a Lie bialgebroid form).
pub fn c_bracket_lwz(cs: CoordSystem, a: &LPair, b: &LPair) -> Result<VectorField> {
    let m = cs.m();
    if [&a.x, &a.alpha, &b.x, &b.alpha].iter().any(|v| v.len() != m) {
        return Err(Error::Dimension("L ⊕ L* parts need m components each".into()));
    }
    let ops = Bialgebroid { cs };
    let (x, alpha, y, beta) = (&a.x, &a.alpha, &b.x, &b.alpha);
    let h = &Bialgebroid::pair(alpha, y) - &Bialgebroid::pair(beta, x);
    let half_h = h.half();
    let lie = ops.lie_l(x, y);
    let ly = ops.lie_deriv_star(alpha, y);
    let lx = ops.lie_deriv_star(beta, x);
    let ds = ops.d_star(&half_h);
    let vec_part: Vec<ScalarExpr> = (0..m).map(|i| &(&(&lie[i] + &ly[i]) - &lx[i]) - &ds[i]).collect();
    let bs = ops.bracket_star(alpha, beta);
    let lb = ops.lie_deriv_l(x, beta);
    let la = ops.lie_deriv_l(y, alpha);
    let dl = ops.d_l(&half_h);
    let form_part: Vec<ScalarExpr> = (0..m).map(|i| &(&(&bs[i] + &lb[i]) - &la[i]) + &dl[i]).collect();
    Ok(LPair { x: vec_part, alpha: form_part }.to_vector(cs))
}

/// The C-bracket assembled from its restrictions to `L`, `L̃` and the mixed
/// characterization by `γ`-pairings with pure frame fields.
pub fn c_bracket_split(x: &VectorField, y: &VectorField) -> VectorField {
    let (xl, xt) = split_l(x);
    let (yl, yt) = split_l(y);
    let pure = &xl.lie_bracket(&yl) + &xt.lie_bracket(&yt);
    let mixed = &mixed_bracket(&xl, &yt) - &mixed_bracket(&yl, &xt);
    &pure + &mixed
}

/// `[X_L, Y_L̃]_{∇⁰}` from its pairings with `∂/∂x^k` and `∂/∂x̃_k`.
fn mixed_bracket(xl: &VectorField, yt: &VectorField) -> VectorField {
    let cs = *xl.cs();
    let m = cs.m();
    let gxy = gamma(xl, yt);
    let mut out = vec![ScalarExpr::zero(); cs.dim()];
    for k in 0..m {
        let zl = VectorField::frame(cs, k);
        let zt = VectorField::frame(cs, m + k);
        // γ(Z_L, ·) reads the tilde component k.
        out[m + k] = &(&gamma(&zl.lie_bracket(xl), yt) + &xl.apply(&gamma(&zl, yt))) - &zl.apply(&gxy).half();
        // γ(Z_L̃, ·) reads the base component k.
        out[k] = &(&(-&gamma(xl, &zt.lie_bracket(yt))) - &yt.apply(&gamma(&zt, xl))) + &zt.apply(&gxy).half();
    }
    VectorField::new(cs, out).expect("dimension")
}

/// `∇_X Y − ∇_Y X − X ∧_∇ Y` for a `γ`-preserving connection.
pub fn bracket_from_connection(conn: &Connection, x: &VectorField, y: &VectorField) -> Result<VectorField> {
    conn.require_gamma_preserving()?;
    Ok(bracket_from_connection_unchecked(conn, x, y))
}

pub(crate) fn bracket_from_connection_unchecked(conn: &Connection, x: &VectorField, y: &VectorField) -> VectorField {
    &(&conn.nabla(x, y) - &conn.nabla(y, x)) - &conn.wedge(x, y)
}

/// Components `C[v][a]` of `X ⋆ ∂_v = C[v][a] ∂_a`.
fn star_on_frame(x: &VectorField) -> Vec<Vec<ScalarExpr>> {
    let cs = *x.cs();
    (0..cs.dim()).map(|v| star_product(x, &VectorField::frame(cs, v)).into_comps()).collect()
}

/// The generalized Lie derivative `𝔏_X T`, extended from `𝔏_X f = X(f)` and
/// `𝔏_X Y = X ⋆ Y` as a derivation.
pub fn gen_lie_derivative(x: &VectorField, t: &TensorField) -> Result<TensorField> {
    if x.cs() != t.cs() {
        return Err(Error::Dimension("field and tensor on different manifolds".into()));
    }
    let cs = *x.cs();
    let n = cs.dim();
    let c = if t.rank() == 0 { Vec::new() } else { star_on_frame(x) };
    let variance = t.variance().to_vec();
    let comps: Vec<ScalarExpr> = (0..t.comps().len())
        .into_par_iter()
        .map(|flat| {
            let idx = t.unflatten(flat);
            let mut acc = x.apply(&t.comps()[flat]);
            let mut j = idx.clone();
            for (k, slot) in variance.iter().enumerate() {
                for a in 0..n {
                    j[k] = a;
                    let tv = t.get(&j);
                    if tv.is_zero() {
                        continue;
                    }
                    match slot {
                        Slot::Vector => {
                            let coef = &c[a][idx[k]];
                            if !coef.is_zero() {
                                acc += coef * tv;
                            }
                        }
                        Slot::Covector => {
                            let coef = &c[idx[k]][a];
                            if !coef.is_zero() {
                                acc -= coef * tv;
                            }
                        }
                    }
                }
                j[k] = idx[k];
            }
            acc
        })
        .collect();
    TensorField::new(cs, variance, comps)
}

/// True iff no component depends on a tilde coordinate.
pub fn is_strongly_foliated(t: &TensorField) -> bool {
    t.is_foliated()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacobiMode {
    Leibniz,
    Cyclic,
}

/// Residuals of the Jacobi-type identities.
///
/// `Leibniz` yields `[X⋆(Y⋆Z) − (X⋆Y)⋆Z − Y⋆(X⋆Z)]`. `Cyclic` yields the
/// cyclic sum of `[[X,Y]_{∇⁰},Z]_{∇⁰}` minus each of its three right-hand
/// forms: `⅓Σ∂γ([X,Y]_{∇⁰},Z)`, `½Σ∂γ([X,Y],Z)` and `Σ∂γ(Y∧_{∇⁰}X,Z)`.
pub fn jacobiator(x: &VectorField, y: &VectorField, z: &VectorField, mode: JacobiMode) -> Vec<VectorField> {
    let cs = *x.cs();
    match mode {
        JacobiMode::Leibniz => {
            let lhs = &(&star_product(x, &star_product(y, z)) - &star_product(&star_product(x, y), z))
                - &star_product(y, &star_product(x, z));
            vec![lhs]
        }
        JacobiMode::Cyclic => {
            let triples = [(x, y, z), (y, z, x), (z, x, y)];
            let mut lhs = VectorField::zero(cs);
            let mut s1 = ScalarExpr::zero();
            let mut s2 = ScalarExpr::zero();
            let mut s3 = ScalarExpr::zero();
            for (a, b, c) in triples {
                let ab = c_bracket(a, b);
                lhs = &lhs + &c_bracket(&ab, c);
                s1 += gamma(&ab, c);
                s2 += gamma(&a.lie_bracket(b), c);
                s3 += gamma(&wedge_nabla0(b, a), c);
            }
            let third = ScalarExpr::ratio(1, 3);
            let forms = [&s1 * &third, s2.half(), s3];
            forms.iter().map(|s| &lhs - &d_operator(cs, s)).collect()
        }
    }
}

/// A 2-form `S = ½ S_ij dx^i ∧ dx^j` on `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SFieldForm {
    s: Vec<Vec<ScalarExpr>>,
    closed_on_l: bool,
}

impl SFieldForm {
    /// Builds `S` from its antisymmetric `m × m` component matrix.
    pub fn new(cs: CoordSystem, s: Vec<Vec<ScalarExpr>>) -> Result<SFieldForm> {
        let m = cs.m();
        if s.len() != m || s.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("S must be m x m".into()));
        }
        for i in 0..m {
            for j in 0..m {
                if s[i][j] != -&s[j][i] {
                    return Err(Error::Invalid(format!("S is not antisymmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let closed_on_l = (0..m).all(|i| {
            (i + 1..m).all(|j| {
                (j + 1..m).all(|k| {
                    let d = |a: usize, b: usize, c: usize| s[b][c].diff(cs.var(a));
                    (&(&d(i, j, k) + &d(j, k, i)) + &d(k, i, j)).is_zero()
                })
            })
        });
        Ok(SFieldForm { s, closed_on_l })
    }

    pub fn components(&self) -> &[Vec<ScalarExpr>] {
        &self.s
    }

    /// `d_L S = 0`, with `d_L` differentiating along `x` only.
    pub fn closed_on_l(&self) -> bool {
        self.closed_on_l
    }
}

/// `(X, α) ↦ (X, α + i(X)S)`, i.e. adds `♯_γ(i(pr_L X)S)`.
pub fn s_field_transform(s: &SFieldForm, x: &VectorField) -> VectorField {
    let cs = *x.cs();
    let m = cs.m();
    let xi = x.base();
    let comps = (0..cs.dim())
        .map(|c| {
            if c < m {
                return x.get(c).clone();
            }
            let j = c - m;
            let contraction: ScalarExpr =
                (0..m).filter(|&i| !xi[i].is_zero() && !s.s[i][j].is_zero()).map(|i| &xi[i] * &s.s[i][j]).sum();
            x.get(c) + &contraction
        })
        .collect();
    VectorField::new(cs, comps).expect("dimension")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse_scalar;

    fn setup() -> (CoordSystem, impl Fn(&str) -> ScalarExpr, impl Fn(usize) -> VectorField) {
        let cs = CoordSystem::new(2).unwrap();
        (cs, move |s: &str| parse_scalar(s, &cs).unwrap(), move |c| VectorField::frame(cs, c))
    }

    #[test]
    fn d_operator_examples() {
        let (cs, p, d) = setup();
        assert_eq!(d_operator(cs, &p("x1")), d(2).scale(&ScalarExpr::ratio(1, 2)));
        assert_eq!(d_operator(cs, &p("xt1")), d(0).scale(&ScalarExpr::ratio(1, 2)));
        assert!(d_operator(cs, &p("5")).is_zero());
    }

    #[test]
    fn frame_products_vanish() {
        let (_, _, d) = setup();
        for a in 0..4 {
            for b in 0..4 {
                assert!(wedge_nabla0(&d(a), &d(b)).is_zero());
                assert!(c_bracket(&d(a), &d(b)).is_zero());
                assert!(star_product(&d(a), &d(b)).is_zero());
            }
        }
    }

    #[test]
    fn hand_computed_products() {
        let (_, p, d) = setup();
        let x = d(0).scale(&p("x1"));
        let half = ScalarExpr::ratio(1, 2);
        assert_eq!(wedge_nabla0(&x, &d(2)), d(2).scale(&-&half));
        assert_eq!(c_bracket(&x, &d(2)), d(2).scale(&half));
        assert_eq!(star_product(&x, &d(2)), d(2));
    }

    #[test]
    fn lie_derivative_of_tilde_frame() {
        let (_, p, d) = setup();
        let x = d(0).scale(&p("x1"));
        let out = gen_lie_derivative(&x, &d(2).to_tensor()).unwrap();
        assert_eq!(VectorField::from_tensor(&out).unwrap(), d(2));
    }

    #[test]
    fn s_field_example() {
        let (cs, p, d) = setup();
        let s = SFieldForm::new(cs, vec![vec![p("0"), p("1")], vec![p("-1"), p("0")]]).unwrap();
        assert!(s.closed_on_l());
        assert_eq!(s_field_transform(&s, &d(0)), &d(0) + &d(3));
        assert_eq!(s_field_transform(&s, &d(2)), d(2));
    }

    #[test]
    fn leibniz_counterexample_is_nonzero() {
        let (_, p, d) = setup();
        let x = d(0).scale(&p("xt1"));
        assert!(jacobiator(&x, &d(2), &d(0), JacobiMode::Leibniz)[0].is_zero());
        let z = d(0).scale(&p("x1"));
        let r = jacobiator(&x, &d(2), &z, JacobiMode::Leibniz);
        assert_eq!(r[0], -&d(0));
    }
}
