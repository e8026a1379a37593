//! Modified curvature, the Bianchi residual, modified Ricci and scalar curvature.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::genmetric::{build_h, FieldSpec, Sign};
use crate::symcore::{full_point, rational_to_f64, CoordSystem, ScalarExpr};
use crate::tensor::{Matrix, VectorField};

use super::{modified_bracket_unchecked, Connection};

/// `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]^∇} Z`.
pub fn modified_curvature(conn: &Connection, x: &VectorField, y: &VectorField, z: &VectorField) -> Result<VectorField> {
    conn.require_gamma_preserving()?;
    Ok(curvature_op(conn, x, y, z))
}

fn curvature_op(conn: &Connection, x: &VectorField, y: &VectorField, z: &VectorField) -> VectorField {
    let a = conn.nabla(x, &conn.nabla(y, z));
    let b = conn.nabla(y, &conn.nabla(x, z));
    let c = conn.nabla(&modified_bracket_unchecked(conn, x, y), z);
    &(&a - &b) - &c
}

/// `Σ_cycl R(X,Y)Z − Σ_cycl [X,[Y,Z]^∇]^∇`.
pub fn bianchi_residual(conn: &Connection, x: &VectorField, y: &VectorField, z: &VectorField) -> Result<VectorField> {
    conn.require_gamma_preserving()?;
    let br = |a: &VectorField, b: &VectorField| modified_bracket_unchecked(conn, a, b);
    let mut out = VectorField::zero(*conn.cs());
    for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
        out = &out + &curvature_op(conn, a, b, c);
        out = &out - &br(a, &br(b, c));
    }
    Ok(out)
}

/// `R(∂_a, ∂_b)∂_c = R_{abc}^d ∂_d`, the curvature operator on the
/// distinguished frame extended function-linearly.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    cs: CoordSystem,
    r: Vec<ScalarExpr>,
}

/// `R_{abc}^d = ∂_aΓ_{bc}^d − ∂_bΓ_{ac}^d + Γ_{bc}^eΓ_{ae}^d − Γ_{ac}^eΓ_{be}^d − W_{ab}^eΓ_{ec}^d`
/// with `W_{ab} = ∂_a ∧_∇ ∂_b`.
pub fn curvature_tensor(conn: &Connection) -> CurvatureTensor {
    let cs = *conn.cs();
    let n = cs.dim();
    let p = |c| cs.partner(c);
    let g = |u, v, w| conn.coeff(u, v, w);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let blocks: Vec<Vec<ScalarExpr>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let w: Vec<ScalarExpr> = (0..n).map(|e| (g(p(e), b, p(a)) - g(p(e), a, p(b))).half()).collect();
            let mut out = Vec::with_capacity(n * n);
            for c in 0..n {
                for d in 0..n {
                    let mut acc = &g(b, c, d).diff(cs.var(a)) - &g(a, c, d).diff(cs.var(b));
                    for e in 0..n {
                        let (x1, y1) = (g(b, c, e), g(a, e, d));
                        if !x1.is_zero() && !y1.is_zero() {
                            acc += x1 * y1;
                        }
                        let (x2, y2) = (g(a, c, e), g(b, e, d));
                        if !x2.is_zero() && !y2.is_zero() {
                            acc -= x2 * y2;
                        }
                        let y3 = g(e, c, d);
                        if !w[e].is_zero() && !y3.is_zero() {
                            acc -= &w[e] * y3;
                        }
                    }
                    out.push(acc);
                }
            }
            out
        })
        .collect();
    let mut r = vec![ScalarExpr::zero(); n * n * n * n];
    for (&(a, b), block) in pairs.iter().zip(blocks) {
        for (k, v) in block.into_iter().enumerate() {
            r[(b * n + a) * n * n + k] = -&v;
            r[(a * n + b) * n * n + k] = v;
        }
    }
    CurvatureTensor { cs, r }
}

impl CurvatureTensor {
    pub fn cs(&self) -> &CoordSystem {
        &self.cs
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> &ScalarExpr {
        let n = self.cs.dim();
        &self.r[((a * n + b) * n + c) * n + d]
    }

    pub fn is_zero(&self) -> bool {
        self.r.iter().all(ScalarExpr::is_zero)
    }

    /// `R(X,Y)Z` by contraction.
    pub fn apply(&self, x: &VectorField, y: &VectorField, z: &VectorField) -> VectorField {
        let n = self.cs.dim();
        let mut out = vec![ScalarExpr::zero(); n];
        for a in (0..n).filter(|&a| !x.get(a).is_zero()) {
            for b in (0..n).filter(|&b| !y.get(b).is_zero()) {
                let xy = x.get(a) * y.get(b);
                for c in (0..n).filter(|&c| !z.get(c).is_zero()) {
                    let xyz = &xy * z.get(c);
                    for (d, o) in out.iter_mut().enumerate() {
                        let r = self.get(a, b, c, d);
                        if !r.is_zero() {
                            *o += &xyz * r;
                        }
                    }
                }
            }
        }
        VectorField::new(self.cs, out).expect("dimension")
    }

    /// `Σ_cycl R(∂_a,∂_b)∂_c` over all triples drawn from `indices` vanishes.
    pub fn cyclic_sum_vanishes_on(&self, indices: &[usize]) -> bool {
        let n = self.cs.dim();
        indices.iter().all(|&a| {
            indices.iter().all(|&b| {
                indices.iter().all(|&c| {
                    (0..n).all(|d| (&(self.get(a, b, c, d) + self.get(b, c, a, d)) + self.get(c, a, b, d)).is_zero())
                })
            })
        })
    }

    /// The modified Ricci tensor `ρ_{ac}`. Contracting `ℋ` against the
    /// `ι±`-frame reduces it to `ρ(X,Y) = 2 tr(V ↦ R(X,V)Y)`.
    pub fn ricci(&self) -> Matrix {
        let n = self.cs.dim();
        Matrix::from_fn(n, n, |a, c| {
            let s: ScalarExpr = (0..n).map(|b| self.get(a, b, c, b).clone()).sum();
            &ScalarExpr::from_int(2) * &s
        })
    }

    /// `R_{abc}^d` at a point, exactly.
    pub fn eval(&self, point: &[BigRational]) -> Result<Vec<BigRational>> {
        let full = full_point(point, &self.cs)?;
        self.r.iter().map(|e| e.eval(&full).map_err(Error::from)).collect()
    }
}

/// `κ(ℋ, ∇) = Σ_± (g⁻¹)^{kl} ρ_sym(ι±ε_k, ι±ε_l)` in closed form.
pub fn scalar_curvature_expr(conn: &Connection, field: &FieldSpec) -> ScalarExpr {
    let ric = curvature_tensor(conn).ricci();
    kappa_from_ricci(&ric, field)
}

pub(crate) fn kappa_from_ricci(ric: &Matrix, field: &FieldSpec) -> ScalarExpr {
    let k = contraction_bivector(field);
    let sym = Matrix::from_fn(ric.rows(), ric.cols(), |a, c| (ric.get(a, c) + ric.get(c, a)).half());
    let n = ric.rows();
    let mut acc = ScalarExpr::zero();
    for a in 0..n {
        for c in 0..n {
            let (x, y) = (k.get(a, c), sym.get(a, c));
            if !x.is_zero() && !y.is_zero() {
                acc += x * y;
            }
        }
    }
    acc
}

/// `Σ_± ι± g⁻¹ ι±ᵀ`, the bivector contracted against `ρ_sym` in `κ`.
pub(crate) fn contraction_bivector(field: &FieldSpec) -> Matrix {
    let m = field.cs().m();
    let p = field.iota_frame();
    let gi = field.g_inv();
    let mut out = Matrix::zeros(2 * m, 2 * m);
    for off in [0, m] {
        let ps = p.block(0, off, 2 * m, m);
        out = &out + &(&(&ps * gi) * &ps.transpose());
    }
    out
}

/// Arithmetic for the pointwise orthonormalization: exact rationals when
/// every pivot is a rational square, otherwise `f64`.
trait PointNum: Clone + Sized {
    fn from_q(q: &BigRational) -> Self;
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn sqrt_abs(&self) -> Option<Self>;
    /// `+1`, `−1`, or `0` for a degenerate pivot.
    fn sign(&self) -> i32;
    fn to_f64(&self) -> f64;
}

impl PointNum for BigRational {
    fn from_q(q: &BigRational) -> Self {
        q.clone()
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn sqrt_abs(&self) -> Option<Self> {
        let a = self.abs();
        let root = |x: &BigInt| -> Option<BigInt> {
            let r = x.sqrt();
            (&r * &r == *x).then_some(r)
        };
        Some(BigRational::new(root(a.numer())?, root(a.denom())?))
    }
    fn sign(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

impl PointNum for f64 {
    fn from_q(q: &BigRational) -> Self {
        rational_to_f64(q)
    }
    fn zero() -> Self {
        0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn sqrt_abs(&self) -> Option<Self> {
        Some(self.abs().sqrt())
    }
    fn sign(&self) -> i32 {
        if self.abs() < 1e-12 {
            0
        } else if *self > 0.0 {
            1
        } else {
            -1
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Pointwise data of one `κ` evaluation.
struct PointData {
    m: usize,
    p: usize,
    g: Vec<Vec<BigRational>>,
    b: Vec<Vec<BigRational>>,
    h: Vec<Vec<BigRational>>,
    r: Vec<BigRational>,
}

enum Outcome<T> {
    Value(T),
    Inexact,
}

fn kappa_at<T: PointNum>(d: &PointData, seed: &[Vec<BigRational>]) -> Result<Outcome<T>> {
    let (m, n) = (d.m, 2 * d.m);
    let cv = |v: &Vec<Vec<BigRational>>| -> Vec<Vec<T>> { v.iter().map(|r| r.iter().map(T::from_q).collect()).collect() };
    let (g, b, h) = (cv(&d.g), cv(&d.b), cv(&d.h));
    let r: Vec<T> = d.r.iter().map(T::from_q).collect();
    let gdot = |x: &[T], y: &[T]| -> T {
        let mut acc = T::zero();
        for i in 0..m {
            for j in 0..m {
                acc = acc.add(&x[i].mul(&g[i][j]).mul(&y[j]));
            }
        }
        acc
    };
    // Signed Gram–Schmidt.
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut signs: Vec<i32> = Vec::with_capacity(m);
    for s in seed {
        let mut v: Vec<T> = s.iter().map(T::from_q).collect();
        for (e, &sg) in basis.iter().zip(&signs) {
            let c = gdot(&v, e);
            let c = if sg > 0 { c } else { T::zero().sub(&c) };
            for k in 0..m {
                v[k] = v[k].sub(&c.mul(&e[k]));
            }
        }
        let nn = gdot(&v, &v);
        let sg = nn.sign();
        if sg == 0 {
            return Err(Error::Degenerate("Gram–Schmidt pivot".into()));
        }
        let Some(len) = nn.sqrt_abs() else {
            return Ok(Outcome::Inexact);
        };
        basis.push(v.iter().map(|x| x.div(&len)).collect());
        signs.push(sg);
    }
    if signs.iter().filter(|&&s| s > 0).count() != d.p {
        return Err(Error::Invalid("signature of g at the point differs from the declared one".into()));
    }
    // ι±e = (e, (±g − B)e).
    let iota = |sign: Sign, e: &[T]| -> Vec<T> {
        let mut out: Vec<T> = e.to_vec();
        for j in 0..m {
            let mut acc = T::zero();
            for i in 0..m {
                let gij = if sign == Sign::Plus { g[j][i].clone() } else { T::zero().sub(&g[j][i]) };
                acc = acc.add(&gij.sub(&b[j][i]).mul(&e[i]));
            }
            out.push(acc);
        }
        out
    };
    let frames: Vec<(Vec<T>, Vec<T>, i32)> =
        basis.iter().zip(&signs).map(|(e, &s)| (iota(Sign::Plus, e), iota(Sign::Minus, e), s)).collect();
    let curv = |x: &[T], v: &[T], y: &[T]| -> Vec<T> {
        let mut out = vec![T::zero(); n];
        for a in 0..n {
            for bb in 0..n {
                let xv = x[a].mul(&v[bb]);
                for c in 0..n {
                    let xvy = xv.mul(&y[c]);
                    for (dd, o) in out.iter_mut().enumerate() {
                        *o = o.add(&xvy.mul(&r[((a * n + bb) * n + c) * n + dd]));
                    }
                }
            }
        }
        out
    };
    let hdot = |x: &[T], y: &[T]| -> T {
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc.add(&x[i].mul(&h[i][j]).mul(&y[j]));
            }
        }
        acc
    };
    let signed = |v: T, s: i32| if s > 0 { v } else { T::zero().sub(&v) };
    let rho = |x: &[T], y: &[T]| -> T {
        let mut acc = T::zero();
        for (ep, em, s) in &frames {
            acc = acc.add(&signed(hdot(ep, &curv(x, ep, y)), *s));
            acc = acc.add(&signed(hdot(em, &curv(x, em, y)), *s));
        }
        acc
    };
    let two = T::from_q(&BigRational::from_integer(BigInt::from(2)));
    let rho_sym = |x: &[T], y: &[T]| rho(x, y).add(&rho(y, x)).div(&two);
    let mut kappa = T::zero();
    for (ep, em, s) in &frames {
        kappa = kappa.add(&signed(rho_sym(ep, ep), *s));
        kappa = kappa.add(&signed(rho_sym(em, em), *s));
    }
    Ok(Outcome::Value(kappa))
}

fn point_data(tensor: &CurvatureTensor, field: &FieldSpec, point: &[BigRational]) -> Result<PointData> {
    let cs = field.cs();
    let full = full_point(point, cs)?;
    Ok(PointData {
        m: cs.m(),
        p: field.p(),
        g: field.g().eval(&full)?,
        b: field.b().eval(&full)?,
        h: build_h(field).h().eval(&full)?,
        r: tensor.eval(point)?,
    })
}

/// `κ` at a point through the pseudo-orthonormal basis obtained from `seed`
/// by signed Gram–Schmidt. Returns the exact value when all pivots are
/// rational squares.
pub fn scalar_curvature_with_seed(
    tensor: &CurvatureTensor,
    field: &FieldSpec,
    point: &[BigRational],
    seed: &[Vec<BigRational>],
) -> Result<(f64, Option<BigRational>)> {
    let m = field.cs().m();
    if seed.len() != m || seed.iter().any(|s| s.len() != m) {
        return Err(Error::Dimension(format!("seed must be {m} vectors of length {m}")));
    }
    let d = point_data(tensor, field, point)?;
    match kappa_at::<BigRational>(&d, seed)? {
        Outcome::Value(v) => Ok((PointNum::to_f64(&v), Some(v))),
        Outcome::Inexact => match kappa_at::<f64>(&d, seed)? {
            Outcome::Value(v) => Ok((v, None)),
            Outcome::Inexact => unreachable!("f64 square roots always exist"),
        },
    }
}

/// The standard basis, and a reversed, sheared basis for the cross-check.
pub fn default_seeds(m: usize) -> [Vec<Vec<BigRational>>; 2] {
    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let standard = (0..m).map(|i| (0..m).map(|j| if i == j { q(1, 1) } else { q(0, 1) }).collect()).collect();
    let sheared = (0..m)
        .map(|k| {
            (0..m)
                .map(|j| {
                    if j == m - 1 - k {
                        q(1, 1)
                    } else if k > 0 && j == m - k {
                        q(1, 3)
                    } else {
                        q(0, 1)
                    }
                })
                .collect()
        })
        .collect();
    [standard, sheared]
}

/// `κ` at a point, recomputed with a second basis; fails when the two values
/// differ by more than `1e-9` relative.
pub fn scalar_curvature(conn: &Connection, field: &FieldSpec, point: &[BigRational]) -> Result<f64> {
    conn.require_gamma_preserving()?;
    let t = curvature_tensor(conn);
    let [s1, s2] = default_seeds(field.cs().m());
    let (k1, _) = scalar_curvature_with_seed(&t, field, point, &s1)?;
    let (k2, _) = scalar_curvature_with_seed(&t, field, point, &s2)?;
    if (k1 - k2).abs() > 1e-9 * k1.abs().max(k2.abs()).max(1.0) {
        return Err(Error::Invariant(format!("κ depends on the basis: {k1} vs {k2}")));
    }
    Ok(k1)
}

/// `ρ_sym` at a point as a `2m × 2m` matrix of `f64` from the closed form.
pub fn ricci_at(tensor: &CurvatureTensor, point: &[BigRational]) -> Result<Vec<Vec<f64>>> {
    let full = full_point(point, tensor.cs())?;
    let ric = tensor.ricci();
    let n = ric.rows();
    let mut out = vec![vec![0.0; n]; n];
    for a in 0..n {
        for c in 0..n {
            let v = (ric.get(a, c) + ric.get(c, a)).half().eval(&full)?;
            out[a][c] = rational_to_f64(&v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{cwt_connection, vtc_connection};
    use crate::symcore::parse_scalar;

    fn field(cs: CoordSystem, g: &[&[&str]], b: &[&[&str]]) -> FieldSpec {
        let mat = |rows: &[&[&str]]| {
            Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| parse_scalar(s, &cs).unwrap()).collect()).collect())
                .unwrap()
        };
        FieldSpec::with_metric(cs, mat(g), mat(b), ScalarExpr::zero()).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn tensor_matches_operator_on_frames() {
        let cs = CoordSystem::new(2).unwrap();
        let f = field(cs, &[&["1 + x1^2", "0"], &["0", "1"]], &[&["0", "x2"], &["-x2", "0"]]);
        let conn = vtc_connection(&f).unwrap();
        let t = curvature_tensor(&conn);
        let fr = |c| VectorField::frame(cs, c);
        for (a, b, c) in [(0, 1, 0), (0, 2, 1), (1, 3, 3), (2, 0, 1)] {
            let op = modified_curvature(&conn, &fr(a), &fr(b), &fr(c)).unwrap();
            assert_eq!(op, t.apply(&fr(a), &fr(b), &fr(c)), "({a},{b},{c})");
        }
    }

    #[test]
    fn constant_field_has_zero_kappa() {
        let cs = CoordSystem::new(2).unwrap();
        let f = field(cs, &[&["2", "1"], &["1", "3"]], &[&["0", "1"], &["-1", "0"]]);
        let conn = vtc_connection(&f).unwrap();
        assert!(curvature_tensor(&conn).is_zero());
        assert!(scalar_curvature_expr(&conn, &f).is_zero());
        assert_eq!(scalar_curvature(&conn, &f, &[q(0), q(1), q(2), q(3)]).unwrap(), 0.0);
    }

    #[test]
    fn gram_schmidt_route_matches_closed_form() {
        let cs = CoordSystem::new(2).unwrap();
        let f = field(cs, &[&["1 + x1^2", "0"], &["0", "1"]], &[&["0", "x1"], &["-x1", "0"]]);
        let conn = cwt_connection(&f).unwrap();
        let exact = scalar_curvature_expr(&conn, &f);
        let pt = [q(1), q(2), q(0), q(1)];
        let full = full_point(&pt, &cs).unwrap();
        let want = rational_to_f64(&exact.eval(&full).unwrap());
        let got = scalar_curvature(&conn, &f, &pt).unwrap();
        assert!((want - got).abs() <= 1e-9 * want.abs().max(1.0), "{want} vs {got}");
    }
}
