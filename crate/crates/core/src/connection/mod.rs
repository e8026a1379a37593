//! Connections on `TM`: the flat `∇⁰`, double-metric connections built from
//! pairs of `L`-connections, the CWT and VTC connections, modified brackets,
//! Gualtieri torsion, modified curvature, scalar curvature and the action.

mod action;
mod canonical;
mod curvature;

pub use action::{action_value, integrate_box, ActionKind, BoxDomain};
pub use canonical::{cwt_connection, cwt_l_connections, dpm_cyclic_residual, induced_l_connections, levi_civita_l, vtc_connection, vtc_deformation, vtc_rhs};
pub use curvature::{
    bianchi_residual, curvature_tensor, default_seeds, modified_curvature, ricci_at, scalar_curvature, scalar_curvature_expr,
    scalar_curvature_with_seed, CurvatureTensor,
};

use crate::algebroid::c_bracket;
use crate::error::{Error, Result};
use crate::genmetric::{spm_coefficients, FieldSpec, Sign};
use crate::symcore::{CoordSystem, ScalarExpr};
use crate::tensor::{gamma, sharp_gamma, Matrix, VectorField};

/// A linear connection on `TM` given by `∇_{∂_u}∂_v = Γ_{uv}^w ∂_w` in the
/// distinguished frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    cs: CoordSystem,
    coeffs: Vec<ScalarExpr>,
}

impl Connection {
    /// `coeffs[(u·n + v)·n + w] = Γ_{uv}^w`.
    pub fn new(cs: CoordSystem, coeffs: Vec<ScalarExpr>) -> Result<Connection> {
        let n = cs.dim();
        if coeffs.len() != n * n * n {
            return Err(Error::Dimension(format!("expected {} coefficients, got {}", n * n * n, coeffs.len())));
        }
        Ok(Connection { cs, coeffs })
    }

    pub fn from_fn(cs: CoordSystem, mut f: impl FnMut(usize, usize, usize) -> ScalarExpr) -> Connection {
        let n = cs.dim();
        let mut coeffs = Vec::with_capacity(n * n * n);
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    coeffs.push(f(u, v, w));
                }
            }
        }
        Connection { cs, coeffs }
    }

    /// `∇⁰`: all coefficients zero.
    pub fn flat(cs: CoordSystem) -> Connection {
        let n = cs.dim();
        Connection { cs, coeffs: vec![ScalarExpr::zero(); n * n * n] }
    }

    pub fn cs(&self) -> &CoordSystem {
        &self.cs
    }

    pub fn coeff(&self, u: usize, v: usize, w: usize) -> &ScalarExpr {
        let n = self.cs.dim();
        &self.coeffs[(u * n + v) * n + w]
    }

    pub fn coeffs(&self) -> &[ScalarExpr] {
        &self.coeffs
    }

    pub fn is_flat(&self) -> bool {
        self.coeffs.iter().all(ScalarExpr::is_zero)
    }

    /// `∇_{∂_u} Y`.
    pub fn nabla_frame(&self, u: usize, y: &VectorField) -> VectorField {
        let cs = self.cs;
        let var = cs.var(u);
        VectorField::from_fn(cs, |w| {
            let mut acc = y.get(w).diff(var);
            for (v, yv) in y.comps().iter().enumerate() {
                let c = self.coeff(u, v, w);
                if !yv.is_zero() && !c.is_zero() {
                    acc += yv * c;
                }
            }
            acc
        })
    }

    /// `∇_X Y = X^u (∂_u Y^w + Y^v Γ_{uv}^w) ∂_w`.
    pub fn nabla(&self, x: &VectorField, y: &VectorField) -> VectorField {
        let mut out = VectorField::zero(self.cs);
        for (u, xu) in x.comps().iter().enumerate() {
            if !xu.is_zero() {
                out = &out + &self.nabla_frame(u, y).scale(xu);
            }
        }
        out
    }

    /// `X ∧_∇ Y`, defined by `γ(Z, X∧_∇Y) = ½[γ(X, ∇_Z Y) − γ(Y, ∇_Z X)]`.
    pub fn wedge(&self, x: &VectorField, y: &VectorField) -> VectorField {
        let w: Vec<ScalarExpr> = (0..self.cs.dim())
            .map(|u| (&gamma(x, &self.nabla_frame(u, y)) - &gamma(y, &self.nabla_frame(u, x))).half())
            .collect();
        sharp_gamma(self.cs, &w)
    }

    /// `Γ_{uv}^{w̄} + Γ_{uw}^{v̄} = 0`, with `v̄` the `γ`-partner index.
    pub fn preserves_gamma(&self) -> bool {
        let n = self.cs.dim();
        let p = |c| self.cs.partner(c);
        (0..n).all(|u| (0..n).all(|v| (v..n).all(|w| (self.coeff(u, v, p(w)) + self.coeff(u, w, p(v))).is_zero())))
    }

    pub fn require_gamma_preserving(&self) -> Result<()> {
        if self.preserves_gamma() {
            Ok(())
        } else {
            Err(Error::Precondition("connection does not preserve γ".into()))
        }
    }

    /// `∂_u h_vw = Γ_{uv}^a h_aw + Γ_{uw}^a h_va` for a symmetric 2-covector `h`.
    pub fn preserves_metric(&self, h: &Matrix) -> bool {
        let n = self.cs.dim();
        (0..n).all(|u| {
            let var = self.cs.var(u);
            (0..n).all(|v| {
                (v..n).all(|w| {
                    let mut r = h.get(v, w).diff(var);
                    for a in 0..n {
                        r -= self.coeff(u, v, a) * h.get(a, w);
                        r -= self.coeff(u, w, a) * h.get(v, a);
                    }
                    r.is_zero()
                })
            })
        })
    }

    /// `∇(ΦY) = Φ∇Y` for an endomorphism given by its matrix in the frame.
    pub fn commutes_with(&self, op: &Matrix) -> bool {
        let n = self.cs.dim();
        (0..n).all(|u| {
            let var = self.cs.var(u);
            (0..n).all(|a| {
                (0..n).all(|w| {
                    let mut r = op.get(w, a).diff(var);
                    for v in 0..n {
                        r += op.get(v, a) * self.coeff(u, v, w);
                        r -= op.get(w, v) * self.coeff(u, a, v);
                    }
                    r.is_zero()
                })
            })
        })
    }

    /// The connection 1-form trace `ϖ_u = Σ_v Γ_{uv}^v`.
    pub fn trace_form(&self) -> Vec<ScalarExpr> {
        let n = self.cs.dim();
        (0..n).map(|u| (0..n).map(|v| self.coeff(u, v, v).clone()).sum()).collect()
    }

    /// `∇ + Θ`.
    pub fn deform(&self, d: &DeformationTensor) -> Result<Connection> {
        if d.cs != self.cs {
            return Err(Error::Dimension("deformation on a different manifold".into()));
        }
        let coeffs = self.coeffs.iter().zip(&d.theta).map(|(a, b)| a + b).collect();
        Ok(Connection { cs: self.cs, coeffs })
    }

    /// `Θ = self − other`.
    pub fn difference(&self, other: &Connection) -> Result<DeformationTensor> {
        if other.cs != self.cs {
            return Err(Error::Dimension("connections on different manifolds".into()));
        }
        let theta: Vec<ScalarExpr> = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(DeformationTensor::from_theta(self.cs, theta))
    }
}

/// A deformation `∇ = ∇̃ + Θ` with covariant form `Ψ(X,Y,Z) = γ(Θ(X,Y), Z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationTensor {
    cs: CoordSystem,
    psi: Vec<ScalarExpr>,
    theta: Vec<ScalarExpr>,
}

impl DeformationTensor {
    /// From `Ψ_{uvz}`; `Θ_{uv}^w = Ψ_{uv w̄}`.
    pub fn from_psi(cs: CoordSystem, psi: Vec<ScalarExpr>) -> Result<DeformationTensor> {
        let n = cs.dim();
        if psi.len() != n * n * n {
            return Err(Error::Dimension("Ψ needs n³ components".into()));
        }
        let theta = (0..n * n * n)
            .map(|k| {
                let (uv, w) = (k / n, k % n);
                psi[uv * n + cs.partner(w)].clone()
            })
            .collect();
        Ok(DeformationTensor { cs, psi, theta })
    }

    fn from_theta(cs: CoordSystem, theta: Vec<ScalarExpr>) -> DeformationTensor {
        let n = cs.dim();
        let psi = (0..n * n * n)
            .map(|k| {
                let (uv, z) = (k / n, k % n);
                theta[uv * n + cs.partner(z)].clone()
            })
            .collect();
        DeformationTensor { cs, psi, theta }
    }

    pub fn psi(&self, u: usize, v: usize, z: usize) -> &ScalarExpr {
        let n = self.cs.dim();
        &self.psi[(u * n + v) * n + z]
    }

    pub fn theta(&self, u: usize, v: usize, w: usize) -> &ScalarExpr {
        let n = self.cs.dim();
        &self.theta[(u * n + v) * n + w]
    }

    pub fn is_zero(&self) -> bool {
        self.psi.iter().all(ScalarExpr::is_zero)
    }

    /// `Ψ(X,Y,Z) = −Ψ(X,Z,Y)`.
    pub fn antisymmetric_last_two(&self) -> bool {
        let n = self.cs.dim();
        (0..n).all(|u| (0..n).all(|v| (v..n).all(|z| (self.psi(u, v, z) + self.psi(u, z, v)).is_zero())))
    }

    pub fn totally_antisymmetric(&self) -> bool {
        let n = self.cs.dim();
        self.antisymmetric_last_two()
            && (0..n).all(|u| (0..n).all(|v| (0..n).all(|z| (self.psi(u, v, z) + self.psi(v, u, z)).is_zero())))
    }

    /// Components of `Alt(Ψ)`.
    pub fn alt(&self) -> Vec<ScalarExpr> {
        let n = self.cs.dim();
        let sixth = ScalarExpr::ratio(1, 6);
        let mut out = Vec::with_capacity(n * n * n);
        for u in 0..n {
            for v in 0..n {
                for z in 0..n {
                    let s = &(&(&(self.psi(u, v, z) + self.psi(v, z, u)) + self.psi(z, u, v)) - &(self.psi(v, u, z) + self.psi(u, z, v)))
                        - self.psi(z, v, u);
                    out.push(&s * &sixth);
                }
            }
        }
        out
    }

    /// Values of the symmetrization; zero whenever `Ψ` is skew in its last two slots.
    pub fn sym(&self) -> Vec<ScalarExpr> {
        let n = self.cs.dim();
        let sixth = ScalarExpr::ratio(1, 6);
        let mut out = Vec::with_capacity(n * n * n);
        for u in 0..n {
            for v in 0..n {
                for z in 0..n {
                    let s = [(u, v, z), (v, z, u), (z, u, v), (v, u, z), (u, z, v), (z, v, u)]
                        .iter()
                        .map(|&(a, b, c)| self.psi(a, b, c).clone())
                        .sum::<ScalarExpr>();
                    out.push(&s * &sixth);
                }
            }
        }
        out
    }

    pub fn psi_components(&self) -> &[ScalarExpr] {
        &self.psi
    }
}

/// The pseudo-Kronecker symbol `δ_(p)` on an `m = p + q` dimensional space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignatureDelta {
    pub p: usize,
    pub q: usize,
}

impl SignatureDelta {
    pub fn new(p: usize, q: usize) -> SignatureDelta {
        SignatureDelta { p, q }
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        if i != j || i >= self.p + self.q {
            0
        } else if i < self.p {
            1
        } else {
            -1
        }
    }
}

/// `∇⁰_Z Y`: componentwise derivative in the distinguished frame.
pub fn nabla0(z: &VectorField, y: &VectorField) -> VectorField {
    z.derive(y)
}

/// `[X, Y]^∇ = [X, Y]_{∇⁰} + X ∧_∇ Y`.
pub fn modified_bracket(conn: &Connection, x: &VectorField, y: &VectorField) -> Result<VectorField> {
    conn.require_gamma_preserving()?;
    Ok(modified_bracket_unchecked(conn, x, y))
}

pub(crate) fn modified_bracket_unchecked(conn: &Connection, x: &VectorField, y: &VectorField) -> VectorField {
    &c_bracket(x, y) + &conn.wedge(x, y)
}

/// `𝒯(X,Y,Z) = γ(∇_X Y − ∇_Y X − [X,Y]^∇, Z)`, expanded as
/// `γ(∇_X Y − ∇_Y X − [X,Y]_{∇⁰}, Z) + ½{γ(∇_Z X, Y) − γ(∇_Z Y, X)}`.
pub fn gualtieri_torsion(conn: &Connection, x: &VectorField, y: &VectorField, z: &VectorField) -> Result<ScalarExpr> {
    conn.require_gamma_preserving()?;
    let t = &(&conn.nabla(x, y) - &conn.nabla(y, x)) - &c_bracket(x, y);
    let corr = &gamma(&conn.nabla(z, x), y) - &gamma(&conn.nabla(z, y), x);
    Ok(&gamma(&t, z) + &corr.half())
}

/// A connection on `L` along all of `TM`: `D_{∂_u} e_b = ω_{ub}^a e_a` with
/// `u` over the `2m` frame directions and `a, b` over `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct LConnection {
    cs: CoordSystem,
    coeffs: Vec<ScalarExpr>,
}

impl LConnection {
    pub fn from_fn(cs: CoordSystem, mut f: impl FnMut(usize, usize, usize) -> ScalarExpr) -> LConnection {
        let (n, m) = (cs.dim(), cs.m());
        let mut coeffs = Vec::with_capacity(n * m * m);
        for u in 0..n {
            for b in 0..m {
                for a in 0..m {
                    coeffs.push(f(u, b, a));
                }
            }
        }
        LConnection { cs, coeffs }
    }

    /// The flat derivative along the distinguished frame.
    pub fn flat(cs: CoordSystem) -> LConnection {
        LConnection::from_fn(cs, |_, _, _| ScalarExpr::zero())
    }

    pub fn cs(&self) -> &CoordSystem {
        &self.cs
    }

    pub fn coeff(&self, u: usize, b: usize, a: usize) -> &ScalarExpr {
        let m = self.cs.m();
        &self.coeffs[(u * m + b) * m + a]
    }

    /// `D_Z Y` for `Y ∈ L` given by its `m` components.
    pub fn along(&self, z: &VectorField, y: &[ScalarExpr]) -> Vec<ScalarExpr> {
        let m = self.cs.m();
        let mut out = vec![ScalarExpr::zero(); m];
        for (u, zu) in z.comps().iter().enumerate() {
            if zu.is_zero() {
                continue;
            }
            let var = self.cs.var(u);
            for a in 0..m {
                let mut acc = y[a].diff(var);
                for (b, yb) in y.iter().enumerate() {
                    let c = self.coeff(u, b, a);
                    if !yb.is_zero() && !c.is_zero() {
                        acc += yb * c;
                    }
                }
                out[a] += zu * &acc;
            }
        }
        out
    }

    /// `Z(g(X,Y)) = g(D_Z X, Y) + g(X, D_Z Y)` on frames.
    pub fn preserves_metric(&self, g: &Matrix) -> bool {
        let (n, m) = (self.cs.dim(), self.cs.m());
        (0..n).all(|u| {
            let var = self.cs.var(u);
            (0..m).all(|b| {
                (b..m).all(|c| {
                    let mut r = g.get(b, c).diff(var);
                    for a in 0..m {
                        r -= self.coeff(u, b, a) * g.get(a, c);
                        r -= self.coeff(u, c, a) * g.get(b, a);
                    }
                    r.is_zero()
                })
            })
        })
    }
}

/// The connection with `∇_Z(ι±X) = ι±(D±_Z X)`, assembled in the `ι±`-frame
/// `P` and rewritten in the distinguished frame.
pub fn build_double_metric(d_plus: &LConnection, d_minus: &LConnection, field: &FieldSpec) -> Result<Connection> {
    if !d_plus.preserves_metric(field.g()) || !d_minus.preserves_metric(field.g()) {
        return Err(Error::Precondition("D± must preserve g".into()));
    }
    Ok(assemble(d_plus, d_minus, field))
}

pub(crate) fn assemble(d_plus: &LConnection, d_minus: &LConnection, field: &FieldSpec) -> Connection {
    let cs = *field.cs();
    let (n, m) = (cs.dim(), cs.m());
    let p = field.iota_frame();
    let q = field.iota_coframe();
    let mut coeffs = vec![ScalarExpr::zero(); n * n * n];
    for u in 0..n {
        // Ω_u[A][B] = ω_{uB}^A, block diagonal over S₊ ⊕ S₋.
        let omega = Matrix::from_fn(n, n, |a, b| match (a < m, b < m) {
            (true, true) => d_plus.coeff(u, b, a).clone(),
            (false, false) => d_minus.coeff(u, b - m, a - m).clone(),
            _ => ScalarExpr::zero(),
        });
        let c = &q.diff(cs.var(u)) + &(&omega * &q);
        let g_u = &p * &c;
        for v in 0..n {
            for w in 0..n {
                coeffs[(u * n + v) * n + w] = g_u.get(w, v).clone();
            }
        }
    }
    Connection { cs, coeffs }
}

/// `σ±(X, Y)` for `X, Y ∈ S±`, as coframe components:
/// `⟨σ±(X,Y), Z⟩ = ±(g(X_L, D±_Z Y_L) − g(D±_Z X_L, Y_L))`.
pub fn sigma(sign: Sign, d: &LConnection, field: &FieldSpec, x: &VectorField, y: &VectorField) -> Vec<ScalarExpr> {
    let cs = *field.cs();
    let (xl, yl) = (x.base(), y.base());
    let g = field.g();
    let s = ScalarExpr::from_int(sign.factor());
    (0..cs.dim())
        .map(|u| {
            let z = VectorField::frame(cs, u);
            let r = &g.bilinear(xl, &d.along(&z, yl)) - &g.bilinear(&d.along(&z, xl), yl);
            &s * &r
        })
        .collect()
}

/// `pr_L pr_{S±}` of a vector.
pub(crate) fn pr_l_spm(sign: Sign, z: &VectorField, field: &FieldSpec) -> Vec<ScalarExpr> {
    let (x1, x2) = spm_coefficients(z, field);
    match sign {
        Sign::Plus => x1,
        Sign::Minus => x2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genmetric::{iota, splitting};
    use crate::symcore::parse_scalar;

    fn vf(cs: CoordSystem, comps: &[&str]) -> VectorField {
        VectorField::new(cs, comps.iter().map(|s| parse_scalar(s, &cs).unwrap()).collect()).unwrap()
    }

    #[test]
    fn nabla0_examples() {
        let cs = CoordSystem::new(2).unwrap();
        let z = VectorField::frame(cs, 0);
        assert_eq!(nabla0(&z, &vf(cs, &["0", "x1", "0", "0"])), VectorField::frame(cs, 1));
        assert!(nabla0(&vf(cs, &["x2", "xt1", "1", "0"]), &vf(cs, &["3", "0", "1", "-2"])).is_zero());
        let flat = Connection::flat(cs);
        assert!(flat.preserves_gamma());
        let (x, y) = (vf(cs, &["x1*xt2", "1", "x2", "0"]), vf(cs, &["0", "xt1", "x1^2", "1"]));
        assert_eq!(modified_bracket(&flat, &x, &y).unwrap(), x.lie_bracket(&y));
    }

    #[test]
    fn gualtieri_torsion_of_flat_is_skew() {
        let cs = CoordSystem::new(2).unwrap();
        let flat = Connection::flat(cs);
        let x = vf(cs, &["x1*xt2", "1", "x2", "0"]);
        let y = vf(cs, &["0", "xt1", "x1^2", "1"]);
        let z = vf(cs, &["x2", "0", "1", "x1"]);
        let t = |a, b, c| gualtieri_torsion(&flat, a, b, c).unwrap();
        let v = t(&x, &y, &z);
        assert!((&v + &t(&y, &x, &z)).is_zero());
        assert!((&v + &t(&x, &z, &y)).is_zero());
    }

    #[test]
    fn flat_double_metric_is_flat() {
        let cs = CoordSystem::new(2).unwrap();
        let f = FieldSpec::flat(cs);
        let c = build_double_metric(&LConnection::flat(cs), &LConnection::flat(cs), &f).unwrap();
        assert!(c.is_flat());
    }

    #[test]
    fn non_metric_l_connection_rejected() {
        let cs = CoordSystem::new(2).unwrap();
        let f = FieldSpec::flat(cs);
        let bad = LConnection::from_fn(cs, |u, b, a| if (u, b, a) == (0, 0, 0) { ScalarExpr::one() } else { ScalarExpr::zero() });
        assert!(build_double_metric(&bad, &LConnection::flat(cs), &f).is_err());
    }

    #[test]
    fn double_metric_acts_through_iota() {
        let cs = CoordSystem::new(2).unwrap();
        let g = Matrix::from_rows(vec![
            vec![parse_scalar("1 + x1^2", &cs).unwrap(), ScalarExpr::zero()],
            vec![ScalarExpr::zero(), ScalarExpr::one()],
        ])
        .unwrap();
        let b = Matrix::from_rows(vec![
            vec![ScalarExpr::zero(), parse_scalar("x2", &cs).unwrap()],
            vec![parse_scalar("-x2", &cs).unwrap(), ScalarExpr::zero()],
        ])
        .unwrap();
        let f = FieldSpec::with_metric(cs, g, b, ScalarExpr::zero()).unwrap();
        let (dp, dm) = cwt_l_connections(&f).unwrap();
        let conn = build_double_metric(&dp, &dm, &f).unwrap();
        let s = splitting(&f);
        let z = vf(cs, &["x2", "1", "0", "xt1"]);
        let y = [parse_scalar("x1", &cs).unwrap(), ScalarExpr::one()];
        let yv = VectorField::from_parts(cs, &y, &[ScalarExpr::zero(), ScalarExpr::zero()]).unwrap();
        let lhs = conn.nabla(&z, &iota(Sign::Plus, &yv, &f).unwrap());
        let dy = VectorField::from_parts(cs, &dp.along(&z, &y), &[ScalarExpr::zero(), ScalarExpr::zero()]).unwrap();
        assert_eq!(lhs, iota(Sign::Plus, &dy, &f).unwrap());
        assert!(conn.preserves_gamma());
        assert_eq!(s.plus.len(), 2);
    }
}
