//! Weight-`s` densities of `TM` in the distinguished trivialization
//! `|∂/∂x^1 ∧ … ∧ ∂/∂x̃_m|^s`, their generalized Lie derivative and the
//! connections induced on them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::genmetric::{build_h, FieldSpec};
use crate::symcore::{CoordSystem, ScalarExpr, MAX_VARS};
use crate::tensor::{Matrix, VectorField};

#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    cs: CoordSystem,
    weight: BigRational,
    theta: ScalarExpr,
}

impl Density {
    pub fn new(cs: CoordSystem, weight: BigRational, theta: ScalarExpr) -> Density {
        Density { cs, weight, theta }
    }

    pub fn cs(&self) -> &CoordSystem {
        &self.cs
    }

    pub fn weight(&self) -> &BigRational {
        &self.weight
    }

    pub fn theta(&self) -> &ScalarExpr {
        &self.theta
    }

    pub fn is_strongly_foliated(&self) -> bool {
        self.theta.is_foliated()
    }

    /// The component in the coordinates of `change`: `|det ψ|^s · ϑ`, with
    /// `ψ` the Jacobian of the new coordinates in the old ones.
    pub fn transform(&self, change: &AffineChange) -> Result<Density> {
        let factor = weight_factor(&change.jacobian_det(), &self.weight)?;
        let theta = change.pull_scalar(&self.theta)?;
        Ok(Density { cs: self.cs, weight: self.weight.clone(), theta: theta.scale(&factor) })
    }
}

/// `div_L X = Σ ∂ξ^i/∂x^i` over the `L`-components.
pub fn div_l(x: &VectorField) -> ScalarExpr {
    let cs = x.cs();
    x.base().iter().enumerate().map(|(i, xi)| xi.diff(cs.var(i))).sum()
}

/// `𝔏_X θ = (𝔏_X ϑ + s ϑ div_L X) |∂ ∧ … ∧ ∂̃|^s` for strongly foliated `X` and `θ`.
pub fn lie_density(x: &VectorField, d: &Density) -> Result<Density> {
    if !x.is_foliated() {
        return Err(Error::Precondition("X must be strongly foliated".into()));
    }
    if !d.is_strongly_foliated() {
        return Err(Error::Precondition("density must be strongly foliated".into()));
    }
    let s = ScalarExpr::from_rational(d.weight.clone());
    let theta = &x.apply(&d.theta) + &(&(&s * &d.theta) * &div_l(x));
    Ok(Density { cs: d.cs, weight: d.weight.clone(), theta })
}

/// `s·ϖ` with `ϖ_u = Σ_v Γ_{uv}^v`, the connection form on weight-`s` densities.
pub fn induced_density_connection(conn: &Connection, s: &BigRational) -> Vec<ScalarExpr> {
    let s = ScalarExpr::from_rational(s.clone());
    conn.trace_form().iter().map(|w| &s * w).collect()
}

/// Components of `∇θ`: `(∂_u ϑ + s ϖ_u ϑ) du`.
pub fn covariant_derivative(conn: &Connection, d: &Density) -> Vec<ScalarExpr> {
    let cs = *conn.cs();
    induced_density_connection(conn, &d.weight)
        .iter()
        .enumerate()
        .map(|(u, w)| &d.theta.diff(cs.var(u)) + &(w * &d.theta))
        .collect()
}

/// `d(vol_ℋ)` as a weight `−1` density, `ϑ = √|det ℋ|`.
pub fn volume_density(field: &FieldSpec) -> Result<Density> {
    let det = build_h(field).h().det();
    let theta = det
        .as_constant()
        .and_then(|c| rational_sqrt(&c.abs()))
        .map(ScalarExpr::from_rational)
        .ok_or_else(|| Error::Invalid(format!("√|det ℋ| is not rational: det ℋ = {det}")))?;
    Ok(Density { cs: *field.cs(), weight: -BigRational::one(), theta })
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    rational_root(r, 2)
}

fn integer_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let r = n.nth_root(k);
    (num_traits::pow(r.clone(), k as usize) == *n).then_some(r)
}

fn rational_root(r: &BigRational, k: u32) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    Some(BigRational::new(integer_root(r.numer(), k)?, integer_root(r.denom(), k)?))
}

/// `|det|^s`, exactly; fails when the root is irrational.
pub fn weight_factor(det: &BigRational, s: &BigRational) -> Result<BigRational> {
    if det.is_zero() {
        return Err(Error::Singular { what: "frame change".into(), det: det.to_string() });
    }
    let k = u32::try_from(s.denom()).map_err(|_| Error::Invalid("weight denominator too large".into()))?;
    let base = rational_root(&det.abs(), k)
        .ok_or_else(|| Error::Invalid(format!("|{det}|^{s} is not rational")))?;
    let e = i32::try_from(s.numer()).map_err(|_| Error::Invalid("weight numerator too large".into()))?;
    let p = num_traits::pow(base, e.unsigned_abs() as usize);
    Ok(if e < 0 { p.recip() } else { p })
}

/// An affine change of coordinates `old = M·new + c` with constant `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineChange {
    cs: CoordSystem,
    old_from_new: Vec<Vec<BigRational>>,
    offset: Vec<BigRational>,
    jacobian: Vec<Vec<BigRational>>,
}

impl AffineChange {
    pub fn new(cs: CoordSystem, old_from_new: Vec<Vec<BigRational>>, offset: Vec<BigRational>) -> Result<AffineChange> {
        let n = cs.dim();
        if old_from_new.len() != n || old_from_new.iter().any(|r| r.len() != n) || offset.len() != n {
            return Err(Error::Dimension(format!("affine change must be {n}×{n} with a {n}-vector offset")));
        }
        let m = constant_matrix(&old_from_new);
        let inv = m.inverse().map_err(|_| Error::Singular { what: "affine change".into(), det: m.det().to_string() })?;
        let jacobian = (0..n)
            .map(|i| (0..n).map(|j| inv.get(i, j).as_constant().expect("constant inverse")).collect())
            .collect();
        Ok(AffineChange { cs, old_from_new, offset, jacobian })
    }

    /// The distinguished-coordinate form `x = αx' + α₀`, `x̃ = βx̃' + β₀` with `αᵀβ = Id`.
    pub fn locafin(
        cs: CoordSystem,
        alpha: &[Vec<BigRational>],
        alpha0: &[BigRational],
        beta0: &[BigRational],
    ) -> Result<AffineChange> {
        let m = cs.m();
        let a = constant_matrix(alpha);
        let beta = a.transpose().inverse().map_err(|_| Error::Singular { what: "α".into(), det: a.det().to_string() })?;
        let zero = BigRational::zero();
        let mut full = vec![vec![zero; 2 * m]; 2 * m];
        for i in 0..m {
            for j in 0..m {
                full[i][j] = alpha[i][j].clone();
                full[m + i][m + j] = beta.get(i, j).as_constant().expect("constant inverse");
            }
        }
        let offset = alpha0.iter().chain(beta0).cloned().collect();
        AffineChange::new(cs, full, offset)
    }

    /// Whether the change has the block form `diag(α, α^{-T})`.
    pub fn is_locafin(&self) -> bool {
        let m = self.cs.m();
        let mixed = (0..m).all(|i| (0..m).all(|j| self.old_from_new[i][m + j].is_zero() && self.old_from_new[m + i][j].is_zero()));
        mixed
            && (0..m).all(|j| {
                (0..m).all(|k| {
                    let s: BigRational = (0..m).map(|i| &self.old_from_new[i][j] * &self.old_from_new[m + i][m + k]).sum();
                    s == if j == k { BigRational::one() } else { BigRational::zero() }
                })
            })
    }

    /// `ψ = ∂(new)/∂(old)`.
    pub fn jacobian(&self) -> &[Vec<BigRational>] {
        &self.jacobian
    }

    pub fn jacobian_det(&self) -> BigRational {
        constant_matrix(&self.jacobian).det().as_constant().expect("constant matrix")
    }

    /// `f ∘ old`, written in the new coordinates.
    pub fn pull_scalar(&self, f: &ScalarExpr) -> Result<ScalarExpr> {
        let mut images: [ScalarExpr; MAX_VARS] = std::array::from_fn(|_| ScalarExpr::zero());
        for (k, row) in self.old_from_new.iter().enumerate() {
            let mut img = ScalarExpr::from_rational(self.offset[k].clone());
            for (l, c) in row.iter().enumerate() {
                img = &img + &ScalarExpr::var(self.cs.var(l)).scale(c);
            }
            images[self.cs.var(k).index()] = img;
        }
        Ok(f.compose(&images)?)
    }

    /// Components of `X` in the new frame, `X'^a = ψ^a_b X^b`, in the new coordinates.
    pub fn push_vector(&self, x: &VectorField) -> Result<VectorField> {
        let pulled: Vec<ScalarExpr> = x.comps().iter().map(|c| self.pull_scalar(c)).collect::<Result<_>>()?;
        let comps = self
            .jacobian
            .iter()
            .map(|row| row.iter().zip(&pulled).map(|(p, c)| c.scale(p)).sum())
            .collect();
        VectorField::new(self.cs, comps)
    }
}

fn constant_matrix(rows: &[Vec<BigRational>]) -> Matrix {
    Matrix::from_fn(rows.len(), rows.first().map_or(0, Vec::len), |i, j| ScalarExpr::from_rational(rows[i][j].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{cwt_connection, vtc_connection};
    use crate::symcore::parse_scalar;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn vf(cs: CoordSystem, comps: &[&str]) -> VectorField {
        VectorField::new(cs, comps.iter().map(|s| parse_scalar(s, &cs).unwrap()).collect()).unwrap()
    }

    #[test]
    fn divergence_examples() {
        let cs = CoordSystem::new(2).unwrap();
        assert!(div_l(&vf(cs, &["x1", "0", "0", "0"])).is_one());
        assert!(div_l(&vf(cs, &["0", "0", "1", "0"])).is_zero());
        assert!(div_l(&vf(cs, &["x2", "x1", "0", "0"])).is_zero());
    }

    #[test]
    fn lie_density_examples() {
        let cs = CoordSystem::new(2).unwrap();
        let one = Density::new(cs, q(1, 1), ScalarExpr::one());
        assert!(lie_density(&vf(cs, &["x1", "0", "0", "0"]), &one).unwrap().theta().is_one());
        let th = parse_scalar("x1^2*x2 + 3", &cs).unwrap();
        let d = Density::new(cs, q(5, 2), th.clone());
        let got = lie_density(&vf(cs, &["1", "0", "0", "0"]), &d).unwrap();
        assert_eq!(got.theta(), &th.diff(cs.var(0)));
        let x = vf(cs, &["x2", "x1*x2", "x1", "0"]);
        let scalar = Density::new(cs, q(0, 1), th.clone());
        assert_eq!(lie_density(&x, &scalar).unwrap().theta(), &x.apply(&th));
        let bad = Density::new(cs, q(1, 1), parse_scalar("xt1", &cs).unwrap());
        assert!(lie_density(&x, &bad).is_err());
        assert!(lie_density(&vf(cs, &["xt1", "0", "0", "0"]), &one).is_err());
    }

    #[test]
    fn weight_factor_roots() {
        assert_eq!(weight_factor(&q(-4, 9), &q(1, 2)).unwrap(), q(2, 3));
        assert_eq!(weight_factor(&q(2, 1), &q(-2, 1)).unwrap(), q(1, 4));
        assert!(weight_factor(&q(2, 1), &q(1, 2)).is_err());
        assert!(weight_factor(&q(0, 1), &q(1, 1)).is_err());
    }

    #[test]
    fn locafin_changes_preserve_volume() {
        let cs = CoordSystem::new(2).unwrap();
        let alpha = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 3), q(1, 1)]];
        let ch = AffineChange::locafin(cs, &alpha, &[q(1, 1), q(0, 1)], &[q(-1, 2), q(3, 1)]).unwrap();
        assert!(ch.is_locafin());
        assert!(ch.jacobian_det().is_one());
        let th = parse_scalar("x1*x2 + 1", &cs).unwrap();
        let d = Density::new(cs, q(2, 1), th.clone());
        assert_eq!(d.transform(&ch).unwrap().theta(), &ch.pull_scalar(&th).unwrap());
    }

    #[test]
    fn volume_density_is_parallel() {
        let cs = CoordSystem::new(2).unwrap();
        let g = Matrix::diagonal(&[parse_scalar("1 + x1^2", &cs).unwrap(), ScalarExpr::one()]);
        let mut b = Matrix::zeros(2, 2);
        b.set(0, 1, parse_scalar("x2", &cs).unwrap());
        b.set(1, 0, parse_scalar("-x2", &cs).unwrap());
        let f = FieldSpec::with_metric(cs, g, b, ScalarExpr::zero()).unwrap();
        let vol = volume_density(&f).unwrap();
        assert!(vol.theta().is_one());
        for conn in [cwt_connection(&f).unwrap(), vtc_connection(&f).unwrap(), Connection::flat(cs)] {
            assert!(covariant_derivative(&conn, &vol).iter().all(ScalarExpr::is_zero));
        }
        assert!(induced_density_connection(&Connection::flat(cs), &q(3, 1)).iter().all(ScalarExpr::is_zero));
    }
}
