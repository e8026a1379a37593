//! Fields `(g, B, φ)`, the generalized metric `ℋ`, the almost product `Φ`,
//! the `S±` splitting and generalized Killing fields.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::algebroid::gen_lie_derivative;
use crate::error::{Error, Result};
use crate::symcore::{full_point, CoordSystem, ScalarExpr};
use crate::tensor::{gamma_matrix, Matrix, Slot, TensorField, VectorField};

/// A field: metric `g` and 2-form `B = ½ B_ij dx^i ∧ dx^j` on `L`, and the
/// dilaton `φ`, with the declared inertia indices `(p, q)` of `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSpec {
    cs: CoordSystem,
    g: Matrix,
    b: Matrix,
    phi: ScalarExpr,
    p: usize,
    q: usize,
    g_inv: Matrix,
    reference_point: Option<Vec<BigRational>>,
}

impl FieldSpec {
    /// Validates and builds a field. When `reference_point` is given, the
    /// signature of `g` there must equal `(p, q)`.
    pub fn new(
        cs: CoordSystem,
        g: Matrix,
        b: Matrix,
        phi: ScalarExpr,
        p: usize,
        q: usize,
        reference_point: Option<Vec<BigRational>>,
    ) -> Result<FieldSpec> {
        let m = cs.m();
        if g.rows() != m || g.cols() != m || b.rows() != m || b.cols() != m {
            return Err(Error::Dimension(format!("g and B must be {m}x{m}")));
        }
        if p + q != m {
            return Err(Error::Invalid(format!("inertia indices p = {p}, q = {q} do not add up to m = {m}")));
        }
        if !g.is_symmetric() {
            return Err(Error::Invalid("g is not symmetric".into()));
        }
        if !b.is_antisymmetric() {
            return Err(Error::Invalid("B is not antisymmetric".into()));
        }
        let g_inv = g.inverse().map_err(|_| Error::Degenerate("metric g (det g = 0)".into()))?;
        let field = FieldSpec { cs, g, b, phi, p, q, g_inv, reference_point };
        if let Some(pt) = &field.reference_point {
            let (pp, qq) = field.signature_at(pt)?;
            if (pp, qq) != (p, q) {
                return Err(Error::Invalid(format!("g has signature ({pp}, {qq}) at the reference point, declared ({p}, {q})")));
            }
        }
        Ok(field)
    }

    /// Riemannian-signature convenience constructor without a reference point.
    pub fn with_metric(cs: CoordSystem, g: Matrix, b: Matrix, phi: ScalarExpr) -> Result<FieldSpec> {
        let m = cs.m();
        FieldSpec::new(cs, g, b, phi, m, 0, None)
    }

    /// `g = Id`, `B = 0`, `φ = 0`.
    pub fn flat(cs: CoordSystem) -> FieldSpec {
        FieldSpec::with_metric(cs, Matrix::identity(cs.m()), Matrix::zeros(cs.m(), cs.m()), ScalarExpr::zero())
            .expect("identity metric")
    }

    pub fn cs(&self) -> &CoordSystem {
        &self.cs
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn g_inv(&self) -> &Matrix {
        &self.g_inv
    }

    pub fn phi(&self) -> &ScalarExpr {
        &self.phi
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn reference_point(&self) -> Option<&[BigRational]> {
        self.reference_point.as_deref()
    }

    /// Inertia indices of `g` at a point (frame order, `2m` rationals).
    pub fn signature_at(&self, point: &[BigRational]) -> Result<(usize, usize)> {
        let full = full_point(point, &self.cs)?;
        let vals = self.g.eval(&full)?;
        let (pos, neg, zero) = rational_inertia(vals);
        if zero > 0 {
            return Err(Error::Degenerate("metric g at the point".into()));
        }
        Ok((pos, neg))
    }

    /// `ψ = ♯_g ∘ ♭_B` as the matrix `−g⁻¹B`, so that `A± = ½(Id ± ψ)`.
    fn sharp_g_flat_b(&self) -> Matrix {
        -&(&self.g_inv * &self.b)
    }

    /// `A± = ½(Id ± ♯_g♭_B)`.
    pub fn a_pm(&self, sign: Sign) -> Matrix {
        let s = self.sharp_g_flat_b();
        let id = Matrix::identity(self.cs.m());
        let sum = match sign {
            Sign::Plus => &id + &s,
            Sign::Minus => &id - &s,
        };
        sum.scale(&ScalarExpr::ratio(1, 2))
    }

    /// Tilde block of `ι±`: `♭_{B±g}` as the matrix `±g − B`.
    pub fn flat_b_pm_g(&self, sign: Sign) -> Matrix {
        match sign {
            Sign::Plus => &self.g - &self.b,
            Sign::Minus => &(-&self.g) - &self.b,
        }
    }

    /// The frame `P = [ι₊e_1..ι₊e_m, ι₋e_1..ι₋e_m]` as columns.
    pub fn iota_frame(&self) -> Matrix {
        let m = self.cs.m();
        let id = Matrix::identity(m);
        Matrix::from_blocks(&id, &id, &self.flat_b_pm_g(Sign::Plus), &self.flat_b_pm_g(Sign::Minus))
    }

    /// `P⁻¹`: rows give the `S₊` and `S₋` coefficients of a vector.
    pub fn iota_coframe(&self) -> Matrix {
        let m = self.cs.m();
        let id = Matrix::identity(m);
        let gb = &self.g_inv * &self.b;
        let half = ScalarExpr::ratio(1, 2);
        Matrix::from_blocks(&(&id + &gb), &self.g_inv, &(&id - &gb), &(-&self.g_inv)).scale(&half)
    }

    /// Components of `g` depend on no tilde coordinate (nor do `B`, `φ`).
    pub fn level_matched(&self) -> bool {
        self.g.entries().iter().chain(self.b.entries()).all(ScalarExpr::is_foliated) && self.phi.is_foliated()
    }
}

/// Counts positive, negative and zero eigenvalues of a symmetric rational
/// matrix by congruence diagonalization.
fn rational_inertia(mut a: Vec<Vec<BigRational>>) -> (usize, usize, usize) {
    let n = a.len();
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while let Some(&first) = active.first() {
        let _ = first;
        let pivot = active.iter().copied().find(|&i| !a[i][i].is_zero());
        let k = match pivot {
            Some(k) => k,
            None => {
                let pair = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !a[i][j].is_zero());
                let Some((i, j)) = pair else {
                    break;
                };
                // Row/column i += row/column j makes the diagonal entry 2 a_ij.
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[i][c] += v;
                }
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][i] += v;
                }
                i
            }
        };
        let d = a[k][k].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&i| i != k);
        for &i in &active {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &d;
            for &j in &active {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
    }
    (pos, neg, n - pos - neg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// The generalized metric `ℋ` and `Φ = ♯_ℋ ∘ ♭_γ` in the distinguished frame.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedMetric {
    cs: CoordSystem,
    h: Matrix,
    phi_op: Matrix,
}

impl GeneralizedMetric {
    /// Validates a candidate `ℋ`: symmetric, nondegenerate on `L*`, and `γ`-compatible (`Φ² = Id`).
    pub fn from_matrix(cs: CoordSystem, h: Matrix) -> Result<GeneralizedMetric> {
        let n = cs.dim();
        if h.rows() != n || h.cols() != n {
            return Err(Error::Dimension(format!("H must be {n}x{n}")));
        }
        if !h.is_symmetric() {
            return Err(Error::Invalid("H is not symmetric".into()));
        }
        let m = cs.m();
        if h.block(m, m, m, m).det().is_zero() {
            return Err(Error::Degenerate("restriction of H to L*".into()));
        }
        let phi_op = &gamma_matrix(&cs) * &h;
        if &phi_op * &phi_op != Matrix::identity(n) {
            return Err(Error::Invalid("H is not compatible with γ (Φ² ≠ Id)".into()));
        }
        Ok(GeneralizedMetric { cs, h, phi_op })
    }

    pub fn cs(&self) -> &CoordSystem {
        &self.cs
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn phi_op(&self) -> &Matrix {
        &self.phi_op
    }

    pub fn to_tensor(&self) -> TensorField {
        TensorField::from_matrix(self.cs, [Slot::Covector, Slot::Covector], &self.h).expect("shape")
    }

    pub fn pair(&self, x: &VectorField, y: &VectorField) -> ScalarExpr {
        self.h.bilinear(x.comps(), y.comps())
    }

    pub fn apply_phi(&self, x: &VectorField) -> VectorField {
        VectorField::new(self.cs, self.phi_op.mul_vec(x.comps())).expect("dimension")
    }
}

/// `ℋ` of a field: `H_xx = g − Bg⁻¹B`, `H(∂/∂x^i, ∂/∂x̃_j) = g^{jk}B_ki`, `H_x̃x̃ = g⁻¹`.
pub fn build_h(field: &FieldSpec) -> GeneralizedMetric {
    let cs = field.cs;
    let gi = &field.g_inv;
    let b = &field.b;
    let xx = &field.g - &(&(b * gi) * b);
    let xt = (gi * b).transpose();
    let h = Matrix::from_blocks(&xx, &xt, &xt.transpose(), gi);
    let phi_op = &gamma_matrix(&cs) * &h;
    GeneralizedMetric { cs, h, phi_op }
}

/// Reads `(g, B)` back from `ℋ`: `g` from the `L*` block, `ψ` from the mixed
/// block, and `♭_B = −♭_g ∘ ψ`. The dilaton is not encoded in `ℋ` and is
/// returned as zero.
pub fn recover_field(h: &GeneralizedMetric) -> Result<FieldSpec> {
    let cs = h.cs;
    let m = cs.m();
    let g = h.h.block(m, m, m, m).inverse().map_err(|_| Error::Degenerate("restriction of H to L*".into()))?;
    let psi = h.h.block(0, m, m, m).transpose();
    let b = &g * &psi;
    FieldSpec::with_metric(cs, g, b, ScalarExpr::zero())
}

/// The blocks `(ψ, g̃, g)` of `Φ = [[ψ, ♯_g], [♭_g̃, ᵗψ]]`, for checking the
/// product relations.
pub fn phi_blocks(h: &GeneralizedMetric) -> (Matrix, Matrix, Matrix) {
    let m = h.cs.m();
    let phi = &h.phi_op;
    let psi = phi.block(0, 0, m, m);
    let g_up = phi.block(0, m, m, m);
    let g_tilde = phi.block(m, 0, m, m);
    (psi, g_tilde, g_up)
}

fn require_in_l(x: &VectorField) -> Result<()> {
    if !x.in_l() {
        return Err(Error::Precondition("argument must lie in L".into()));
    }
    Ok(())
}

/// `ι±X = X + ♯_γ ♭_{B±g} X` for `X ∈ L`.
pub fn iota(sign: Sign, x: &VectorField, field: &FieldSpec) -> Result<VectorField> {
    require_in_l(x)?;
    Ok(iota_of(sign, x.base(), field))
}

pub(crate) fn iota_of(sign: Sign, x: &[ScalarExpr], field: &FieldSpec) -> VectorField {
    let tilde = field.flat_b_pm_g(sign).mul_vec(x);
    VectorField::from_parts(field.cs, x, &tilde).expect("m components")
}

/// `(ι₊X₁, ι₋X₂)` with `X₁ = ½[X + g⁻¹(BX + α)]`, `X₂ = ½[X − g⁻¹(BX + α)]`.
pub fn decompose_spm(z: &VectorField, field: &FieldSpec) -> (VectorField, VectorField) {
    let (x1, x2) = spm_coefficients(z, field);
    (iota_of(Sign::Plus, &x1, field), iota_of(Sign::Minus, &x2, field))
}

/// `pr_L pr_{S±}` of a vector: the `L`-vectors `(X₁, X₂)`.
pub fn spm_coefficients(z: &VectorField, field: &FieldSpec) -> (Vec<ScalarExpr>, Vec<ScalarExpr>) {
    let x = z.base();
    let bx = field.b.mul_vec(x);
    let s: Vec<ScalarExpr> = bx.iter().zip(z.tilde()).map(|(a, b)| a + b).collect();
    let t = field.g_inv.mul_vec(&s);
    let x1 = x.iter().zip(&t).map(|(a, b)| (a + b).half()).collect();
    let x2 = x.iter().zip(&t).map(|(a, b)| (a - b).half()).collect();
    (x1, x2)
}

/// Bases `ι±e_i` of `S±`.
#[derive(Clone, Debug, PartialEq)]
pub struct Splitting {
    pub plus: Vec<VectorField>,
    pub minus: Vec<VectorField>,
}

pub fn splitting(field: &FieldSpec) -> Splitting {
    let m = field.cs.m();
    let e = |i: usize| -> Vec<ScalarExpr> {
        (0..m).map(|k| if k == i { ScalarExpr::one() } else { ScalarExpr::zero() }).collect()
    };
    Splitting {
        plus: (0..m).map(|i| iota_of(Sign::Plus, &e(i), field)).collect(),
        minus: (0..m).map(|i| iota_of(Sign::Minus, &e(i), field)).collect(),
    }
}

/// True iff no component of the tensor depends on a tilde coordinate.
pub fn check_level_matching_tensor(t: &TensorField) -> bool {
    t.is_foliated()
}

/// True iff `g`, `B`, `φ` depend on the base coordinates only.
pub fn check_level_matching(field: &FieldSpec) -> bool {
    field.level_matched()
}

/// Classical Lie derivative along `X ∈ L` of a 2-covariant tensor on `L`.
fn lie_l_two_form(cs: &CoordSystem, xi: &[ScalarExpr], t: &Matrix) -> Matrix {
    let m = cs.m();
    let d = |f: &ScalarExpr, k: usize| f.diff(cs.var(k));
    Matrix::from_fn(m, m, |i, j| {
        let mut acc = ScalarExpr::zero();
        for k in 0..m {
            acc += &xi[k] * &d(t.get(i, j), k);
            acc += t.get(k, j) * &d(&xi[k], i);
            acc += t.get(i, k) * &d(&xi[k], j);
        }
        acc
    })
}

/// Outcome of the two generalized-Killing decision procedures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KillingReport {
    /// `𝔏_X ℋ = 0`.
    pub generalized: bool,
    /// `ℒ_{pr_L X} g = 0` and `ℒ_{pr_L X} B = 0`.
    pub classical: bool,
}

/// Decides `𝔏_X ℋ = 0` directly and through the `L`-Lie-derivative criterion.
pub fn killing_report(x: &VectorField, field: &FieldSpec) -> Result<KillingReport> {
    if !field.level_matched() {
        return Err(Error::Precondition("field does not satisfy level matching".into()));
    }
    if !x.is_foliated() {
        return Err(Error::Precondition("X is not strongly foliated".into()));
    }
    let h = build_h(field).to_tensor();
    let generalized = gen_lie_derivative(x, &h)?.is_zero();
    let xi = x.base();
    let classical = lie_l_two_form(&field.cs, xi, &field.g).is_zero() && lie_l_two_form(&field.cs, xi, &field.b).is_zero();
    Ok(KillingReport { generalized, classical })
}

/// `𝔏_X ℋ = 0`; fails if the two decision procedures disagree.
pub fn is_generalized_killing(x: &VectorField, field: &FieldSpec) -> Result<bool> {
    let r = killing_report(x, field)?;
    if r.generalized != r.classical {
        return Err(Error::Invariant(format!(
            "generalized Killing criteria disagree (direct {}, via L {})",
            r.generalized, r.classical
        )));
    }
    Ok(r.generalized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse_scalar;
    use num_bigint::BigInt;

    fn mat(cs: &CoordSystem, rows: &[&[&str]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| parse_scalar(s, cs).unwrap()).collect()).collect())
            .unwrap()
    }

    #[test]
    fn flat_field_h_and_phi() {
        let cs = CoordSystem::new(2).unwrap();
        let gm = build_h(&FieldSpec::flat(cs));
        assert_eq!(gm.h(), &Matrix::identity(4));
        assert_eq!(gm.phi_op(), &gamma_matrix(&cs));
    }

    #[test]
    fn constant_b_entries() {
        let cs = CoordSystem::new(2).unwrap();
        let f = FieldSpec::with_metric(cs, Matrix::identity(2), mat(&cs, &[&["0", "3"], &["-3", "0"]]), ScalarExpr::zero())
            .unwrap();
        let h = build_h(&f);
        assert_eq!(h.h().get(0, 0), &ScalarExpr::from_int(10));
        assert_eq!(h.h().get(0, 3), &ScalarExpr::from_int(-3));
        let back = recover_field(&h).unwrap();
        assert_eq!((back.g(), back.b()), (f.g(), f.b()));
    }

    #[test]
    fn iota_and_decomposition() {
        let cs = CoordSystem::new(2).unwrap();
        let f = FieldSpec::flat(cs);
        let d = |c| VectorField::frame(cs, c);
        assert_eq!(iota(Sign::Plus, &d(0), &f).unwrap(), &d(0) + &d(2));
        assert_eq!(iota(Sign::Minus, &d(0), &f).unwrap(), &d(0) - &d(2));
        assert!(iota(Sign::Plus, &d(2), &f).is_err());
        let half = ScalarExpr::ratio(1, 2);
        let (p, m) = decompose_spm(&d(0), &f);
        assert_eq!(p, (&d(0) + &d(2)).scale(&half));
        assert_eq!(m, (&d(0) - &d(2)).scale(&half));
    }

    #[test]
    fn signature_detection() {
        let cs = CoordSystem::new(2).unwrap();
        let g = mat(&cs, &[&["0", "1"], &["1", "0"]]);
        let pt = vec![BigRational::from_integer(BigInt::from(0)); 4];
        let f = FieldSpec::new(cs, g.clone(), Matrix::zeros(2, 2), ScalarExpr::zero(), 1, 1, Some(pt.clone()));
        assert!(f.is_ok());
        assert!(FieldSpec::new(cs, g, Matrix::zeros(2, 2), ScalarExpr::zero(), 2, 0, Some(pt)).is_err());
    }

    #[test]
    fn killing_examples() {
        let cs = CoordSystem::new(2).unwrap();
        let d = |c| VectorField::frame(cs, c);
        assert!(is_generalized_killing(&d(0), &FieldSpec::flat(cs)).unwrap());
        let f = FieldSpec::with_metric(cs, mat(&cs, &[&["1 + x1*x1", "0"], &["0", "1"]]), Matrix::zeros(2, 2), ScalarExpr::zero())
            .unwrap();
        assert!(!is_generalized_killing(&d(0), &f).unwrap());
    }
}
