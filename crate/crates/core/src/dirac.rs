//! Almost para-Dirac structures: maximal `γ`-isotropic subbundles of `TM`,
//! their constructions from isometries, graphs and `(ℰ, ϖ)` data, and
//! integrability tests.
//!
//! A structure is stored as `m` spanning vector fields, the columns of a
//! `2m × m` matrix in the distinguished frame.

use num_rational::BigRational;

use crate::algebroid::{c_bracket, wedge_nabla0};
use crate::error::{Error, Result};
use crate::genmetric::{build_h, FieldSpec};
use crate::symcore::{full_point, CoordSystem, ScalarExpr};
use crate::tensor::{gamma, pair_omega, Matrix, VectorField};

#[derive(Clone, Debug, PartialEq)]
pub struct ParaDirac {
    cs: CoordSystem,
    span: Vec<VectorField>,
    isotropic: bool,
}

impl ParaDirac {
    /// Requires `m` fields of generic rank `m`.
    pub fn new(cs: CoordSystem, span: Vec<VectorField>) -> Result<ParaDirac> {
        if span.len() != cs.m() {
            return Err(Error::Dimension(format!("a para-Dirac span needs {} fields, got {}", cs.m(), span.len())));
        }
        if span.iter().any(|v| v.cs() != &cs) {
            return Err(Error::Dimension("span fields live on another coordinate system".into()));
        }
        let d = ParaDirac { cs, span, isotropic: false };
        if d.matrix().rank() != cs.m() {
            return Err(Error::Degenerate("span is rank deficient".into()));
        }
        let isotropic = (0..cs.m()).all(|i| (i..cs.m()).all(|j| gamma(&d.span[i], &d.span[j]).is_zero()));
        Ok(ParaDirac { isotropic, ..d })
    }

    /// From the columns of a `2m × m` matrix.
    pub fn from_matrix(cs: CoordSystem, s: &Matrix) -> Result<ParaDirac> {
        if s.rows() != cs.dim() {
            return Err(Error::Dimension(format!("span matrix must have {} rows", cs.dim())));
        }
        let span = (0..s.cols()).map(|j| VectorField::new(cs, s.col(j))).collect::<Result<_>>()?;
        ParaDirac::new(cs, span)
    }

    pub fn cs(&self) -> &CoordSystem {
        &self.cs
    }

    pub fn span(&self) -> &[VectorField] {
        &self.span
    }

    pub fn is_isotropic(&self) -> bool {
        self.isotropic
    }

    pub fn require_isotropic(&self) -> Result<()> {
        if self.isotropic {
            Ok(())
        } else {
            Err(Error::Precondition("span is not γ-isotropic".into()))
        }
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::from_fn(self.cs.dim(), self.span.len(), |i, j| self.span[j].get(i).clone())
    }

    pub fn is_strongly_foliated(&self) -> bool {
        self.span.iter().all(VectorField::is_foliated)
    }

    /// Rank of the span at a point.
    pub fn rank_at(&self, point: &[BigRational]) -> Result<usize> {
        let full = full_point(point, &self.cs)?;
        let vals = self.matrix().eval(&full)?;
        let m = Matrix::from_fn(vals.len(), self.span.len(), |i, j| ScalarExpr::from_rational(vals[i][j].clone()));
        Ok(m.rank())
    }

    pub fn contains(&self, v: &VectorField) -> bool {
        let mut cols: Vec<VectorField> = self.span.clone();
        cols.push(v.clone());
        Matrix::from_fn(self.cs.dim(), cols.len(), |i, j| cols[j].get(i).clone()).rank() == self.span.len()
    }

    /// Equality of the spanned subbundles over the rational-function field.
    pub fn same_subbundle(&self, other: &ParaDirac) -> bool {
        other.span.iter().all(|v| self.contains(v))
    }

    /// Gram matrix of `ℋ` on the span.
    pub fn h_gram(&self, field: &FieldSpec) -> Matrix {
        let s = self.matrix();
        &(&s.transpose() * build_h(field).h()) * &s
    }

    /// The pair `(ℰ, ϖ)` of the reconstruction: a basis of `ℰ = pr_L 𝒟` (as
    /// `L`-components) and `ϖ(X, Y) = γ(pr_{L̃}𝐗, Y)` on it.
    pub fn reconstruction_data(&self) -> (Vec<Vec<ScalarExpr>>, Matrix) {
        let m = self.cs.m();
        let mut chosen: Vec<usize> = Vec::new();
        for j in 0..self.span.len() {
            let mut cand = chosen.clone();
            cand.push(j);
            let e = Matrix::from_fn(m, cand.len(), |i, k| self.span[cand[k]].get(i).clone());
            if e.rank() == cand.len() {
                chosen = cand;
            }
        }
        let basis: Vec<Vec<ScalarExpr>> = chosen.iter().map(|&j| self.span[j].base().to_vec()).collect();
        let k = chosen.len();
        let varpi = Matrix::from_fn(k, k, |a, b| {
            let xt = self.span[chosen[a]].tilde();
            xt.iter().zip(&basis[b]).map(|(p, q)| p * q).sum()
        });
        (basis, varpi)
    }

    /// `ω(𝐗_a, 𝐗_b)` on the span.
    pub fn omega_gram(&self) -> Matrix {
        let m = self.span.len();
        Matrix::from_fn(m, m, |a, b| pair_omega(&self.span[a], &self.span[b]).expect("same coordinates"))
    }
}

/// A `g`-isometry `J` of `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsometryJ {
    j: Matrix,
}

impl IsometryJ {
    pub fn new(j: Matrix, g: &Matrix) -> Result<IsometryJ> {
        if j.rows() != g.rows() || !j.is_square() {
            return Err(Error::Dimension("J must be m×m".into()));
        }
        if &(&j.transpose() * g) * &j != *g {
            return Err(Error::Precondition("J is not a g-isometry".into()));
        }
        Ok(IsometryJ { j })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.j
    }
}

/// `𝒟 = {(X, ♭_{B+g}X) + (JX, ♭_{B−g}JX)}`.
pub fn dirac_from_isometry(j: &IsometryJ, field: &FieldSpec) -> Result<ParaDirac> {
    let m = field.cs().m();
    if j.j.rows() != m {
        return Err(Error::Dimension("J must be m×m".into()));
    }
    IsometryJ::new(j.j.clone(), field.g())?;
    let id = Matrix::identity(m);
    let top = &id + &j.j;
    let bottom = &field.flat_b_pm_g(crate::genmetric::Sign::Plus) + &(&field.flat_b_pm_g(crate::genmetric::Sign::Minus) * &j.j);
    let s = Matrix::from_fn(2 * m, m, |i, k| if i < m { top.get(i, k).clone() } else { bottom.get(i - m, k).clone() });
    ParaDirac::from_matrix(*field.cs(), &s)
}

/// The `ℋ`-compatible almost product `Ψ` with eigenbundles `𝒟` (`+1`) and `𝒟^{⊥ℋ}` (`−1`).
pub fn almost_product(d: &ParaDirac, field: &FieldSpec) -> Result<Matrix> {
    let gram = d.h_gram(field);
    let det = gram.det();
    if det.is_zero() {
        return Err(Error::Degenerate("ℋ restricted to 𝒟 is degenerate".into()));
    }
    let s = d.matrix();
    let h = build_h(field);
    let proj = &(&s * &gram.inverse()?) * &(&s.transpose() * h.h());
    Ok(&proj.scale(&ScalarExpr::from_int(2)) - &Matrix::identity(d.cs.dim()))
}

/// `J` with `Ψ(ι₊X) = ι₋(JX)`.
pub fn isometry_from_dirac(d: &ParaDirac, field: &FieldSpec) -> Result<IsometryJ> {
    d.require_isotropic()?;
    let m = d.cs.m();
    let psi = almost_product(d, field)?;
    let image = &psi * &field.iota_frame().block(0, 0, 2 * m, m);
    let j = image.block(0, 0, m, m);
    let expected = &field.flat_b_pm_g(crate::genmetric::Sign::Minus) * &j;
    if image.block(m, 0, m, m) != expected {
        return Err(Error::Invariant("Ψ does not map S₊ onto S₋".into()));
    }
    IsometryJ::new(j, field.g())
}

/// The `ℋ`-orthogonal complement of `𝒟`, spanned by the `−1` eigenvectors of `Ψ`.
pub fn h_orthogonal(d: &ParaDirac, field: &FieldSpec) -> Result<ParaDirac> {
    let psi = almost_product(d, field)?;
    let minus = &psi + &Matrix::identity(d.cs.dim());
    let ker = minus.nullspace();
    let s = Matrix::from_fn(d.cs.dim(), ker.len(), |i, j| ker[j][i].clone());
    ParaDirac::from_matrix(d.cs, &s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    /// `θ ∈ ∧²L*`, graph of `♭_θ`.
    TwoForm,
    /// `P ∈ ∧²L`, graph of `♯_P`.
    Bivector,
}

/// `graph ♭_θ = {(X, θ(X, ·))}` or `graph ♯_P = {(P(α, ·), α)}`.
pub fn graph_dirac(cs: CoordSystem, kind: GraphKind, t: &Matrix) -> Result<ParaDirac> {
    let m = cs.m();
    if t.rows() != m || !t.is_square() {
        return Err(Error::Dimension("graph tensor must be m×m".into()));
    }
    if !t.is_antisymmetric() {
        return Err(Error::Precondition("graph tensor must be antisymmetric".into()));
    }
    let mapped = -t;
    let id = Matrix::identity(m);
    let (top, bottom) = match kind {
        GraphKind::TwoForm => (&id, &mapped),
        GraphKind::Bivector => (&mapped, &id),
    };
    let s = Matrix::from_fn(2 * m, m, |i, k| if i < m { top.get(i, k).clone() } else { bottom.get(i - m, k).clone() });
    ParaDirac::from_matrix(cs, &s)
}

/// `J_θ = (Id + ♯_g♭_{B−θ})(Id − ♯_g♭_{B−θ})^{-1}` or
/// `J_P = (Q⁺ − Id)(Q⁻ + Id)^{-1}` with `Q^± = ±♯_g♭_{B±g}♯_P♭_g`.
pub fn j_from_graph(kind: GraphKind, t: &Matrix, field: &FieldSpec) -> Result<IsometryJ> {
    let m = field.cs().m();
    let id = Matrix::identity(m);
    let g = field.g();
    let g_inv = field.g_inv();
    let invert = |a: &Matrix| -> Result<Matrix> {
        let det = a.det();
        if det.is_zero() {
            return Err(Error::Singular { what: "graph isometry factor".into(), det: det.to_string() });
        }
        a.inverse()
    };
    let j = match kind {
        GraphKind::TwoForm => {
            let k = &(-g_inv) * &(field.b() - t);
            &(&id + &k) * &invert(&(&id - &k))?
        }
        GraphKind::Bivector => {
            let sharp_p = -t;
            let tail = &sharp_p * g;
            let q_plus = &(g_inv * &field.flat_b_pm_g(crate::genmetric::Sign::Plus)) * &tail;
            let q_minus = -&(&(g_inv * &field.flat_b_pm_g(crate::genmetric::Sign::Minus)) * &tail);
            &(&q_plus - &id) * &invert(&(&q_minus + &id))?
        }
    };
    IsometryJ::new(j, g)
}

/// `𝒟 = {𝐗 : pr_L 𝐗 ∈ ℰ, ϖ(pr_L 𝐗, Y) = γ(pr_{L̃}𝐗, Y) ∀Y ∈ ℰ}` for `ℰ`
/// spanned by the `L`-vectors `e` and `ϖ` given on that basis.
pub fn reconstruct(cs: CoordSystem, e: &[Vec<ScalarExpr>], varpi: &Matrix) -> Result<ParaDirac> {
    let m = cs.m();
    let k = e.len();
    if e.iter().any(|v| v.len() != m) || varpi.rows() != k || varpi.cols() != k {
        return Err(Error::Dimension("ℰ basis and ϖ shapes disagree".into()));
    }
    if !varpi.is_antisymmetric() {
        return Err(Error::Precondition("ϖ must be antisymmetric".into()));
    }
    let basis = Matrix::from_fn(m, k, |i, a| e[a][i].clone());
    if basis.rank() != k {
        return Err(Error::Degenerate("ℰ basis is rank deficient".into()));
    }
    let mut span = Vec::with_capacity(m);
    if k > 0 {
        // Eᵀ ξ̃_a = ϖ(e_a, ·), solved by ξ̃_a = E (EᵀE)^{-1} ϖ(e_a, ·).
        let et = basis.transpose();
        let coef = (&et * &basis).solve(&varpi.transpose())?;
        let tilde = &basis * &coef;
        for a in 0..k {
            span.push(VectorField::from_parts(cs, &e[a], &tilde.col(a))?);
        }
    }
    let zero = vec![ScalarExpr::zero(); m];
    let ann = if k == 0 { Matrix::identity(m).nullspace_complement() } else { basis.transpose().nullspace() };
    for n in ann {
        span.push(VectorField::from_parts(cs, &zero, &n)?);
    }
    ParaDirac::new(cs, span)
}

trait FullKernel {
    fn nullspace_complement(&self) -> Vec<Vec<ScalarExpr>>;
}

impl FullKernel for Matrix {
    /// With `ℰ = 0` every tilde vector qualifies.
    fn nullspace_complement(&self) -> Vec<Vec<ScalarExpr>> {
        (0..self.rows()).map(|i| self.col(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// `γ([X,Y]_{∇⁰}, Z) = 0`.
    Bracket,
    /// `γ(X, ∇⁰_Z Y) = γ([X,Y], Z)`.
    Connection,
    /// `Σ_cycl γ(X, ∇⁰_Z Y) = 0`.
    CyclicConnection,
    /// `Σ_cycl γ([X,Y], Z) = 0`.
    CyclicLie,
    /// `Σ_cycl γ(X ∧_{∇⁰} Y, Z) = 0`.
    CyclicWedge,
    /// `d_{∇⁰}ω(X,Y,Z) = 0`, for strongly foliated structures.
    Omega,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::Bracket,
        Criterion::Connection,
        Criterion::CyclicConnection,
        Criterion::CyclicLie,
        Criterion::CyclicWedge,
        Criterion::Omega,
    ];

    /// The five equivalent conditions valid for every isotropic structure.
    pub const GENERAL: [Criterion; 5] = [
        Criterion::Bracket,
        Criterion::Connection,
        Criterion::CyclicConnection,
        Criterion::CyclicLie,
        Criterion::CyclicWedge,
    ];

    pub fn from_label(s: &str) -> Option<Criterion> {
        Some(match s {
            "1" => Criterion::Bracket,
            "2" => Criterion::Connection,
            "3" => Criterion::CyclicConnection,
            "4" => Criterion::CyclicLie,
            "5" => Criterion::CyclicWedge,
            "paraint5" | "omega" => Criterion::Omega,
            _ => return None,
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            Criterion::Bracket => "1",
            Criterion::Connection => "2",
            Criterion::CyclicConnection => "3",
            Criterion::CyclicLie => "4",
            Criterion::CyclicWedge => "5",
            Criterion::Omega => "paraint5",
        }
    }
}

fn cyclic<'a>(x: &'a VectorField, y: &'a VectorField, z: &'a VectorField) -> [(&'a VectorField, &'a VectorField, &'a VectorField); 3] {
    [(x, y, z), (y, z, x), (z, x, y)]
}

/// The residual of one criterion on a triple.
pub fn criterion_residual(c: Criterion, x: &VectorField, y: &VectorField, z: &VectorField) -> ScalarExpr {
    match c {
        Criterion::Bracket => gamma(&c_bracket(x, y), z),
        Criterion::Connection => &gamma(x, &z.derive(y)) - &gamma(&x.lie_bracket(y), z),
        Criterion::CyclicConnection => cyclic(x, y, z).iter().map(|(a, b, c)| gamma(a, &c.derive(b))).sum(),
        Criterion::CyclicLie => cyclic(x, y, z).iter().map(|(a, b, c)| gamma(&a.lie_bracket(b), c)).sum(),
        Criterion::CyclicWedge => cyclic(x, y, z).iter().map(|(a, b, c)| gamma(&wedge_nabla0(a, b), c)).sum(),
        Criterion::Omega => {
            let omega = |a: &VectorField, b: &VectorField| pair_omega(a, b).expect("same coordinates");
            let d: ScalarExpr = cyclic(x, y, z).iter().map(|(a, b, c)| a.apply(&omega(b, c))).sum();
            let br: ScalarExpr = cyclic(x, y, z).iter().map(|(a, b, c)| omega(&c_bracket(a, b), c)).sum();
            &d - &br
        }
    }
}

/// Evaluates a criterion on every ordered triple of spanning fields.
pub fn check_integrability(d: &ParaDirac, c: Criterion) -> Result<bool> {
    d.require_isotropic()?;
    if c == Criterion::Omega && !d.is_strongly_foliated() {
        return Err(Error::Precondition("the ω criterion needs a strongly foliated structure".into()));
    }
    let s = &d.span;
    let n = s.len();
    Ok((0..n).all(|i| (0..n).all(|j| (0..n).all(|k| criterion_residual(c, &s[i], &s[j], &s[k]).is_zero()))))
}

/// Closure of the span under the Lie bracket.
pub fn is_lie_involutive(d: &ParaDirac) -> bool {
    let s = &d.span;
    (0..s.len()).all(|i| (i + 1..s.len()).all(|j| d.contains(&s[i].lie_bracket(&s[j]))))
}

/// `∇⁰_X Y ∈ 𝒟` for spanning `X, Y`.
pub fn is_totally_geodesic(d: &ParaDirac) -> bool {
    let s = &d.span;
    s.iter().all(|x| s.iter().all(|y| d.contains(&x.derive(y))))
}

/// `d_Lθ(∂_i, ∂_j, ∂_k) = ∂_iθ_{jk} + ∂_jθ_{ki} + ∂_kθ_{ij}`, flattened over `i < j < k`.
pub fn d_l_two_form(cs: &CoordSystem, theta: &Matrix) -> Vec<ScalarExpr> {
    let m = cs.m();
    let d = |i: usize, e: &ScalarExpr| e.diff(cs.var(i));
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                out.push(&(&d(i, theta.get(j, k)) + &d(j, theta.get(k, i))) + &d(k, theta.get(i, j)));
            }
        }
    }
    out
}

/// `Σ_cycl(ijk) P^{il} ∂_l P^{jk}`, half the Schouten bracket `[P,P]_L`, over `i < j < k`.
pub fn schouten_pp(cs: &CoordSystem, p: &Matrix) -> Vec<ScalarExpr> {
    let m = cs.m();
    let term = |i: usize, j: usize, k: usize| -> ScalarExpr {
        (0..m).map(|l| p.get(i, l) * &p.get(j, k).diff(cs.var(l))).sum()
    };
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                out.push(&(&term(i, j, k) + &term(j, k, i)) + &term(k, i, j));
            }
        }
    }
    out
}

/// `(A, σ, π)` with `Ψ = [[A, ♯_π], [♭_σ, −Aᵀ]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiTriple {
    pub a: Matrix,
    /// `σ_{ij} = σ(∂_i, ∂_j)`.
    pub sigma: Matrix,
    /// `π^{ij} = π(dx^i, dx^j)`.
    pub pi: Matrix,
}

impl PsiTriple {
    /// `♯_π α = π(α, ·)` as a matrix.
    pub fn sharp_pi(&self) -> Matrix {
        -&self.pi
    }

    /// `♭_σ X = σ(X, ·)` as a matrix.
    pub fn flat_sigma(&self) -> Matrix {
        -&self.sigma
    }

    /// `A² = Id − ♯_π♭_σ`, `π(α∘A, β) = π(α, β∘A)`, `σ(AX, Y) = σ(X, AY)`,
    /// together with the antisymmetry of `σ` and `π`.
    pub fn invariants_hold(&self) -> bool {
        let m = self.a.rows();
        let a2 = &self.a * &self.a;
        let rhs = &Matrix::identity(m) - &(&self.sharp_pi() * &self.flat_sigma());
        a2 == rhs
            && &self.a * &self.pi == &self.pi * &self.a.transpose()
            && &self.a.transpose() * &self.sigma == &self.sigma * &self.a
            && self.sigma.is_antisymmetric()
            && self.pi.is_antisymmetric()
    }

    /// The block matrix `[[A, ♯_π], [♭_σ, −Aᵀ]]`.
    pub fn psi(&self) -> Matrix {
        Matrix::from_blocks(&self.a, &self.sharp_pi(), &self.flat_sigma(), &-&self.a.transpose())
    }
}

/// `♯_π = ½(J − J^{-1})♯_g`, `A = ½(J + J^{-1}) − ♯_π♭_B` and
/// `♭_σ = ½(♭_B(J + J^{-1}) − ♭_g(J − J^{-1})) + Aᵀ♭_B`, the mean of
/// `♭_{B∓g}J^{±1} = ♭_σ − Aᵀ♭_{B±g}`.
pub fn psi_triple(d: &ParaDirac, field: &FieldSpec) -> Result<PsiTriple> {
    let j = isometry_from_dirac(d, field)?;
    triple_from_isometry(&j, field)
}

pub fn triple_from_isometry(j: &IsometryJ, field: &FieldSpec) -> Result<PsiTriple> {
    let det = j.j.det();
    if det.is_zero() {
        return Err(Error::Singular { what: "J".into(), det: det.to_string() });
    }
    let j_inv = j.j.inverse()?;
    let half = ScalarExpr::from_rational(BigRational::new(1.into(), 2.into()));
    let flat_b = -field.b();
    let sharp_pi = &(&j.j - &j_inv).scale(&half) * field.g_inv();
    let sum = &j.j + &j_inv;
    let a = &sum.scale(&half) - &(&sharp_pi * &flat_b);
    let diff = &(&j.j - &j_inv);
    let flat_sigma = &(&(&flat_b * &sum) - &(field.g() * diff)).scale(&half) + &(&a.transpose() * &flat_b);
    Ok(PsiTriple { a, sigma: -&flat_sigma, pi: -&sharp_pi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse_scalar;

    fn mat(cs: &CoordSystem, rows: &[&[&str]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| parse_scalar(s, cs).unwrap()).collect()).collect())
            .unwrap()
    }

    fn l(cs: CoordSystem) -> ParaDirac {
        ParaDirac::new(cs, (0..cs.m()).map(|i| VectorField::frame(cs, i)).collect()).unwrap()
    }

    fn l_tilde(cs: CoordSystem) -> ParaDirac {
        ParaDirac::new(cs, (0..cs.m()).map(|i| VectorField::frame(cs, cs.m() + i)).collect()).unwrap()
    }

    #[test]
    fn isometry_examples() {
        let cs = CoordSystem::new(2).unwrap();
        let f = FieldSpec::flat(cs);
        let id = IsometryJ::new(Matrix::identity(2), f.g()).unwrap();
        let d = dirac_from_isometry(&id, &f).unwrap();
        assert!(d.is_isotropic() && d.same_subbundle(&l(cs)));
        assert_eq!(isometry_from_dirac(&l(cs), &f).unwrap(), id);
        let minus = IsometryJ::new(-&Matrix::identity(2), f.g()).unwrap();
        assert!(dirac_from_isometry(&minus, &f).unwrap().same_subbundle(&l_tilde(cs)));
        assert_eq!(isometry_from_dirac(&l_tilde(cs), &f).unwrap(), minus);
        assert!(IsometryJ::new(mat(&cs, &[&["2", "0"], &["0", "1"]]), f.g()).is_err());
    }

    #[test]
    fn graph_examples() {
        let cs = CoordSystem::new(3).unwrap();
        let theta = mat(&cs, &[&["0", "1", "0"], &["-1", "0", "0"], &["0", "0", "0"]]);
        let d = graph_dirac(cs, GraphKind::TwoForm, &theta).unwrap();
        let expect = ParaDirac::from_matrix(
            cs,
            &mat(&cs, &[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "1"], &["0", "-1", "0"], &["1", "0", "0"], &["0", "0", "0"]]),
        )
        .unwrap();
        assert_eq!(d, expect);
        assert!(graph_dirac(cs, GraphKind::TwoForm, &Matrix::zeros(3, 3)).unwrap().same_subbundle(&l(cs)));
        assert!(graph_dirac(cs, GraphKind::Bivector, &Matrix::zeros(3, 3)).unwrap().same_subbundle(&l_tilde(cs)));
        let (e, varpi) = d.reconstruction_data();
        assert_eq!(varpi, theta);
        assert!(reconstruct(cs, &e, &varpi).unwrap().same_subbundle(&d));
        // ω restricted to the graph is −2θ.
        assert_eq!(d.omega_gram(), theta.scale(&ScalarExpr::from_int(-2)));
    }

    #[test]
    fn reconstruct_extremes() {
        let cs = CoordSystem::new(2).unwrap();
        let e: Vec<Vec<ScalarExpr>> = (0..2).map(|i| Matrix::identity(2).col(i)).collect();
        assert!(reconstruct(cs, &e, &Matrix::zeros(2, 2)).unwrap().same_subbundle(&l(cs)));
        assert!(reconstruct(cs, &[], &Matrix::zeros(0, 0)).unwrap().same_subbundle(&l_tilde(cs)));
    }

    #[test]
    fn j_from_graph_examples() {
        let cs = CoordSystem::new(2).unwrap();
        let g = mat(&cs, &[&["2", "x1"], &["x1", "3"]]);
        let b = mat(&cs, &[&["0", "x2"], &["-x2", "0"]]);
        let f = FieldSpec::with_metric(cs, g, b.clone(), ScalarExpr::zero()).unwrap();
        assert_eq!(j_from_graph(GraphKind::TwoForm, &b, &f).unwrap().matrix(), &Matrix::identity(2));
        assert_eq!(j_from_graph(GraphKind::Bivector, &Matrix::zeros(2, 2), &f).unwrap().matrix(), &-&Matrix::identity(2));
        let theta = mat(&cs, &[&["0", "1/3"], &["-1/3", "0"]]);
        let via_graph = isometry_from_dirac(&graph_dirac(cs, GraphKind::TwoForm, &theta).unwrap(), &f).unwrap();
        assert_eq!(j_from_graph(GraphKind::TwoForm, &theta, &f).unwrap(), via_graph);
    }

    #[test]
    fn integrability_examples() {
        let cs = CoordSystem::new(3).unwrap();
        for c in Criterion::ALL {
            assert!(check_integrability(&l(cs), c).unwrap());
        }
        let theta = mat(&cs, &[&["0", "0", "x2"], &["0", "0", "0"], &["-x2", "0", "0"]]);
        let d = graph_dirac(cs, GraphKind::TwoForm, &theta).unwrap();
        assert!(!d_l_two_form(&cs, &theta)[0].is_zero());
        for c in Criterion::ALL {
            assert!(!check_integrability(&d, c).unwrap(), "criterion {}", c.label());
        }
        let p = mat(&cs, &[&["0", "1", "2"], &["-1", "0", "3"], &["-2", "-3", "0"]]);
        let d = graph_dirac(cs, GraphKind::Bivector, &p).unwrap();
        for c in Criterion::ALL {
            assert!(check_integrability(&d, c).unwrap());
        }
        let nf = graph_dirac(cs, GraphKind::TwoForm, &mat(&cs, &[&["0", "xt1", "0"], &["-xt1", "0", "0"], &["0", "0", "0"]]))
            .unwrap();
        assert!(check_integrability(&nf, Criterion::Omega).is_err());
    }

    #[test]
    fn psi_triple_examples() {
        let cs = CoordSystem::new(2).unwrap();
        let f = FieldSpec::flat(cs);
        let t = psi_triple(&l(cs), &f).unwrap();
        assert_eq!(t, PsiTriple { a: Matrix::identity(2), sigma: Matrix::zeros(2, 2), pi: Matrix::zeros(2, 2) });
        let t = psi_triple(&l_tilde(cs), &f).unwrap();
        assert_eq!(t.a, -&Matrix::identity(2));
        assert!(t.sigma.is_zero() && t.pi.is_zero());
    }
}
