//! Tensor fields in the distinguished frame and the canonical structures
//! `γ`, `ω`, `F` of the flat double manifold.

mod matrix;

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::symcore::{CoordSystem, ScalarExpr, Var};

pub use matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    Vector,
    Covector,
}

/// Parses a variance string such as `"vc"` (`v` vector, `c` covector).
pub fn parse_variance(s: &str) -> Result<Vec<Slot>> {
    s.chars()
        .map(|ch| match ch {
            'v' => Ok(Slot::Vector),
            'c' => Ok(Slot::Covector),
            other => Err(Error::Invalid(format!("variance letter '{other}' (expected 'v' or 'c')"))),
        })
        .collect()
}

/// A tensor field given by its components in the distinguished frame
/// `∂/∂x^1..∂/∂x^m, ∂/∂x̃_1..∂/∂x̃_m` and the dual coframe. Components are
/// stored row-major, the first slot varying slowest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorField {
    cs: CoordSystem,
    variance: Vec<Slot>,
    comps: Vec<ScalarExpr>,
}

impl TensorField {
    pub fn new(cs: CoordSystem, variance: Vec<Slot>, comps: Vec<ScalarExpr>) -> Result<TensorField> {
        let expected = cs.dim().pow(variance.len() as u32);
        if comps.len() != expected {
            return Err(Error::Dimension(format!("{} components given, expected {expected}", comps.len())));
        }
        Ok(TensorField { cs, variance, comps })
    }

    pub fn zeros(cs: CoordSystem, variance: Vec<Slot>) -> TensorField {
        let n = cs.dim().pow(variance.len() as u32);
        TensorField { cs, variance, comps: vec![ScalarExpr::zero(); n] }
    }

    pub fn scalar(cs: CoordSystem, f: ScalarExpr) -> TensorField {
        TensorField { cs, variance: Vec::new(), comps: vec![f] }
    }

    pub fn from_fn(cs: CoordSystem, variance: Vec<Slot>, mut f: impl FnMut(&[usize]) -> ScalarExpr) -> TensorField {
        let mut t = TensorField::zeros(cs, variance);
        for flat in 0..t.comps.len() {
            let idx = t.unflatten(flat);
            t.comps[flat] = f(&idx);
        }
        t
    }

    /// A two-slot tensor from a `2m × 2m` matrix.
    pub fn from_matrix(cs: CoordSystem, variance: [Slot; 2], m: &Matrix) -> Result<TensorField> {
        if m.rows() != cs.dim() || m.cols() != cs.dim() {
            return Err(Error::Dimension(format!("matrix is {}x{}, expected {n}x{n}", m.rows(), m.cols(), n = cs.dim())));
        }
        Ok(TensorField { cs, variance: variance.to_vec(), comps: m.entries().to_vec() })
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        if self.rank() != 2 {
            return Err(Error::Dimension(format!("tensor of rank {} is not a matrix", self.rank())));
        }
        let n = self.cs.dim();
        Ok(Matrix::from_fn(n, n, |i, j| self.comps[i * n + j].clone()))
    }

    pub fn cs(&self) -> &CoordSystem {
        &self.cs
    }

    pub fn variance(&self) -> &[Slot] {
        &self.variance
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn comps(&self) -> &[ScalarExpr] {
        &self.comps
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.rank(), "index arity");
        let n = self.cs.dim();
        idx.iter().fold(0, |acc, &i| {
            assert!(i < n, "frame index {i} out of range");
            acc * n + i
        })
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let n = self.cs.dim();
        let mut idx = vec![0; self.rank()];
        for k in (0..self.rank()).rev() {
            idx[k] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> &ScalarExpr {
        &self.comps[self.flatten(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: ScalarExpr) {
        let k = self.flatten(idx);
        self.comps[k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(ScalarExpr::is_zero)
    }

    pub fn map(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> TensorField {
        TensorField { cs: self.cs, variance: self.variance.clone(), comps: self.comps.iter().map(f).collect() }
    }

    pub fn scale(&self, f: &ScalarExpr) -> TensorField {
        self.map(|c| c * f)
    }

    pub fn diff(&self, v: Var) -> TensorField {
        self.map(|c| c.diff(v))
    }

    /// True when no component depends on a tilde coordinate.
    pub fn is_foliated(&self) -> bool {
        self.comps.iter().all(ScalarExpr::is_foliated)
    }

    fn check_same_shape(&self, other: &TensorField) -> Result<()> {
        if self.cs != other.cs || self.variance != other.variance {
            return Err(Error::Dimension("tensors of different type".into()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &TensorField) -> Result<TensorField> {
        self.check_same_shape(other)?;
        Ok(TensorField {
            cs: self.cs,
            variance: self.variance.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &TensorField) -> Result<TensorField> {
        self.try_add(&-other)
    }

    /// Evaluates the tensor on frame-index arguments; for a vector slot the
    /// argument is a covector and vice versa.
    pub fn apply(&self, args: &[&[ScalarExpr]]) -> Result<ScalarExpr> {
        if args.len() != self.rank() {
            return Err(Error::Dimension(format!("{} arguments for a rank-{} tensor", args.len(), self.rank())));
        }
        let n = self.cs.dim();
        if args.iter().any(|a| a.len() != n) {
            return Err(Error::Dimension("argument of wrong dimension".into()));
        }
        let mut total = ScalarExpr::zero();
        for (flat, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = self.unflatten(flat);
            let mut term = c.clone();
            for (k, &i) in idx.iter().enumerate() {
                let a = &args[k][i];
                if a.is_zero() {
                    term = ScalarExpr::zero();
                    break;
                }
                term = &term * a;
            }
            total += term;
        }
        Ok(total)
    }
}

impl Neg for &TensorField {
    type Output = TensorField;
    fn neg(self) -> TensorField {
        self.map(|c| -c)
    }
}

/// A vector field `Σ X^c ∂_c` in the distinguished frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorField {
    cs: CoordSystem,
    c: Vec<ScalarExpr>,
}

impl VectorField {
    pub fn new(cs: CoordSystem, c: Vec<ScalarExpr>) -> Result<VectorField> {
        if c.len() != cs.dim() {
            return Err(Error::Dimension(format!("{} components given, expected {}", c.len(), cs.dim())));
        }
        Ok(VectorField { cs, c })
    }

    pub fn zero(cs: CoordSystem) -> VectorField {
        VectorField { cs, c: vec![ScalarExpr::zero(); cs.dim()] }
    }

    /// The frame field `∂_c`.
    pub fn frame(cs: CoordSystem, c: usize) -> VectorField {
        let mut v = VectorField::zero(cs);
        v.c[c] = ScalarExpr::one();
        v
    }

    /// `Σ ξ^i ∂/∂x^i + Σ η_i ∂/∂x̃_i`.
    pub fn from_parts(cs: CoordSystem, base: &[ScalarExpr], tilde: &[ScalarExpr]) -> Result<VectorField> {
        if base.len() != cs.m() || tilde.len() != cs.m() {
            return Err(Error::Dimension("each part needs m components".into()));
        }
        Ok(VectorField { cs, c: base.iter().chain(tilde).cloned().collect() })
    }

    pub fn from_fn(cs: CoordSystem, f: impl FnMut(usize) -> ScalarExpr) -> VectorField {
        VectorField { cs, c: (0..cs.dim()).map(f).collect() }
    }

    pub fn cs(&self) -> &CoordSystem {
        &self.cs
    }

    pub fn comps(&self) -> &[ScalarExpr] {
        &self.c
    }

    pub fn into_comps(self) -> Vec<ScalarExpr> {
        self.c
    }

    pub fn get(&self, c: usize) -> &ScalarExpr {
        &self.c[c]
    }

    pub fn base(&self) -> &[ScalarExpr] {
        &self.c[..self.cs.m()]
    }

    pub fn tilde(&self) -> &[ScalarExpr] {
        &self.c[self.cs.m()..]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(ScalarExpr::is_zero)
    }

    pub fn in_l(&self) -> bool {
        self.tilde().iter().all(ScalarExpr::is_zero)
    }

    pub fn in_l_tilde(&self) -> bool {
        self.base().iter().all(ScalarExpr::is_zero)
    }

    pub fn is_foliated(&self) -> bool {
        self.c.iter().all(ScalarExpr::is_foliated)
    }

    pub fn map(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> VectorField {
        VectorField { cs: self.cs, c: self.c.iter().map(f).collect() }
    }

    pub fn scale(&self, f: &ScalarExpr) -> VectorField {
        if f.is_zero() {
            return VectorField::zero(self.cs);
        }
        self.map(|c| c * f)
    }

    /// The derivation `X(f) = Σ X^c ∂_c f`.
    pub fn apply(&self, f: &ScalarExpr) -> ScalarExpr {
        if f.is_constant() {
            return ScalarExpr::zero();
        }
        self.c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| x * &f.diff(self.cs.var(k)))
            .sum()
    }

    /// Componentwise derivative `X(Y^c) ∂_c`, the flat connection `∇⁰_X Y`.
    pub fn derive(&self, y: &VectorField) -> VectorField {
        y.map(|c| self.apply(c))
    }

    pub fn lie_bracket(&self, y: &VectorField) -> VectorField {
        &self.derive(y) - &y.derive(self)
    }

    pub fn to_tensor(&self) -> TensorField {
        TensorField { cs: self.cs, variance: vec![Slot::Vector], comps: self.c.clone() }
    }

    pub fn from_tensor(t: &TensorField) -> Result<VectorField> {
        if t.variance() != [Slot::Vector] {
            return Err(Error::Dimension("tensor is not a vector field".into()));
        }
        Ok(VectorField { cs: t.cs, c: t.comps.clone() })
    }
}

impl Add<&VectorField> for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        assert_eq!(self.cs, rhs.cs, "vector fields on different manifolds");
        VectorField { cs: self.cs, c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub<&VectorField> for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        assert_eq!(self.cs, rhs.cs, "vector fields on different manifolds");
        VectorField { cs: self.cs, c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        self.map(|c| -c)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| {
                let d = format!("d/d{}", self.cs.label(k));
                if x.is_one() {
                    d
                } else {
                    format!("({x})*{d}")
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Matrix of `γ`: `γ(∂/∂x^i, ∂/∂x̃_j) = δ_i^j`, zero on `L×L` and `L̃×L̃`.
pub fn gamma_matrix(cs: &CoordSystem) -> Matrix {
    let n = cs.dim();
    Matrix::from_fn(n, n, |a, b| if cs.partner(a) == b { ScalarExpr::one() } else { ScalarExpr::zero() })
}

/// Matrix of `ω = dx^i ∧ dx̃_i` with `ω(∂/∂x^i, ∂/∂x̃_i) = 1`.
pub fn omega_matrix(cs: &CoordSystem) -> Matrix {
    let n = cs.dim();
    Matrix::from_fn(n, n, |a, b| {
        if cs.partner(a) != b {
            ScalarExpr::zero()
        } else if a < cs.m() {
            ScalarExpr::one()
        } else {
            ScalarExpr::from_int(-1)
        }
    })
}

/// Matrix of `F = diag(Id, −Id)`.
pub fn f_matrix(cs: &CoordSystem) -> Matrix {
    let n = cs.dim();
    Matrix::from_fn(n, n, |a, b| match (a == b, a < cs.m()) {
        (false, _) => ScalarExpr::zero(),
        (true, true) => ScalarExpr::one(),
        (true, false) => ScalarExpr::from_int(-1),
    })
}

/// `γ`, `ω` and `F` as tensor fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalStructure {
    pub gamma: TensorField,
    pub omega: TensorField,
    pub f: TensorField,
}

impl CanonicalStructure {
    pub fn new(cs: CoordSystem) -> CanonicalStructure {
        let cc = [Slot::Covector, Slot::Covector];
        CanonicalStructure {
            gamma: TensorField::from_matrix(cs, cc, &gamma_matrix(&cs)).expect("shape"),
            omega: TensorField::from_matrix(cs, cc, &omega_matrix(&cs)).expect("shape"),
            f: TensorField::from_matrix(cs, [Slot::Vector, Slot::Covector], &f_matrix(&cs)).expect("shape"),
        }
    }
}

fn check_pair(x: &VectorField, y: &VectorField) -> Result<()> {
    if x.cs != y.cs {
        return Err(Error::Dimension("vector fields on different manifolds".into()));
    }
    Ok(())
}

/// `γ(X, Y) = Σ_i (X^i Ỹ_i + X̃_i Y^i)`.
pub fn pair_gamma(x: &VectorField, y: &VectorField) -> Result<ScalarExpr> {
    check_pair(x, y)?;
    Ok(gamma(x, y))
}

pub(crate) fn gamma(x: &VectorField, y: &VectorField) -> ScalarExpr {
    let m = x.cs.m();
    let mut acc = ScalarExpr::zero();
    for i in 0..m {
        for (a, b) in [(&x.c[i], &y.c[m + i]), (&x.c[m + i], &y.c[i])] {
            if !a.is_zero() && !b.is_zero() {
                acc += a * b;
            }
        }
    }
    acc
}

/// `ω(X, Y) = Σ_i (X^i Ỹ_i − X̃_i Y^i)`.
pub fn pair_omega(x: &VectorField, y: &VectorField) -> Result<ScalarExpr> {
    check_pair(x, y)?;
    Ok(gamma(&apply_f(x), y))
}

/// `F`: identity on `L`, minus identity on `L̃`.
pub fn apply_f(x: &VectorField) -> VectorField {
    let m = x.cs.m();
    VectorField::from_fn(x.cs, |c| if c < m { x.c[c].clone() } else { -&x.c[c] })
}

/// `(pr_L X, pr_L̃ X)`.
pub fn split_l(x: &VectorField) -> (VectorField, VectorField) {
    let m = x.cs.m();
    let l = VectorField::from_fn(x.cs, |c| if c < m { x.c[c].clone() } else { ScalarExpr::zero() });
    let lt = VectorField::from_fn(x.cs, |c| if c >= m { x.c[c].clone() } else { ScalarExpr::zero() });
    (l, lt)
}

/// `♭_γ X` as a coframe component list: swaps the `L` and `L̃` halves.
pub fn flat_gamma(x: &VectorField) -> Vec<ScalarExpr> {
    let cs = x.cs;
    (0..cs.dim()).map(|c| x.c[cs.partner(c)].clone()).collect()
}

/// `♯_γ α` for coframe components `α`.
pub fn sharp_gamma(cs: CoordSystem, alpha: &[ScalarExpr]) -> VectorField {
    VectorField::from_fn(cs, |c| alpha[cs.partner(c)].clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Musical {
    Flat,
    Sharp,
}

/// Lowers (`Flat`) the first vector slot or raises (`Sharp`) the first
/// covector slot of `arg` with a symmetric or antisymmetric 2-covector
/// `metric`.
///
/// The metric may be supported on a subbundle spanned by frame fields (for
/// instance `g` on `L`); it must be nondegenerate there, and raising requires
/// the argument to vanish off that subbundle.
pub fn musical(direction: Musical, metric: &TensorField, arg: &TensorField) -> Result<TensorField> {
    if metric.variance() != [Slot::Covector, Slot::Covector] {
        return Err(Error::Invalid("metric must be a 2-covector".into()));
    }
    if metric.cs != arg.cs {
        return Err(Error::Dimension("metric and argument on different manifolds".into()));
    }
    let cs = arg.cs;
    let n = cs.dim();
    let g = metric.to_matrix()?;
    let support: Vec<usize> = (0..n).filter(|&a| (0..n).any(|b| !g.get(a, b).is_zero())).collect();
    let k = support.len();
    let sub = Matrix::from_fn(k, k, |i, j| g.get(support[i], support[j]).clone());
    if k == 0 || sub.det().is_zero() {
        return Err(Error::Degenerate("metric on its support".into()));
    }
    let (want, got) = match direction {
        Musical::Flat => (Slot::Vector, Slot::Covector),
        Musical::Sharp => (Slot::Covector, Slot::Vector),
    };
    let Some(pos) = arg.variance().iter().position(|&s| s == want) else {
        return Err(Error::Invalid(format!("no {want:?} slot to convert")));
    };
    let mut variance = arg.variance().to_vec();
    variance[pos] = got;
    // Contraction matrix on the converted slot: out_b = Σ_a M[a][b] in_a.
    let mtx = match direction {
        Musical::Flat => g.clone(),
        Musical::Sharp => {
            let inv = sub.inverse()?;
            let mut full = Matrix::zeros(n, n);
            for (i, &a) in support.iter().enumerate() {
                for (j, &b) in support.iter().enumerate() {
                    full.set(a, b, inv.get(i, j).clone());
                }
            }
            for flat in 0..arg.comps.len() {
                let idx = arg.unflatten(flat);
                if !support.contains(&idx[pos]) && !arg.comps[flat].is_zero() {
                    return Err(Error::Degenerate("metric: argument not in the metric's support".into()));
                }
            }
            full
        }
    };
    Ok(TensorField::from_fn(cs, variance, |idx| {
        let mut j = idx.to_vec();
        let b = idx[pos];
        (0..n)
            .filter(|&a| !mtx.get(a, b).is_zero())
            .map(|a| {
                j[pos] = a;
                mtx.get(a, b) * arg.get(&j)
            })
            .sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse_scalar;

    #[test]
    fn canonical_pairings() {
        let cs = CoordSystem::new(2).unwrap();
        let d = |c| VectorField::frame(cs, c);
        assert!(pair_gamma(&d(0), &d(2)).unwrap().is_one());
        assert!(pair_gamma(&d(0), &d(1)).unwrap().is_zero());
        let x1 = parse_scalar("x1", &cs).unwrap();
        assert_eq!(pair_gamma(&d(0).scale(&x1), &d(2)).unwrap(), x1);
        assert!(pair_omega(&d(0), &d(2)).unwrap().is_one());
        assert_eq!(pair_omega(&d(2), &d(0)).unwrap(), ScalarExpr::from_int(-1));
        assert!(pair_omega(&d(0), &d(1)).unwrap().is_zero());
        assert_eq!(apply_f(&d(2)), -&d(2));
        let (l, lt) = split_l(&(&d(0) + &d(3)));
        assert_eq!((l, lt), (d(0), d(3)));
    }

    #[test]
    fn musical_examples() {
        let cs = CoordSystem::new(2).unwrap();
        let can = CanonicalStructure::new(cs);
        let dx1 = TensorField::from_fn(cs, vec![Slot::Covector], |i| ScalarExpr::from_int((i[0] == 0) as i64));
        let up = musical(Musical::Sharp, &can.gamma, &dx1).unwrap();
        assert_eq!(VectorField::from_tensor(&up).unwrap(), VectorField::frame(cs, 2));
        let down = musical(Musical::Flat, &can.gamma, &VectorField::frame(cs, 0).to_tensor()).unwrap();
        assert_eq!(down.comps()[2], ScalarExpr::one());
        let g = TensorField::from_fn(cs, vec![Slot::Covector, Slot::Covector], |i| {
            ScalarExpr::from_int((i[0] == i[1] && i[0] < 2) as i64)
        });
        let x = VectorField::from_parts(cs, &[parse_scalar("x2", &cs).unwrap(), ScalarExpr::one()], &[
            ScalarExpr::zero(),
            ScalarExpr::zero(),
        ])
        .unwrap();
        let round = musical(Musical::Sharp, &g, &musical(Musical::Flat, &g, &x.to_tensor()).unwrap()).unwrap();
        assert_eq!(VectorField::from_tensor(&round).unwrap(), x);
        assert!(musical(Musical::Sharp, &g, &VectorField::frame(cs, 2).to_tensor()).is_err());
    }
}
