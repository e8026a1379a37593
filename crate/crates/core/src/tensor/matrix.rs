//! Dense matrices over the field of rational functions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::symcore::{CompiledExpr, ScalarExpr, Var, MAX_VARS};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<ScalarExpr>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![ScalarExpr::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        Matrix::from_fn(n, n, |i, j| if i == j { ScalarExpr::one() } else { ScalarExpr::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ScalarExpr) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<ScalarExpr>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn diagonal(entries: &[ScalarExpr]) -> Matrix {
        let n = entries.len();
        Matrix::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { ScalarExpr::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &ScalarExpr {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ScalarExpr) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[ScalarExpr] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<ScalarExpr> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[ScalarExpr] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &ScalarExpr) -> Matrix {
        self.map(|e| e * c)
    }

    pub fn diff(&self, v: Var) -> Matrix {
        self.map(|e| e.diff(v))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(ScalarExpr::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..=i).all(|j| *self.get(i, j) == -self.get(j, i)))
    }

    pub fn trace(&self) -> ScalarExpr {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    /// Submatrix starting at `(r0, c0)` of the given shape.
    pub fn block(&self, r0: usize, c0: usize, h: usize, w: usize) -> Matrix {
        Matrix::from_fn(h, w, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
        assert!(a.rows == b.rows && c.rows == d.rows && a.cols == c.cols && b.cols == d.cols);
        let (h, w) = (a.rows, a.cols);
        Matrix::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| match (i < h, j < w) {
            (true, true) => a.get(i, j).clone(),
            (true, false) => b.get(i, j - w).clone(),
            (false, true) => c.get(i - h, j).clone(),
            (false, false) => d.get(i - h, j - w).clone(),
        })
    }

    pub fn mul_vec(&self, v: &[ScalarExpr]) -> Vec<ScalarExpr> {
        assert_eq!(v.len(), self.cols, "matrix-vector shape");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Bilinear form `uᵀ M v`.
    pub fn bilinear(&self, u: &[ScalarExpr], v: &[ScalarExpr]) -> ScalarExpr {
        let mv = self.mul_vec(v);
        u.iter().zip(&mv).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum()
    }

    /// Determinant by fraction-field Gaussian elimination.
    pub fn det(&self) -> ScalarExpr {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = ScalarExpr::one();
        for k in 0..n {
            let Some(p) = pick_pivot(&a, k, k) else {
                return ScalarExpr::zero();
            };
            if p != k {
                a.swap_rows(p, k);
                det = -det;
            }
            let pivot = a.get(k, k).clone();
            det = &det * &pivot;
            let inv = pivot.recip().expect("nonzero pivot");
            for i in k + 1..n {
                if a.get(i, k).is_zero() {
                    continue;
                }
                let factor = a.get(i, k) * &inv;
                for j in k + 1..n {
                    if !a.get(k, j).is_zero() {
                        let v = a.get(i, j) - &(&factor * a.get(k, j));
                        a.set(i, j, v);
                    }
                }
                a.set(i, k, ScalarExpr::zero());
            }
        }
        det
    }

    /// Inverse by Gauss–Jordan; fails on a singular matrix.
    pub fn inverse(&self) -> Result<Matrix> {
        self.solve(&Matrix::identity(self.rows))
    }

    /// Solves `self · X = rhs`.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        assert!(self.is_square(), "solve with a non-square matrix");
        assert_eq!(rhs.rows, self.rows, "solve shape");
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.clone();
        for k in 0..n {
            let Some(p) = pick_pivot(&a, k, k) else {
                return Err(Error::Singular { what: "matrix".into(), det: "0".into() });
            };
            if p != k {
                a.swap_rows(p, k);
                b.swap_rows(p, k);
            }
            let inv = a.get(k, k).recip().expect("nonzero pivot");
            for j in 0..n {
                let v = a.get(k, j) * &inv;
                a.set(k, j, v);
            }
            for j in 0..b.cols {
                let v = b.get(k, j) * &inv;
                b.set(k, j, v);
            }
            for i in 0..n {
                if i == k || a.get(i, k).is_zero() {
                    continue;
                }
                let factor = a.get(i, k).clone();
                for j in 0..n {
                    if !a.get(k, j).is_zero() {
                        let v = a.get(i, j) - &(&factor * a.get(k, j));
                        a.set(i, j, v);
                    }
                }
                for j in 0..b.cols {
                    if !b.get(k, j).is_zero() {
                        let v = b.get(i, j) - &(&factor * b.get(k, j));
                        b.set(i, j, v);
                    }
                }
            }
        }
        Ok(b)
    }

    /// Rank over the rational-function field.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let Some(p) = pick_pivot(&a, rank, col) else {
                continue;
            };
            a.swap_rows(p, rank);
            let inv = a.get(rank, col).recip().expect("nonzero pivot");
            for i in rank + 1..a.rows {
                if a.get(i, col).is_zero() {
                    continue;
                }
                let factor = a.get(i, col) * &inv;
                for j in col..a.cols {
                    let v = a.get(i, j) - &(&factor * a.get(rank, j));
                    a.set(i, j, v);
                }
            }
            rank += 1;
        }
        rank
    }

    /// A basis of the right kernel over the rational-function field.
    pub fn nullspace(&self) -> Vec<Vec<ScalarExpr>> {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..a.cols {
            if row == a.rows {
                break;
            }
            let Some(p) = pick_pivot(&a, row, col) else {
                continue;
            };
            a.swap_rows(p, row);
            let inv = a.get(row, col).recip().expect("nonzero pivot");
            for j in 0..a.cols {
                let v = a.get(row, j) * &inv;
                a.set(row, j, v);
            }
            for i in 0..a.rows {
                if i == row || a.get(i, col).is_zero() {
                    continue;
                }
                let factor = a.get(i, col).clone();
                for j in 0..a.cols {
                    if !a.get(row, j).is_zero() {
                        let v = a.get(i, j) - &(&factor * a.get(row, j));
                        a.set(i, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (0..a.cols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![ScalarExpr::zero(); a.cols];
                v[free] = ScalarExpr::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -a.get(r, free);
                }
                v
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn eval(&self, point: &[BigRational; MAX_VARS]) -> Result<Vec<Vec<BigRational>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.eval(point).map_err(Error::from)).collect())
            .collect()
    }

    pub fn eval_f64(&self, point: &[f64; MAX_VARS]) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|e| CompiledExpr::new(e).eval(point)).collect()).collect()
    }
}

/// Row index `>= from` with a nonzero entry in column `col`, preferring constants
/// and then the smallest-degree entry to limit expression growth.
fn pick_pivot(a: &Matrix, from: usize, col: usize) -> Option<usize> {
    (from..a.rows)
        .filter(|&i| !a.get(i, col).is_zero())
        .min_by_key(|&i| {
            let e = a.get(i, col);
            (!e.is_constant(), e.degree(), e.numer().len() + e.denom().len())
        })
}

impl Add<&Matrix> for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "matrix shapes differ");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub<&Matrix> for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "matrix shapes differ");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul<&Matrix> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shapes");
        Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols)
                .filter(|&k| !self.get(i, k).is_zero() && !rhs.get(k, j).is_zero())
                .map(|k| self.get(i, k) * rhs.get(k, j))
                .sum()
        })
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.map(|e| -e)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{parse_scalar, CoordSystem};

    fn mat(cs: &CoordSystem, rows: &[&[&str]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| parse_scalar(s, cs).unwrap()).collect()).collect())
            .unwrap()
    }

    #[test]
    fn det_and_inverse() {
        let cs = CoordSystem::new(2).unwrap();
        let a = mat(&cs, &[&["1 + x1^2", "x2"], &["x2", "1"]]);
        assert_eq!(a.det(), parse_scalar("1 + x1^2 - x2^2", &cs).unwrap());
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Matrix::identity(2));
        let sing = mat(&cs, &[&["x1", "x2"], &["2*x1", "2*x2"]]);
        assert!(sing.det().is_zero());
        assert!(sing.inverse().is_err());
        assert_eq!(sing.rank(), 1);
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        let cs = CoordSystem::new(1).unwrap();
        let a = mat(&cs, &[&["0", "1"], &["1", "0"]]);
        assert_eq!(a.det(), ScalarExpr::from_int(-1));
        assert_eq!(a.inverse().unwrap(), a);
    }

    #[test]
    fn nullspace_spans_kernel() {
        let cs = CoordSystem::new(2).unwrap();
        let a = mat(&cs, &[&["x1", "x2", "1"], &["2*x1", "2*x2", "2"]]);
        let ker = a.nullspace();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(a.mul_vec(v).iter().all(ScalarExpr::is_zero));
        }
        assert!(Matrix::identity(3).nullspace().is_empty());
    }
}
