//! Seeded generators of random test data: polynomials, vector fields,
//! fields `(g, B)` and isometries.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::genmetric::FieldSpec;
use crate::symcore::{CoordSystem, Monomial, Poly, ScalarExpr, Var};
use crate::tensor::{Matrix, VectorField};

/// Seeded source of test data.
pub struct Generator {
    rng: ChaCha8Rng,
    cs: CoordSystem,
}

/// Which coordinates random expressions may depend on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    /// `x^i` only (strongly foliated).
    Base,
    /// All `2m` coordinates.
    All,
}

impl Generator {
    pub fn new(cs: CoordSystem, seed: u64) -> Generator {
        Generator { rng: ChaCha8Rng::seed_from_u64(seed), cs }
    }

    pub fn cs(&self) -> &CoordSystem {
        &self.cs
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn rational(&mut self, num: i64, den: i64) -> BigRational {
        let n = self.rng.gen_range(-num..=num);
        let d = self.rng.gen_range(1..=den);
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// A point with small rational coordinates.
    pub fn point(&mut self) -> Vec<BigRational> {
        (0..self.cs.dim()).map(|_| self.rational(3, 2)).collect()
    }

    fn vars(&self, support: Support) -> Vec<Var> {
        let n = match support {
            Support::Base => self.cs.m(),
            Support::All => self.cs.dim(),
        };
        (0..n).map(|c| self.cs.var(c)).collect()
    }

    /// Polynomial with at most `terms` monomials of total degree `≤ degree`
    /// and integer coefficients in `[-3, 3]`.
    pub fn poly(&mut self, support: Support, degree: u32, terms: usize) -> ScalarExpr {
        let vars = self.vars(support);
        let mut p = Poly::zero();
        for _ in 0..terms {
            let c = self.int(-3, 3);
            if c == 0 {
                continue;
            }
            let deg = self.rng.gen_range(0..=degree);
            let mut mono = Monomial::one();
            for _ in 0..deg {
                let v = vars[self.rng.gen_range(0..vars.len())];
                mono = mono.mul(&Monomial::var(v, 1));
            }
            p = &p + &Poly::term(mono, BigRational::from_integer(BigInt::from(c)));
        }
        ScalarExpr::from_poly(p)
    }

    /// Rational function `p / (1 + q²)`; the denominator never vanishes on `ℝ^{2m}`.
    pub fn rational_function(&mut self, support: Support, degree: u32) -> ScalarExpr {
        let p = self.poly(support, degree, 3);
        let q = self.poly(support, 1, 2);
        let den = &ScalarExpr::one() + &(&q * &q);
        &p / &den
    }

    pub fn vector(&mut self, support: Support, degree: u32) -> VectorField {
        let n = self.cs.dim();
        let c = (0..n).map(|_| self.poly(support, degree, 3)).collect();
        VectorField::new(self.cs, c).expect("dimension")
    }

    /// A vector field in `L` (zero tilde components).
    pub fn l_vector(&mut self, support: Support, degree: u32) -> VectorField {
        let m = self.cs.m();
        let base: Vec<ScalarExpr> = (0..m).map(|_| self.poly(support, degree, 3)).collect();
        VectorField::from_parts(self.cs, &base, &vec![ScalarExpr::zero(); m]).expect("dimension")
    }

    /// Random `m`-component `L`-vector data.
    pub fn l_components(&mut self, support: Support, degree: u32) -> Vec<ScalarExpr> {
        (0..self.cs.m()).map(|_| self.poly(support, degree, 3)).collect()
    }

    pub fn antisymmetric(&mut self, support: Support, degree: u32) -> Matrix {
        let m = self.cs.m();
        let mut a = Matrix::zeros(m, m);
        for i in 0..m {
            for j in i + 1..m {
                let v = self.poly(support, degree, 2);
                a.set(j, i, -&v);
                a.set(i, j, v);
            }
        }
        a
    }

    pub fn constant_antisymmetric(&mut self) -> Matrix {
        let m = self.cs.m();
        let mut a = Matrix::zeros(m, m);
        for i in 0..m {
            for j in i + 1..m {
                let v = ScalarExpr::from_rational(self.rational(2, 3));
                a.set(j, i, -&v);
                a.set(i, j, v);
            }
        }
        a
    }

    /// `g = c·Id + S` with `S` symmetric of degree `≤ degree` (small
    /// coefficients) and `B` antisymmetric; Riemannian at the origin.
    pub fn field(&mut self, support: Support, degree: u32) -> FieldSpec {
        let m = self.cs.m();
        let mut g = Matrix::identity(m).scale(&ScalarExpr::from_int(self.int(2, 4)));
        for i in 0..m {
            for j in i..m {
                if self.rng.gen_bool(0.5) {
                    continue;
                }
                let v = self.poly(support, degree, 1).scale(&BigRational::new(1.into(), 4.into()));
                let v = if i == j { v } else { v.half() };
                let gij = g.get(i, j) + &v;
                g.set(i, j, gij.clone());
                g.set(j, i, gij);
            }
        }
        let b = self.antisymmetric(support, degree);
        let zero = vec![BigRational::from_integer(0.into()); self.cs.dim()];
        FieldSpec::new(self.cs, g, b, ScalarExpr::zero(), m, 0, Some(zero)).expect("diagonally dominant at the origin")
    }

    /// Constant `(g, B)`, `g` positive definite.
    pub fn constant_field(&mut self) -> FieldSpec {
        let m = self.cs.m();
        let mut g = Matrix::identity(m).scale(&ScalarExpr::from_int(self.int(2, 4)));
        for i in 0..m {
            for j in i + 1..m {
                let v = &ScalarExpr::from_rational(self.rational(1, 2)) * &ScalarExpr::ratio(1, m as i64);
                g.set(i, j, v.clone());
                g.set(j, i, v);
            }
        }
        let b = self.constant_antisymmetric();
        let zero = vec![BigRational::from_integer(0.into()); self.cs.dim()];
        FieldSpec::new(self.cs, g, b, ScalarExpr::zero(), m, 0, Some(zero)).expect("diagonally dominant")
    }

    /// A constant `g`-orthogonal `J = (Id − g⁻¹K)(Id + g⁻¹K)⁻¹` for random constant antisymmetric `K`,
    /// negated with probability ½ to reach both components of `O(g)`.
    pub fn orthogonal(&mut self, g: &Matrix) -> Matrix {
        let m = self.cs.m();
        let k = self.constant_antisymmetric();
        let gk = &g.inverse().expect("nondegenerate") * &k;
        let id = Matrix::identity(m);
        let j = &(&id - &gk) * &(&id + &gk).inverse().expect("Cayley factor is invertible");
        if self.rng.gen_bool(0.5) {
            -&j
        } else {
            j
        }
    }
}
