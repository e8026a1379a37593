//! The CWT connection `∇¹` and its torsion-free deformation, the VTC connection.

use crate::algebroid::c_bracket;
use crate::error::{Error, Result};
use crate::genmetric::{iota_of, FieldSpec, Sign};
use crate::symcore::ScalarExpr;
use crate::tensor::{gamma, Matrix, VectorField};

use super::{assemble, pr_l_spm, Connection, DeformationTensor, LConnection};

/// Christoffel symbols `Γ^a_{ib}` of `g` along `L`, from `x`-derivatives only;
/// `lc[(i·m + b)·m + a]`.
pub fn levi_civita_l(field: &FieldSpec) -> Vec<ScalarExpr> {
    let cs = field.cs();
    let m = cs.m();
    let g = field.g();
    let gi = field.g_inv();
    let dg: Vec<Matrix> = (0..m).map(|k| g.diff(cs.var(k))).collect();
    let mut out = Vec::with_capacity(m * m * m);
    for i in 0..m {
        for b in 0..m {
            let low: Vec<ScalarExpr> = (0..m).map(|k| &(dg[i].get(k, b) + dg[b].get(k, i)) - dg[k].get(i, b)).collect();
            for a in 0..m {
                let s: ScalarExpr = (0..m).map(|k| gi.get(a, k) * &low[k]).sum();
                out.push(s.half());
            }
        }
    }
    out
}

fn invert(a: &Matrix, what: &str) -> Result<Matrix> {
    a.inverse().map_err(|_| Error::Singular { what: what.into(), det: a.det().to_string() })
}

fn lc_along(lc: &[ScalarExpr], m: usize, x: &[ScalarExpr], b: usize) -> Vec<ScalarExpr> {
    (0..m)
        .map(|a| {
            (0..m)
                .filter(|&i| !x[i].is_zero())
                .map(|i| &x[i] * &lc[(i * m + b) * m + a])
                .sum()
        })
        .collect()
}

/// The `L`-connections `D±` of the CWT connection:
/// `D±_{ι∓W} Y = pr_L pr_{S±}[ι∓W, ι±Y]_{∇⁰}` on mixed arguments, and on pure
/// ones `D±_{ι±X} Y = LC_{A∓⁻¹X} Y − D±_{ι∓ A±A∓⁻¹ X} Y`.
pub fn cwt_l_connections(field: &FieldSpec) -> Result<(LConnection, LConnection)> {
    let cs = *field.cs();
    let (n, m) = (cs.dim(), cs.m());
    let a_plus = field.a_pm(Sign::Plus);
    let a_minus = field.a_pm(Sign::Minus);
    let a_plus_inv = invert(&a_plus, "A+")?;
    let a_minus_inv = invert(&a_minus, "A-")?;
    let q = field.iota_coframe();
    let lc = levi_civita_l(field);
    let frame = |b: usize| -> Vec<ScalarExpr> {
        (0..m).map(|k| if k == b { ScalarExpr::one() } else { ScalarExpr::zero() }).collect()
    };
    let zero_l = vec![ScalarExpr::zero(); m];
    let mut plus = vec![ScalarExpr::zero(); n * m * m];
    let mut minus = vec![ScalarExpr::zero(); n * m * m];
    for u in 0..n {
        // ∂_u = ι₊(a) + ι₋(b).
        let col = q.col(u);
        let (a, b) = col.split_at(m);
        let lc_dir_plus = a_minus_inv.mul_vec(a);
        let mixed_plus: Vec<ScalarExpr> =
            b.iter().zip(a_plus.mul_vec(&lc_dir_plus)).map(|(x, y)| x - &y).collect();
        let lc_dir_minus = a_plus_inv.mul_vec(b);
        let mixed_minus: Vec<ScalarExpr> =
            a.iter().zip(a_minus.mul_vec(&lc_dir_minus)).map(|(x, y)| x - &y).collect();
        let w_plus = iota_of(Sign::Minus, &mixed_plus, field);
        let w_minus = iota_of(Sign::Plus, &mixed_minus, field);
        for e in 0..m {
            let y_plus = iota_of(Sign::Plus, &frame(e), field);
            let y_minus = iota_of(Sign::Minus, &frame(e), field);
            let dp = if mixed_plus == zero_l {
                zero_l.clone()
            } else {
                pr_l_spm(Sign::Plus, &c_bracket(&w_plus, &y_plus), field)
            };
            let dm = if mixed_minus == zero_l {
                zero_l.clone()
            } else {
                pr_l_spm(Sign::Minus, &c_bracket(&w_minus, &y_minus), field)
            };
            let lp = lc_along(&lc, m, &lc_dir_plus, e);
            let lm = lc_along(&lc, m, &lc_dir_minus, e);
            for k in 0..m {
                plus[(u * m + e) * m + k] = &lp[k] + &dp[k];
                minus[(u * m + e) * m + k] = &lm[k] + &dm[k];
            }
        }
    }
    let mk = |v: Vec<ScalarExpr>| LConnection { cs, coeffs: v };
    Ok((mk(plus), mk(minus)))
}

/// The CWT connection `∇¹` of the field.
pub fn cwt_connection(field: &FieldSpec) -> Result<Connection> {
    let (dp, dm) = cwt_l_connections(field)?;
    Ok(assemble(&dp, &dm, field))
}

/// `D±` induced by a connection preserving `S±`: `D±_Z Y = pr_L pr_{S±} ∇_Z(ι±Y)`.
pub fn induced_l_connections(conn: &Connection, field: &FieldSpec) -> (LConnection, LConnection) {
    let cs = *field.cs();
    let (n, m) = (cs.dim(), cs.m());
    let mut out = [vec![ScalarExpr::zero(); n * m * m], vec![ScalarExpr::zero(); n * m * m]];
    for (slot, sign) in [Sign::Plus, Sign::Minus].into_iter().enumerate() {
        for b in 0..m {
            let e: Vec<ScalarExpr> = (0..m).map(|k| if k == b { ScalarExpr::one() } else { ScalarExpr::zero() }).collect();
            let y = iota_of(sign, &e, field);
            for u in 0..n {
                let d = pr_l_spm(sign, &conn.nabla_frame(u, &y), field);
                for (a, v) in d.into_iter().enumerate() {
                    out[slot][(u * m + b) * m + a] = v;
                }
            }
        }
    }
    let [p, q] = out;
    (LConnection { cs, coeffs: p }, LConnection { cs, coeffs: q })
}

/// Right-hand side of the torsion-free deformation equation for `∇̃ = conn`:
/// `γ([X,Y]_{∇⁰},Z) + γ([Y,Z]_{∇⁰},X) + γ([X,Z]_{∇⁰},Y)
///  − ½[X(γ(Y,Z)) − Y(γ(Z,X)) − 3Z(γ(X,Y))]
///  − [γ(∇̃_X Y,Z) + γ(∇̃_Y Z,X) + γ(∇̃_Z X,Y)]`.
pub fn vtc_rhs(conn: &Connection, x: &VectorField, y: &VectorField, z: &VectorField) -> ScalarExpr {
    let brackets = &(&gamma(&c_bracket(x, y), z) + &gamma(&c_bracket(y, z), x)) + &gamma(&c_bracket(x, z), y);
    let three = ScalarExpr::from_int(3);
    let derivs = &(&x.apply(&gamma(y, z)) - &y.apply(&gamma(z, x))) - &(&three * &z.apply(&gamma(x, y)));
    let nablas = &(&gamma(&conn.nabla(x, y), z) + &gamma(&conn.nabla(y, z), x)) + &gamma(&conn.nabla(z, x), y);
    &(&brackets - &derivs.half()) - &nablas
}

/// Residual of the cyclic `D±` identity of a torsion-free connection on
/// `L`-arguments: `Σ g(D±_{ι±X}Y, Z)` minus
/// `Σ g(pr_L pr_{S±}[ι±X, ι±Y]_{∇⁰}, Z) − ½[(ι±X)g(Y,Z) − (ι±Y)g(Z,X) − 3(ι±Z)g(X,Y)]`.
/// Both sides of the `γ` form carry the same factor `±2`, so no sign survives.
pub fn dpm_cyclic_residual(sign: Sign, d: &LConnection, field: &FieldSpec, x: &[ScalarExpr], y: &[ScalarExpr], z: &[ScalarExpr]) -> ScalarExpr {
    let g = field.g();
    let (ix, iy, iz) = (iota_of(sign, x, field), iota_of(sign, y, field), iota_of(sign, z, field));
    let lhs = &(&g.bilinear(&d.along(&ix, y), z) + &g.bilinear(&d.along(&iy, z), x)) + &g.bilinear(&d.along(&iz, x), y);
    let pr = |a: &VectorField, b: &VectorField| pr_l_spm(sign, &c_bracket(a, b), field);
    let brackets = &(&g.bilinear(&pr(&ix, &iy), z) + &g.bilinear(&pr(&iy, &iz), x)) + &g.bilinear(&pr(&ix, &iz), y);
    let three = ScalarExpr::from_int(3);
    let derivs =
        &(&ix.apply(&g.bilinear(y, z)) - &iy.apply(&g.bilinear(z, x))) - &(&three * &iz.apply(&g.bilinear(x, y)));
    &lhs - &(&brackets - &derivs.half())
}

/// The totally skew deformation `Ψ = ⅓·(right-hand side)` taking `∇¹` to VTC.
pub fn vtc_deformation(field: &FieldSpec) -> Result<DeformationTensor> {
    let cwt = cwt_connection(field)?;
    Ok(deformation_from(&cwt))
}

pub(crate) fn deformation_from(base: &Connection) -> DeformationTensor {
    let cs = *base.cs();
    let n = cs.dim();
    let third = ScalarExpr::ratio(1, 3);
    let frames: Vec<VectorField> = (0..n).map(|c| VectorField::frame(cs, c)).collect();
    let mut psi = Vec::with_capacity(n * n * n);
    for u in 0..n {
        for v in 0..n {
            for z in 0..n {
                psi.push(&third * &vtc_rhs(base, &frames[u], &frames[v], &frames[z]));
            }
        }
    }
    DeformationTensor::from_psi(cs, psi).expect("n³ components")
}

/// The VTC connection `∇ = ∇¹ + Θ`.
pub fn vtc_connection(field: &FieldSpec) -> Result<Connection> {
    let cwt = cwt_connection(field)?;
    cwt.deform(&deformation_from(&cwt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{parse_scalar, CoordSystem};

    fn field(cs: CoordSystem, g: &[&[&str]], b: &[&[&str]]) -> FieldSpec {
        let mat = |rows: &[&[&str]]| {
            Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| parse_scalar(s, &cs).unwrap()).collect()).collect())
                .unwrap()
        };
        FieldSpec::with_metric(cs, mat(g), mat(b), ScalarExpr::zero()).unwrap()
    }

    #[test]
    fn constant_field_gives_flat_connections() {
        let cs = CoordSystem::new(2).unwrap();
        let f = field(cs, &[&["2", "1"], &["1", "3"]], &[&["0", "5"], &["-5", "0"]]);
        let cwt = cwt_connection(&f).unwrap();
        assert!(cwt.is_flat());
        assert!(vtc_deformation(&f).unwrap().is_zero());
        assert_eq!(vtc_connection(&f).unwrap(), cwt);
    }

    #[test]
    fn cwt_is_double_metric() {
        let cs = CoordSystem::new(2).unwrap();
        let f = field(cs, &[&["1 + x1^2", "0"], &["0", "1"]], &[&["0", "x2"], &["-x2", "0"]]);
        let (dp, dm) = cwt_l_connections(&f).unwrap();
        assert!(dp.preserves_metric(f.g()));
        assert!(dm.preserves_metric(f.g()));
        let cwt = cwt_connection(&f).unwrap();
        assert!(cwt.preserves_gamma());
        assert!(cwt.preserves_metric(crate::genmetric::build_h(&f).h()));
    }

    #[test]
    fn vtc_psi_is_skew() {
        let cs = CoordSystem::new(2).unwrap();
        let f = field(cs, &[&["1 + x1^2", "0"], &["0", "1"]], &[&["0", "x1"], &["-x1", "0"]]);
        let d = vtc_deformation(&f).unwrap();
        assert!(d.totally_antisymmetric());
        let vtc = vtc_connection(&f).unwrap();
        assert!(deformation_from(&vtc).is_zero());
    }
}
