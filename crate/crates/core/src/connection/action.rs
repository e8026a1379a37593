//! Gauss–Legendre evaluation of the actions `𝒜` (VTC) and `𝒜₁` (CWT) over a box.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::genmetric::{build_h, FieldSpec};
use crate::symcore::{full_point_f64, CompiledExpr, CoordSystem, ScalarExpr, SymError};

use super::curvature::{contraction_bivector, curvature_tensor};
use super::{cwt_connection, vtc_connection};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionKind {
    Vtc,
    Cwt,
}

/// An axis-aligned box in `ℝ^{2m}`, in frame order.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxDomain {
    pub fn unit(cs: &CoordSystem) -> BoxDomain {
        BoxDomain { lower: vec![0.0; cs.dim()], upper: vec![1.0; cs.dim()] }
    }

    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(a, b)| b - a).product()
    }
}

/// Tensor-product Gauss–Legendre rule of `order` nodes per axis over the box.
/// The sum runs in a fixed node order.
pub fn integrate_box<F>(domain: &BoxDomain, order: usize, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = domain.lower.len();
    if domain.upper.len() != dim {
        return Err(Error::Dimension("box bounds differ in length".into()));
    }
    let order = NonZeroUsize::new(order).ok_or_else(|| Error::Invalid("quadrature order must be positive".into()))?;
    let rule = GaussLegendre::new(order);
    let nodes: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    let k = nodes.len();
    let total = k.checked_pow(dim as u32).ok_or_else(|| Error::Invalid("too many quadrature nodes".into()))?;
    let half: Vec<(f64, f64)> =
        domain.lower.iter().zip(&domain.upper).map(|(a, b)| (0.5 * (b - a), 0.5 * (b + a))).collect();
    let partial: Vec<f64> = (0..k)
        .into_par_iter()
        .map(|first| {
            let inner = total / k;
            let mut acc = 0.0;
            let mut x = vec![0.0; dim];
            for rest in 0..inner {
                let mut w = 1.0;
                let mut idx = first * inner + rest;
                for axis in (0..dim).rev() {
                    let (node, weight) = nodes[idx % k];
                    idx /= k;
                    x[axis] = half[axis].0 * node + half[axis].1;
                    w *= weight * half[axis].0;
                }
                acc += w * f(&x);
            }
            acc
        })
        .collect();
    Ok(partial.iter().sum())
}

struct Compiled {
    expr: CompiledExpr,
    foliated: bool,
}

impl Compiled {
    fn new(e: &ScalarExpr) -> Compiled {
        Compiled { expr: CompiledExpr::new(e), foliated: e.is_foliated() }
    }
}

/// `∫ e^{-2φ} κ(ℋ, ∇) √|det ℋ|` over the box with `∇` the VTC or CWT connection.
///
/// When every ingredient is independent of the tilde coordinates the tilde
/// integrals are done in closed form.
pub fn action_value(field: &FieldSpec, kind: ActionKind, domain: &BoxDomain, order: usize) -> Result<f64> {
    let cs = *field.cs();
    let n = cs.dim();
    if domain.lower.len() != n || domain.upper.len() != n {
        return Err(Error::Dimension(format!("box must have {n} sides")));
    }
    let conn = match kind {
        ActionKind::Vtc => vtc_connection(field)?,
        ActionKind::Cwt => cwt_connection(field)?,
    };
    let ric = curvature_tensor(&conn).ricci();
    let k = contraction_bivector(field);
    let mut terms: Vec<(Compiled, Compiled)> = Vec::new();
    for a in 0..n {
        for c in 0..n {
            let sym = (ric.get(a, c) + ric.get(c, a)).half();
            if !sym.is_zero() && !k.get(a, c).is_zero() {
                terms.push((Compiled::new(k.get(a, c)), Compiled::new(&sym)));
            }
        }
    }
    let det_h = Compiled::new(&build_h(field).h().det());
    let phi = Compiled::new(field.phi());
    let foliated = det_h.foliated && phi.foliated && terms.iter().all(|(x, y)| x.foliated && y.foliated);
    let m = cs.m();
    let (sub, factor) = if foliated {
        let tilde_vol: f64 = (m..n).map(|c| domain.upper[c] - domain.lower[c]).product();
        (BoxDomain { lower: domain.lower[..m].to_vec(), upper: domain.upper[..m].to_vec() }, tilde_vol)
    } else {
        (domain.clone(), 1.0)
    };
    let all: Vec<&CompiledExpr> =
        terms.iter().flat_map(|(x, y)| [&x.expr, &y.expr]).chain([&det_h.expr, &phi.expr]).collect();
    let pole = std::sync::atomic::AtomicBool::new(false);
    let integrand = |x: &[f64]| -> f64 {
        let mut pt = vec![0.0; n];
        pt[..x.len()].copy_from_slice(x);
        let full = full_point_f64(&pt, &cs);
        if all.iter().any(|e| e.eval_den(&full) == 0.0) {
            pole.store(true, std::sync::atomic::Ordering::Relaxed);
            return 0.0;
        }
        let kappa: f64 = terms.iter().map(|(a, b)| a.expr.eval(&full) * b.expr.eval(&full)).sum();
        (-2.0 * phi.expr.eval(&full)).exp() * kappa * det_h.expr.eval(&full).abs().sqrt()
    };
    let value = integrate_box(&sub, order, integrand)?;
    if pole.load(std::sync::atomic::Ordering::Relaxed) || !value.is_finite() {
        return Err(SymError::Pole.into());
    }
    Ok(value * factor)
}
