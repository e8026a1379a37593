//! Identity suites: batches of exact (or, for quadrature and finite
//! differences, floating) checks of the identities the library relies on.
//!
//! `Quick` runs a few fixed instances per identity; `Full` runs the
//! randomized batch sizes listed in [`Check::full_cases`]. Every batch is
//! seeded from the suite seed and the check label, so reports are
//! reproducible.

mod algebra;
mod geometry;
mod structures;

use rayon::prelude::*;

use crate::algebroid::star_product;
use crate::random::Generator;
use crate::symcore::{CoordSystem, ScalarExpr};
use crate::tensor::VectorField;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    pub fn name(self) -> &'static str {
        match self {
            Level::Quick => "quick",
            Level::Full => "full",
        }
    }
}

/// Test hooks that deliberately break an operation, for negative controls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Hooks {
    /// Adds `∂/∂x^1` to every `⋆` product used by the suite.
    pub corrupt_bracket: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    ExactZero,
    /// The first nonzero exact residual, printed.
    Nonzero(String),
    /// Largest relative floating residual.
    Float(f64),
}

impl Residual {
    pub fn describe(&self) -> String {
        match self {
            Residual::ExactZero => "exact-zero".into(),
            Residual::Nonzero(s) => format!("nonzero: {s}"),
            Residual::Float(v) => format!("{v:.3e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub label: &'static str,
    pub module: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub residual: Residual,
    /// Failure is expected and documented; it does not fail the suite.
    pub known_discrepancy: bool,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn blocking(&self) -> bool {
        !self.passed() && !self.known_discrepancy
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub level: Level,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.blocking())
    }

    pub fn failing_labels(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| c.blocking()).map(|c| c.label).collect()
    }
}

/// Shared state of one suite run.
#[derive(Clone, Copy, Debug)]
pub struct Ctx {
    pub level: Level,
    pub seed: u64,
    pub hooks: Hooks,
}

impl Ctx {
    pub fn new(level: Level, seed: u64) -> Ctx {
        Ctx { level, seed, hooks: Hooks::default() }
    }

    pub fn with_hooks(mut self, hooks: Hooks) -> Ctx {
        self.hooks = hooks;
        self
    }

    fn pick(&self, quick: usize, full: usize) -> usize {
        match self.level {
            Level::Quick => quick,
            Level::Full => full,
        }
    }

    /// Generator for case `case` of the batch `label`.
    fn gen(&self, m: usize, label: &str, case: usize) -> Generator {
        let tag = label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
        let seed = self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ tag ^ (case as u64).wrapping_mul(0x2545_f491_4f6c_dd1d);
        Generator::new(CoordSystem::new(m).expect("m within range"), seed)
    }

    fn star(&self, x: &VectorField, y: &VectorField) -> VectorField {
        let s = star_product(x, y);
        if self.hooks.corrupt_bracket {
            &s + &VectorField::frame(*x.cs(), 0)
        } else {
            s
        }
    }
}

/// Running count of cases and failures of one batch.
#[derive(Clone, Debug, Default)]
pub(crate) struct Tally {
    cases: usize,
    failures: usize,
    first: Option<String>,
    max_float: Option<f64>,
}

impl Tally {
    pub(crate) fn exact(&mut self, r: &ScalarExpr) {
        self.holds(r.is_zero(), || r.to_string());
    }

    pub(crate) fn vector(&mut self, r: &VectorField) {
        self.holds(r.is_zero(), || r.to_string());
    }

    pub(crate) fn holds(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(detail());
            }
        }
    }

    pub(crate) fn error(&mut self, e: crate::Error) {
        self.holds(false, || e.to_string());
    }

    /// A relative floating residual compared against `tol`.
    pub(crate) fn float(&mut self, rel: f64, tol: f64) {
        self.max_float = Some(self.max_float.map_or(rel, |m| m.max(rel)));
        self.holds(rel.is_finite() && rel < tol, || format!("relative residual {rel:.3e}"));
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.failures += other.failures;
        if self.first.is_none() {
            self.first = other.first;
        }
        self.max_float = match (self.max_float, other.max_float) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self
    }

    fn finish(self, label: &'static str, module: &'static str) -> CheckResult {
        let residual = match (self.first, self.max_float) {
            (Some(s), _) => Residual::Nonzero(s),
            (None, Some(v)) => Residual::Float(v),
            (None, None) => Residual::ExactZero,
        };
        CheckResult { label, module, cases: self.cases, failures: self.failures, residual, known_discrepancy: false }
    }
}

/// Runs `n` cases in parallel; tallies merge in case order.
pub(crate) fn batch<F>(n: usize, f: F) -> Tally
where
    F: Fn(usize, &mut Tally) + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut t = Tally::default();
            f(i, &mut t);
            t
        })
        .reduce(Tally::default, Tally::merge)
}

/// One named identity of the suite.
#[derive(Clone, Copy)]
pub struct Check {
    pub label: &'static str,
    pub module: &'static str,
    /// Batch size of the full level.
    pub full_cases: usize,
    run: fn(&Ctx) -> Tally,
    known_discrepancy: bool,
}

impl Check {
    pub fn run(&self, ctx: &Ctx) -> CheckResult {
        let mut r = (self.run)(ctx).finish(self.label, self.module);
        r.known_discrepancy = self.known_discrepancy;
        r
    }
}

impl std::fmt::Debug for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Check").field("label", &self.label).field("module", &self.module).finish()
    }
}

const fn check(label: &'static str, module: &'static str, full_cases: usize, run: fn(&Ctx) -> Tally) -> Check {
    Check { label, module, full_cases, run, known_discrepancy: false }
}

/// Every identity of the suite, in report order.
pub fn checks() -> Vec<Check> {
    let mut v = vec![
        check("ring-axioms", "symcore", 100, algebra::ring_axioms),
        check("mixed-partials", "symcore", 100, algebra::mixed_partials),
        check("finite-differences", "symcore", 30, algebra::finite_differences),
        check("product-structure", "tensor", 50, algebra::product_structure),
        check("lagrangian-isotropy", "tensor", 2, algebra::lagrangian_isotropy),
        check("metric-compatibility", "algebroid", 200, algebra::metric_compatibility),
        check("normalization", "algebroid", 200, algebra::normalization),
        check("product-linearity", "algebroid", 50, algebra::product_linearity),
        check("bracket-linearity", "algebroid", 50, algebra::bracket_linearity),
        check("bracket-concordance", "algebroid", 50, algebra::bracket_concordance),
        check("differential-products", "algebroid", 30, algebra::differential_products),
        check("foliated-projection", "algebroid", 30, algebra::foliated_projection),
        check("leibniz", "algebroid", 100, algebra::leibniz),
        check("jacobiator-forms", "algebroid", 50, algebra::jacobiator_forms),
        check("lie-derivative-commutator", "algebroid", 20, algebra::lie_derivative_commutator),
        check("cyclic-bracket", "algebroid", 50, algebra::cyclic_bracket),
        check("s-field-automorphism", "algebroid", 10, algebra::s_field_automorphism),
        check("splitting-norms", "genmetric", 50, geometry::splitting_norms),
        check("h-description", "genmetric", 50, geometry::h_description),
        check("phi-eigenstructure", "genmetric", 50, geometry::phi_eigenstructure),
        check("phi-compatibility", "genmetric", 50, geometry::phi_compatibility),
        check("field-round-trip", "genmetric", 50, geometry::field_round_trip),
        check("killing-criterion", "genmetric", 30, geometry::killing_criterion),
        check("double-metric", "connection", 5, geometry::double_metric),
        check("mixed-torsion-cwt", "connection", 50, geometry::mixed_torsion_cwt),
        check("levi-civita-oracle", "connection", 5, geometry::levi_civita_oracle),
        check("vtc-torsion", "connection", 100, geometry::vtc_torsion),
        check("vtc-skew", "connection", 5, geometry::vtc_skew),
        check("vtc-cyclic", "connection", 30, geometry::vtc_cyclic),
        check("vtc-uniqueness", "connection", 5, geometry::vtc_uniqueness),
        check("dpm-cyclic", "connection", 30, geometry::dpm_cyclic),
        check("sigma-pm", "connection", 20, geometry::sigma_pm),
        check("bianchi", "connection", 30, geometry::bianchi),
        check("kappa-seeds", "connection", 10, geometry::kappa_seeds),
        check("kappa-constant", "connection", 5, geometry::kappa_constant),
        check("volume-parallel", "connection", 5, geometry::volume_parallel),
        check("action-constant", "connection", 3, geometry::action_constant),
        check("action-convergence", "connection", 1, geometry::action_convergence),
        check("dirac-criteria", "dirac", 30, structures::dirac_criteria),
        check("graph-closedness", "dirac", 6, structures::graph_closedness),
        check("graph-poisson", "dirac", 6, structures::graph_poisson),
        check("isometry-round-trip", "dirac", 20, structures::isometry_round_trip),
        check("graph-isometry", "dirac", 20, structures::graph_isometry),
        check("phi-orthogonal", "dirac", 10, structures::phi_orthogonal),
        check("psi-triple", "dirac", 20, structures::psi_triple),
        check("two-of-three", "dirac", 10, structures::two_of_three),
        check("lie-density", "density", 10, structures::lie_density),
        check("affine-equivariance", "density", 10, structures::affine_equivariance),
        check("det-g-weight", "density", 10, structures::det_g_weight),
    ];
    v.push(Check { known_discrepancy: true, ..check("cyclic-curvature", "connection", 4, geometry::cyclic_curvature) });
    v
}

pub fn find_check(label: &str) -> Option<Check> {
    checks().into_iter().find(|c| c.label == label)
}

pub fn run_suite(level: Level, seed: u64, hooks: Hooks) -> SuiteReport {
    let ctx = Ctx::new(level, seed).with_hooks(hooks);
    let checks = checks().iter().map(|c| c.run(&ctx)).collect();
    SuiteReport { level, seed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_unique() {
        let all = checks();
        let mut labels: Vec<_> = all.iter().map(|c| c.label).collect();
        labels.sort_unstable();
        labels.dedup();
        assert_eq!(labels.len(), all.len());
    }

    #[test]
    fn corrupted_bracket_is_caught() {
        let ctx = Ctx::new(Level::Quick, 1).with_hooks(Hooks { corrupt_bracket: true });
        let r = find_check("metric-compatibility").unwrap().run(&ctx);
        assert!(!r.passed());
        let clean = find_check("metric-compatibility").unwrap().run(&Ctx::new(Level::Quick, 1));
        assert!(clean.passed(), "{clean:?}");
    }
}
