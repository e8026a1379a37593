//! Acceptance gate: runs every criterion at the full case counts and prints
//! one line per criterion. Exits nonzero only on failures that are not
//! documented discrepancies.

use std::process::ExitCode;
use std::time::Instant;

use doublegeom::suite::{find_check, CheckResult, Ctx, Level};

const CRITERIA: [(&str, &[&str]); 12] = [
    ("metric-algebroid axioms", &["metric-compatibility", "normalization", "product-linearity", "bracket-linearity"]),
    ("bracket-formula concordance", &["bracket-concordance"]),
    ("Leibniz identity and Jacobiator forms", &["leibniz", "jacobiator-forms"]),
    (
        "generalized-metric round trip",
        &["field-round-trip", "phi-compatibility", "h-description", "splitting-norms", "phi-eigenstructure"],
    ),
    ("CWT torsion and Levi-Civita oracle", &["mixed-torsion-cwt", "levi-civita-oracle"]),
    ("VTC torsion, skew deformation, constant fields", &["vtc-torsion", "vtc-skew"]),
    ("curvature: Bianchi, cyclic sums, scalar curvature", &["bianchi", "cyclic-curvature", "kappa-seeds", "kappa-constant"]),
    ("generalized Killing equivalence", &["killing-criterion"]),
    ("para-Dirac integrability and J correspondence", &["dirac-criteria", "graph-closedness", "graph-poisson", "isometry-round-trip"]),
    ("S-field transforms", &["s-field-automorphism"]),
    ("action quadrature and volume parallelism", &["action-constant", "action-convergence", "volume-parallel"]),
    ("densities", &["lie-density", "affine-equivariance"]),
];

fn main() -> ExitCode {
    let seed = std::env::var("DOUBLEGEOM_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(42);
    let ctx = Ctx::new(Level::Full, seed);
    let start = Instant::now();
    let mut unexpected = 0;
    for (n, (name, labels)) in CRITERIA.iter().enumerate() {
        let results: Vec<CheckResult> =
            labels.iter().map(|l| find_check(l).unwrap_or_else(|| panic!("unknown check {l}")).run(&ctx)).collect();
        let failed: Vec<&CheckResult> = results.iter().filter(|r| !r.passed()).collect();
        let blocking = results.iter().filter(|r| r.blocking()).count();
        unexpected += blocking;
        let cases: usize = results.iter().map(|r| r.cases).sum();
        let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {:>2} {verdict} {name} ({cases} evaluations)", n + 1);
        for r in &failed {
            let kind = if r.known_discrepancy { "known discrepancy" } else { "unexpected" };
            line += &format!("; {} {kind}: {}/{} failed, first {}", r.label, r.failures, r.cases, r.residual.describe());
        }
        println!("{line}");
    }
    println!("seed {seed}, {:.1}s", start.elapsed().as_secs_f64());
    if unexpected > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
