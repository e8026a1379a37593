mod run;
mod scenario;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use doublegeom::suite::{run_suite, Hooks, Level};
use serde_json::json;

use scenario::{ConnKind, DiracDecl, DiracKind, FieldDecl, Invalid, QuadDecl, Rows, Scenario, TaskDecl};

#[derive(Parser)]
#[command(name = "doublegeom", version, about = "Generalized geometry on doubled coordinates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a TOML scenario.
    Run {
        scenario: PathBuf,
        /// Override a scenario key, e.g. `--set field.phi='"x1"'`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run the randomized identity suite.
    Suite {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, hide = true)]
        corrupt_bracket: bool,
    },
    /// C-bracket of two vectors.
    Bracket(PairArgs),
    /// The ⋆ product of two vectors.
    Star(PairArgs),
    /// Generalized Lie derivative of a vector, or of ℋ with `--h`.
    Lie {
        #[command(flatten)]
        dims: Dims,
        #[arg(long)]
        x: String,
        #[arg(long, conflicts_with = "h", required_unless_present = "h")]
        y: Option<String>,
        #[arg(long, requires = "g")]
        h: bool,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Generalized torsion `T(X,Y,Z)` of a canonical connection.
    Torsion {
        #[command(flatten)]
        triple: TripleArgs,
    },
    /// Modified curvature `R(X,Y)Z` of a canonical connection.
    Curvature {
        #[command(flatten)]
        triple: TripleArgs,
    },
    /// Scalar curvature at a point.
    Scalar {
        #[command(flatten)]
        dims: Dims,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value_t = ConnKind::Vtc)]
        connection: ConnKind,
        /// Rational point with 2m coordinates.
        #[arg(long)]
        point: String,
    },
    /// Action functional over a box by Gauss-Legendre quadrature.
    Action {
        #[command(flatten)]
        dims: Dims,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value_t = ConnKind::Vtc)]
        connection: ConnKind,
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long)]
        lower: Option<String>,
        #[arg(long)]
        upper: Option<String>,
    },
    /// Integrability of a para-Dirac structure.
    Dirac {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, value_enum)]
        kind: DiracKindArg,
        /// Rows separated by `;`, entries by `,`.
        #[arg(long)]
        matrix: String,
    },
}

#[derive(Args)]
struct Dims {
    #[arg(long)]
    m: usize,
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    dims: Dims,
    /// 2m comma-separated components.
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
}

#[derive(Args)]
struct TripleArgs {
    #[command(flatten)]
    dims: Dims,
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum, default_value_t = ConnKind::Vtc)]
    connection: ConnKind,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    #[arg(long)]
    z: String,
}

#[derive(Args)]
struct FieldArgs {
    /// Metric g, rows separated by `;`.
    #[arg(long)]
    g: Option<String>,
    /// Kalb-Ramond field B.
    #[arg(long)]
    b: Option<String>,
    /// Dilaton.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiracKindArg {
    TwoForm,
    Bivector,
    Span,
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|t| t.trim().to_string()).collect()
}

fn split_rows(s: &str) -> Rows {
    s.split(';').map(split_list).collect()
}

fn floats(s: &str, key: &str) -> Result<Vec<f64>, Invalid> {
    split_list(s).iter().map(|t| t.parse().map_err(|_| Invalid::new(key, format!("'{t}' is not a number")))).collect()
}

impl FieldArgs {
    fn decl(&self) -> Option<FieldDecl> {
        self.g.as_ref().map(|g| FieldDecl {
            g: split_rows(g),
            b: self.b.as_deref().map(split_rows),
            phi: self.phi.clone(),
            p: self.p,
            q: self.q,
            reference_point: None,
        })
    }

    fn require(&self) -> Result<FieldDecl, Invalid> {
        self.decl().ok_or_else(|| Invalid::new("g", "this command needs --g"))
    }
}

fn scenario(m: usize) -> Scenario {
    Scenario {
        m,
        seed: 0,
        field: None,
        vectors: BTreeMap::new(),
        tensors: BTreeMap::new(),
        dirac: BTreeMap::new(),
        quadrature: QuadDecl::default(),
        tasks: Vec::new(),
    }
}

fn with_vectors(mut sc: Scenario, named: &[(&str, &str)]) -> Scenario {
    for (k, v) in named {
        sc.vectors.insert(k.to_string(), split_list(v));
    }
    sc
}

/// Turns a direct subcommand into a one-task scenario.
fn direct(cmd: &Command) -> Result<Scenario, Invalid> {
    Ok(match cmd {
        Command::Bracket(a) | Command::Star(a) => {
            let mut sc = with_vectors(scenario(a.dims.m), &[("x", &a.x), ("y", &a.y)]);
            let (x, y) = ("x".to_string(), "y".to_string());
            sc.tasks.push(if matches!(cmd, Command::Bracket(_)) {
                TaskDecl::Bracket { x, y, expect: None }
            } else {
                TaskDecl::Star { x, y, expect: None }
            });
            sc
        }
        Command::Lie { dims, x, y, h, field } => {
            let mut sc = with_vectors(scenario(dims.m), &[("x", x)]);
            if let Some(y) = y {
                sc.vectors.insert("y".into(), split_list(y));
            }
            sc.field = field.decl();
            let target = if *h { "H".to_string() } else { "y".to_string() };
            sc.tasks.push(TaskDecl::Lie { x: "x".into(), target, expect: None });
            sc
        }
        Command::Torsion { triple: t } | Command::Curvature { triple: t } => {
            let mut sc = with_vectors(scenario(t.dims.m), &[("x", &t.x), ("y", &t.y), ("z", &t.z)]);
            sc.field = Some(t.field.require()?);
            let (x, y, z) = ("x".to_string(), "y".to_string(), "z".to_string());
            sc.tasks.push(if matches!(cmd, Command::Torsion { .. }) {
                TaskDecl::Torsion { connection: t.connection, x, y, z, expect: None }
            } else {
                TaskDecl::Curvature { connection: t.connection, x, y, z }
            });
            sc
        }
        Command::Scalar { dims, field, connection, point } => {
            let mut sc = scenario(dims.m);
            sc.field = Some(field.require()?);
            sc.tasks.push(TaskDecl::ScalarCurvature {
                connection: *connection,
                point: split_list(point),
                expect: None,
                tolerance: None,
            });
            sc
        }
        Command::Action { dims, field, connection, order, lower, upper } => {
            let mut sc = scenario(dims.m);
            sc.field = Some(field.require()?);
            sc.quadrature = QuadDecl {
                order: *order,
                lower: lower.as_deref().map(|s| floats(s, "lower")).transpose()?,
                upper: upper.as_deref().map(|s| floats(s, "upper")).transpose()?,
            };
            sc.tasks.push(TaskDecl::Action { connection: *connection, expect: None, tolerance: None });
            sc
        }
        Command::Dirac { dims, kind, matrix } => {
            let mut sc = scenario(dims.m);
            let kind = match kind {
                DiracKindArg::TwoForm => DiracKind::TwoForm,
                DiracKindArg::Bivector => DiracKind::Bivector,
                DiracKindArg::Span => DiracKind::Span,
            };
            sc.dirac.insert("d".into(), DiracDecl { kind, matrix: split_rows(matrix) });
            sc.tasks.push(TaskDecl::Dirac { structure: "d".into(), expect: None });
            sc
        }
        Command::Run { .. } | Command::Suite { .. } => unreachable!("handled by the caller"),
    })
}

fn emit(cli: &Cli, text: &str) -> Result<(), String> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn suite(cli: &Cli, level: LevelArg, seed: u64, corrupt: bool) -> ExitCode {
    let level = match level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let report = run_suite(level, seed, Hooks { corrupt_bracket: corrupt });
    let text = match cli.format {
        Format::Json => {
            let checks: Vec<_> = report
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "label": c.label,
                        "module": c.module,
                        "cases": c.cases,
                        "failures": c.failures,
                        "residual": c.residual.describe(),
                        "known-discrepancy": c.known_discrepancy,
                    })
                })
                .collect();
            render_json(&json!({
                "level": level.name(),
                "seed": seed,
                "checks": checks,
                "passed": report.passed(),
                "failing": report.failing_labels(),
            }))
        }
        Format::Text => {
            let mut out = String::new();
            for c in &report.checks {
                let state = match (c.passed(), c.known_discrepancy) {
                    (true, _) => "pass",
                    (false, true) => "known",
                    (false, false) => "FAIL",
                };
                out += &format!("{state:5} {:<24} {:<10} {:>5} cases  {}\n", c.label, c.module, c.cases, c.residual.describe());
            }
            out += &format!("level {} seed {seed}\n", level.name());
            out
        }
    };
    if let Err(e) = emit(cli, &text) {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failing checks: {}", report.failing_labels().join(", "));
        ExitCode::FAILURE
    }
}

fn invalid(e: Invalid) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn configure_threads() {
    if let Some(n) = std::env::var("DOUBLEGEOM_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // A second initialization only happens in tests that reuse the process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let sc = match &cli.command {
        Command::Suite { level, seed, corrupt_bracket } => return suite(&cli, *level, *seed, *corrupt_bracket),
        Command::Run { scenario, set } => {
            let text = match std::fs::read_to_string(scenario) {
                Ok(t) => t,
                Err(e) => return invalid(Invalid::new(scenario.display().to_string(), e.to_string())),
            };
            scenario::load(&text, set)
        }
        other => direct(other),
    };
    let sc = match sc {
        Ok(s) => s,
        Err(e) => return invalid(e),
    };
    let env = match sc.validate() {
        Ok(env) => env,
        Err(e) => return invalid(e),
    };
    let report = run::run(sc, &env);
    let text = match cli.format {
        Format::Json => render_json(&report.to_json()),
        Format::Text => report.to_text(),
    };
    if let Err(e) = emit(&cli, &text) {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
