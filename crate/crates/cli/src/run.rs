//! Executes validated scenario tasks and assembles the report.

use std::collections::BTreeMap;

use doublegeom::algebroid::{c_bracket, d_operator, gen_lie_derivative, star_product};
use doublegeom::connection::{
    action_value, bianchi_residual, curvature_tensor, cwt_connection, gualtieri_torsion, modified_curvature,
    scalar_curvature, scalar_curvature_expr, vtc_connection, ActionKind, BoxDomain, Connection,
};
use doublegeom::dirac::{check_integrability, is_lie_involutive, Criterion};
use doublegeom::genmetric::{build_h, killing_report, FieldSpec};
use doublegeom::symcore::{full_point, rational_to_f64, ScalarExpr};
use doublegeom::tensor::{pair_gamma, TensorField, VectorField};
use serde_json::{json, Value};

use crate::scenario::{point, ConnKind, Env, Expect, Scenario, TaskDecl};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
    Error,
}

impl Status {
    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Failed => "failed",
            Status::Error => "error",
        }
    }
}

pub struct TaskOutcome {
    pub task: &'static str,
    pub status: Status,
    /// Named results, kept in key order.
    pub values: BTreeMap<String, Value>,
    pub message: Option<String>,
}

impl TaskOutcome {
    fn new(task: &'static str) -> TaskOutcome {
        TaskOutcome { task, status: Status::Ok, values: BTreeMap::new(), message: None }
    }

    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.values.insert(key.to_string(), v.into());
    }

    fn fail(&mut self, msg: impl Into<String>) {
        if self.status == Status::Ok {
            self.status = Status::Failed;
            self.message = Some(msg.into());
        }
    }
}

pub struct Report {
    pub scenario: Scenario,
    pub outcomes: Vec<TaskOutcome>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.status == Status::Ok)
    }

    pub fn to_json(&self) -> Value {
        let tasks: Vec<Value> = self
            .outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let mut v = json!({ "index": i, "task": o.task, "status": o.status.name(), "values": o.values });
                if let Some(msg) = &o.message {
                    v["message"] = json!(msg);
                }
                v
            })
            .collect();
        json!({
            "scenario": serde_json::to_value(&self.scenario).expect("scenario serializes"),
            "tasks": tasks,
            "passed": self.passed(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, o) in self.outcomes.iter().enumerate() {
            out += &format!("task {i} {}: {}\n", o.task, o.status.name());
            for (k, v) in &o.values {
                let shown = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out += &format!("  {k}: {shown}\n");
            }
            if let Some(msg) = &o.message {
                out += &format!("  message: {msg}\n");
            }
        }
        out += if self.passed() { "all tasks passed\n" } else { "some tasks failed\n" };
        out
    }
}

pub fn run(scenario: Scenario, env: &Env) -> Report {
    let outcomes = scenario
        .tasks
        .iter()
        .map(|t| {
            let mut o = TaskOutcome::new(t.name());
            if let Err(e) = execute(&scenario, env, t, &mut o) {
                o.status = Status::Error;
                o.message = Some(e.to_string());
            }
            o
        })
        .collect();
    Report { scenario, outcomes }
}

fn components(v: &VectorField) -> Value {
    Value::Array(v.comps().iter().map(|c| Value::String(c.to_string())).collect())
}

fn verdict(zero: bool, r: &dyn std::fmt::Display) -> String {
    if zero {
        "exact-zero".into()
    } else {
        format!("nonzero: {r}")
    }
}

fn gamma(x: &VectorField, y: &VectorField) -> ScalarExpr {
    pair_gamma(x, y).expect("vectors share the scenario coordinates")
}

fn field(env: &Env) -> &FieldSpec {
    env.field.as_ref().expect("validated: task has a field")
}

fn connection(kind: ConnKind, f: &FieldSpec) -> doublegeom::Result<Connection> {
    match kind {
        ConnKind::Vtc => vtc_connection(f),
        ConnKind::Cwt => cwt_connection(f),
    }
}

fn expected(env: &Env, v: &Option<toml::Value>) -> Option<Expect> {
    v.as_ref().map(|v| Expect::parse(&env.cs, v, "expect").expect("validated expectation"))
}

fn check_vector(o: &mut TaskOutcome, got: &VectorField, exp: Option<Expect>) {
    let ok = match &exp {
        None => return,
        Some(Expect::Zero) => got.is_zero(),
        Some(Expect::Components(c)) => c.len() == got.comps().len() && c.iter().zip(got.comps()).all(|(a, b)| a == b),
        Some(_) => {
            o.fail("a vector result needs \"zero\" or a component list as expectation");
            return;
        }
    };
    if !ok {
        o.fail(format!("expected {}, got {got}", describe(exp.as_ref().expect("some"))));
    }
}

fn check_scalar(o: &mut TaskOutcome, got: &ScalarExpr, exp: Option<Expect>) {
    let ok = match &exp {
        None => return,
        Some(Expect::Zero) => got.is_zero(),
        Some(Expect::Scalar(s)) => s == got,
        Some(Expect::Number(x)) => got.as_constant().is_some_and(|c| rational_to_f64(&c) == *x),
        Some(Expect::Components(_)) => false,
    };
    if !ok {
        o.fail(format!("expected {}, got {got}", describe(exp.as_ref().expect("some"))));
    }
}

fn describe(e: &Expect) -> String {
    match e {
        Expect::Zero => "zero".into(),
        Expect::Scalar(s) => s.to_string(),
        Expect::Components(c) => format!("[{}]", c.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")),
        Expect::Number(x) => x.to_string(),
    }
}

fn close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs().max(1.0)
}

fn execute(sc: &Scenario, env: &Env, task: &TaskDecl, o: &mut TaskOutcome) -> doublegeom::Result<()> {
    let vec = |name: &String| &env.vectors[name];
    match task {
        TaskDecl::CheckAxioms { vectors } => {
            let pool: Vec<&VectorField> = match vectors {
                Some(names) => names.iter().map(vec).collect(),
                None => env.vectors.values().collect(),
            };
            let frame: Vec<VectorField>;
            let pool = if pool.is_empty() {
                frame = (0..env.cs.dim()).map(|c| VectorField::frame(env.cs, c)).collect();
                frame.iter().collect()
            } else {
                pool
            };
            let f = ScalarExpr::var(env.cs.var(0));
            let (mut compat, mut norm, mut linear) = (None, None, None);
            let note = |slot: &mut Option<String>, zero: bool, r: &dyn std::fmt::Display| {
                if !zero && slot.is_none() {
                    *slot = Some(r.to_string());
                }
            };
            let mut triples = 0usize;
            for x in &pool {
                for y in &pool {
                    let xy = star_product(x, y);
                    let r = &(&star_product(x, y) + &star_product(y, x)) - &d_operator(env.cs, &gamma(x, y)).scale(&ScalarExpr::from_int(2));
                    note(&mut norm, r.is_zero(), &r);
                    let r = &(&star_product(x, &y.scale(&f)) - &xy.scale(&f)) - &y.scale(&x.apply(&f));
                    note(&mut linear, r.is_zero(), &r);
                    for z in &pool {
                        triples += 1;
                        let r = &(&x.apply(&gamma(y, z)) - &gamma(&star_product(x, y), z)) - &gamma(y, &star_product(x, z));
                        note(&mut compat, r.is_zero(), &r);
                    }
                }
            }
            o.put("triples", triples);
            for (key, slot) in [("metric-compatibility", compat), ("normalization", norm), ("product-linearity", linear)] {
                match slot {
                    None => o.put(key, "exact-zero"),
                    Some(r) => {
                        o.put(key, format!("nonzero: {r}"));
                        o.fail(format!("{key} fails"));
                    }
                }
            }
        }
        TaskDecl::Bracket { x, y, expect } | TaskDecl::Star { x, y, expect } => {
            let r = if matches!(task, TaskDecl::Bracket { .. }) {
                c_bracket(vec(x), vec(y))
            } else {
                star_product(vec(x), vec(y))
            };
            o.put("components", components(&r));
            o.put("value", r.to_string());
            check_vector(o, &r, expected(env, expect));
        }
        TaskDecl::Lie { x, target, expect } => {
            let t: TensorField = if target == "H" {
                build_h(field(env)).to_tensor()
            } else if let Some(v) = env.vectors.get(target) {
                v.to_tensor()
            } else {
                env.tensors[target].clone()
            };
            let r = gen_lie_derivative(vec(x), &t)?;
            let exp = expected(env, expect);
            if env.vectors.contains_key(target) && target != "H" {
                let v = VectorField::from_tensor(&r)?;
                o.put("components", components(&v));
                check_vector(o, &v, exp);
            } else {
                let mat = r.to_matrix()?;
                let rows: Vec<Value> = (0..mat.rows())
                    .map(|i| Value::Array(mat.row(i).iter().map(|e| Value::String(e.to_string())).collect()))
                    .collect();
                o.put("components", Value::Array(rows));
                match exp {
                    None => {}
                    Some(Expect::Zero) => {
                        if !r.is_zero() {
                            o.fail("expected zero tensor");
                        }
                    }
                    Some(Expect::Components(c)) => {
                        if c.as_slice() != r.comps() {
                            o.fail("tensor components differ from expectation");
                        }
                    }
                    Some(_) => o.fail("a tensor result needs \"zero\" or a flat component list as expectation"),
                }
            }
            o.put("zero", r.is_zero());
        }
        TaskDecl::Killing { x, expect } => {
            let r = killing_report(vec(x), field(env))?;
            o.put("generalized", r.generalized);
            o.put("classical", r.classical);
            if r.generalized != r.classical {
                o.fail("the two Killing criteria disagree");
            }
            if let Some(want) = expect {
                if *want != r.generalized {
                    o.fail(format!("expected killing = {want}"));
                }
            }
        }
        TaskDecl::Torsion { connection: k, x, y, z, expect } => {
            let conn = connection(*k, field(env))?;
            let t = gualtieri_torsion(&conn, vec(x), vec(y), vec(z))?;
            o.put("torsion", t.to_string());
            check_scalar(o, &t, expected(env, expect));
        }
        TaskDecl::Curvature { connection: k, x, y, z } => {
            let conn = connection(*k, field(env))?;
            let r = modified_curvature(&conn, vec(x), vec(y), vec(z))?;
            o.put("components", components(&r));
            let b = bianchi_residual(&conn, vec(x), vec(y), vec(z))?;
            o.put("bianchi", verdict(b.is_zero(), &b));
            let tensor = curvature_tensor(&conn);
            o.put("cyclic-sum-zero", tensor.cyclic_sum_vanishes_on(&(0..env.cs.dim()).collect::<Vec<_>>()));
        }
        TaskDecl::ScalarCurvature { connection: k, point: p, expect, tolerance } => {
            let f = field(env);
            let conn = connection(*k, f)?;
            let pt = point(&env.cs, p, "point").expect("validated point");
            let kappa = scalar_curvature(&conn, f, &pt)?;
            let exact = scalar_curvature_expr(&conn, f).eval(&full_point(&pt, &env.cs)?)?;
            o.put("kappa", kappa);
            o.put("exact", exact.to_string());
            let tol = tolerance.unwrap_or(1e-9);
            if !close(kappa, rational_to_f64(&exact), tol) {
                o.fail("closed form and frame evaluation of kappa disagree");
            }
            let exact = ScalarExpr::from_rational(exact);
            match expected(env, expect) {
                Some(Expect::Number(x)) => {
                    if !close(kappa, x, tol) {
                        o.fail(format!("expected kappa = {x}, got {kappa}"));
                    }
                }
                e => check_scalar(o, &exact, e),
            }
        }
        TaskDecl::Action { connection: k, expect, tolerance } => {
            let f = field(env);
            let domain = BoxDomain {
                lower: sc.quadrature.lower.clone().unwrap_or_else(|| vec![0.0; env.cs.dim()]),
                upper: sc.quadrature.upper.clone().unwrap_or_else(|| vec![1.0; env.cs.dim()]),
            };
            let kind = match k {
                ConnKind::Vtc => ActionKind::Vtc,
                ConnKind::Cwt => ActionKind::Cwt,
            };
            let s = action_value(f, kind, &domain, sc.quadrature.order)?;
            o.put("action", s);
            o.put("order", sc.quadrature.order);
            if let Some(want) = expect {
                if !close(s, *want, tolerance.unwrap_or(1e-9)) {
                    o.fail(format!("expected action = {want}, got {s}"));
                }
            }
        }
        TaskDecl::Dirac { structure, expect } => {
            let (_, _, d) = &env.dirac[structure];
            let isotropic = d.is_isotropic();
            o.put("isotropic", isotropic);
            let foliated = d.is_strongly_foliated();
            o.put("strongly-foliated", foliated);
            if !isotropic {
                o.fail("structure is not isotropic");
                return Ok(());
            }
            let criteria: &[Criterion] = if foliated { &Criterion::ALL } else { &Criterion::GENERAL };
            let mut verdicts = BTreeMap::new();
            for c in criteria {
                verdicts.insert(c.label().to_string(), Value::Bool(check_integrability(d, *c)?));
            }
            let first = verdicts.values().next().cloned().unwrap_or(Value::Bool(true));
            if verdicts.values().any(|v| *v != first) {
                o.fail("integrability criteria disagree");
            }
            o.put("criteria", serde_json::to_value(&verdicts).expect("map serializes"));
            o.put("lie-involutive", is_lie_involutive(d));
            let integrable = first == Value::Bool(true);
            o.put("integrable", integrable);
            if let Some(want) = expect {
                if *want != integrable {
                    o.fail(format!("expected integrable = {want}"));
                }
            }
        }
    }
    Ok(())
}
