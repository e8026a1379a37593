//! Scenario documents: TOML input, overrides, and validation into the
//! objects the tasks run on.

use std::collections::BTreeMap;

use doublegeom::dirac::{graph_dirac, GraphKind, ParaDirac};
use doublegeom::genmetric::FieldSpec;
use doublegeom::symcore::{parse_scalar, CoordSystem, ScalarExpr, MAX_M};
use doublegeom::tensor::{parse_variance, Matrix, Slot, TensorField, VectorField};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

/// A validation failure, located by its dotted key.
#[derive(Debug, Clone, PartialEq)]
pub struct Invalid {
    pub key: String,
    pub msg: String,
}

impl Invalid {
    pub fn new(key: impl Into<String>, msg: impl Into<String>) -> Invalid {
        Invalid { key: key.into(), msg: msg.into() }
    }
}

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.key, self.msg)
    }
}

pub type Rows = Vec<Vec<String>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub m: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDecl>,
    #[serde(default)]
    pub vectors: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub tensors: BTreeMap<String, TensorDecl>,
    #[serde(default)]
    pub dirac: BTreeMap<String, DiracDecl>,
    #[serde(default)]
    pub quadrature: QuadDecl,
    #[serde(default)]
    pub tasks: Vec<TaskDecl>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDecl {
    pub g: Rows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_point: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDecl {
    pub variance: String,
    pub components: Rows,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiracKind {
    TwoForm,
    Bivector,
    Span,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracDecl {
    pub kind: DiracKind,
    pub matrix: Rows,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadDecl {
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
}

fn default_order() -> usize {
    4
}

impl Default for QuadDecl {
    fn default() -> QuadDecl {
        QuadDecl { order: default_order(), lower: None, upper: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ConnKind {
    Vtc,
    Cwt,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskDecl {
    CheckAxioms {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vectors: Option<Vec<String>>,
    },
    Bracket {
        x: String,
        y: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<toml::Value>,
    },
    Star {
        x: String,
        y: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<toml::Value>,
    },
    /// `𝔏_X` of a named vector, a named tensor, or `"H"`.
    Lie {
        x: String,
        target: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<toml::Value>,
    },
    Killing {
        x: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<bool>,
    },
    Torsion {
        connection: ConnKind,
        x: String,
        y: String,
        z: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<toml::Value>,
    },
    Curvature {
        connection: ConnKind,
        x: String,
        y: String,
        z: String,
    },
    ScalarCurvature {
        connection: ConnKind,
        point: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<toml::Value>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    Action {
        connection: ConnKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    Dirac {
        structure: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<bool>,
    },
}

impl TaskDecl {
    pub fn name(&self) -> &'static str {
        match self {
            TaskDecl::CheckAxioms { .. } => "check-axioms",
            TaskDecl::Bracket { .. } => "bracket",
            TaskDecl::Star { .. } => "star",
            TaskDecl::Lie { .. } => "lie",
            TaskDecl::Killing { .. } => "killing",
            TaskDecl::Torsion { .. } => "torsion",
            TaskDecl::Curvature { .. } => "curvature",
            TaskDecl::ScalarCurvature { .. } => "scalar-curvature",
            TaskDecl::Action { .. } => "action",
            TaskDecl::Dirac { .. } => "dirac",
        }
    }
}

/// Parses a TOML document, applies `key=value` overrides, and deserializes.
pub fn load(text: &str, overrides: &[String]) -> Result<Scenario, Invalid> {
    let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| Invalid::new("document", e.to_string().trim_end()))?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    Scenario::deserialize(toml::Value::Table(doc)).map_err(|e| Invalid::new("document", e.to_string().trim_end()))
}

fn apply_override(doc: &mut toml::Table, spec: &str) -> Result<(), Invalid> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| Invalid::new(spec, "override must be key=value"))?;
    let key = key.trim();
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| Invalid::new(key, "empty override key"))?;
    let mut table = doc;
    for p in parts {
        table = table
            .entry(p)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Invalid::new(key, format!("'{p}' is not a table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

/// Parsed objects a scenario's tasks refer to.
pub struct Env {
    pub cs: CoordSystem,
    pub field: Option<FieldSpec>,
    pub vectors: BTreeMap<String, VectorField>,
    pub tensors: BTreeMap<String, TensorField>,
    pub dirac: BTreeMap<String, (DiracKind, Matrix, ParaDirac)>,
}

pub fn expr(cs: &CoordSystem, text: &str, key: &str) -> Result<ScalarExpr, Invalid> {
    parse_scalar(text, cs).map_err(|e| Invalid::new(key, e.to_string()))
}

pub fn matrix(cs: &CoordSystem, rows: &Rows, shape: (usize, usize), key: &str) -> Result<Matrix, Invalid> {
    if rows.len() != shape.0 {
        return Err(Invalid::new(key, format!("{} rows, expected {}", rows.len(), shape.0)));
    }
    let mut out = Vec::with_capacity(shape.0);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != shape.1 {
            return Err(Invalid::new(format!("{key}[{i}]"), format!("{} entries, expected {}", row.len(), shape.1)));
        }
        out.push(row.iter().enumerate().map(|(j, s)| expr(cs, s, &format!("{key}[{i}][{j}]"))).collect::<Result<Vec<_>, _>>()?);
    }
    Matrix::from_rows(out).map_err(|e| Invalid::new(key, e.to_string()))
}

pub fn vector(cs: &CoordSystem, comps: &[String], key: &str) -> Result<VectorField, Invalid> {
    if comps.len() != cs.dim() {
        return Err(Invalid::new(key, format!("{} components, expected {}", comps.len(), cs.dim())));
    }
    let c = comps.iter().enumerate().map(|(i, s)| expr(cs, s, &format!("{key}[{i}]"))).collect::<Result<Vec<_>, _>>()?;
    VectorField::new(*cs, c).map_err(|e| Invalid::new(key, e.to_string()))
}

pub fn point(cs: &CoordSystem, comps: &[String], key: &str) -> Result<Vec<BigRational>, Invalid> {
    if comps.len() != cs.dim() {
        return Err(Invalid::new(key, format!("{} coordinates, expected {}", comps.len(), cs.dim())));
    }
    comps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let k = format!("{key}[{i}]");
            expr(cs, s, &k)?.as_constant().ok_or_else(|| Invalid::new(k, "coordinate must be a rational constant"))
        })
        .collect()
}

impl Scenario {
    pub fn validate(&self) -> Result<Env, Invalid> {
        if self.m == 0 || self.m > MAX_M {
            return Err(Invalid::new("m", format!("must be in 1..={MAX_M}")));
        }
        let cs = CoordSystem::new(self.m).map_err(|e| Invalid::new("m", e.to_string()))?;
        let m = self.m;
        let field = match &self.field {
            None => None,
            Some(f) => {
                let g = matrix(&cs, &f.g, (m, m), "field.g")?;
                let b = match &f.b {
                    Some(b) => matrix(&cs, b, (m, m), "field.b")?,
                    None => Matrix::zeros(m, m),
                };
                let phi = match &f.phi {
                    Some(s) => expr(&cs, s, "field.phi")?,
                    None => ScalarExpr::zero(),
                };
                let (p, q) = match (f.p, f.q) {
                    (Some(p), Some(q)) => (p, q),
                    (Some(p), None) => (p, m.saturating_sub(p)),
                    (None, Some(q)) => (m.saturating_sub(q), q),
                    (None, None) => (m, 0),
                };
                let reference = f.reference_point.as_ref().map(|r| point(&cs, r, "field.reference_point")).transpose()?;
                Some(FieldSpec::new(cs, g, b, phi, p, q, reference).map_err(|e| Invalid::new("field", e.to_string()))?)
            }
        };
        let vectors = self
            .vectors
            .iter()
            .map(|(k, v)| Ok((k.clone(), vector(&cs, v, &format!("vectors.{k}"))?)))
            .collect::<Result<BTreeMap<_, _>, Invalid>>()?;
        let mut tensors = BTreeMap::new();
        for (k, t) in &self.tensors {
            let key = format!("tensors.{k}");
            let variance = parse_variance(&t.variance).map_err(|e| Invalid::new(format!("{key}.variance"), e.to_string()))?;
            let [a, b]: [Slot; 2] =
                variance.try_into().map_err(|_| Invalid::new(format!("{key}.variance"), "only rank-2 tensors are supported"))?;
            let mat = matrix(&cs, &t.components, (cs.dim(), cs.dim()), &format!("{key}.components"))?;
            tensors.insert(k.clone(), TensorField::from_matrix(cs, [a, b], &mat).map_err(|e| Invalid::new(key, e.to_string()))?);
        }
        let mut dirac = BTreeMap::new();
        for (k, d) in &self.dirac {
            let key = format!("dirac.{k}");
            let shape = if d.kind == DiracKind::Span { (cs.dim(), m) } else { (m, m) };
            let mat = matrix(&cs, &d.matrix, shape, &format!("{key}.matrix"))?;
            let built = match d.kind {
                DiracKind::TwoForm => graph_dirac(cs, GraphKind::TwoForm, &mat),
                DiracKind::Bivector => graph_dirac(cs, GraphKind::Bivector, &mat),
                DiracKind::Span => ParaDirac::from_matrix(cs, &mat),
            }
            .map_err(|e| Invalid::new(key, e.to_string()))?;
            dirac.insert(k.clone(), (d.kind, mat, built));
        }
        let env = Env { cs, field, vectors, tensors, dirac };
        self.check_references(&env)?;
        Ok(env)
    }

    fn check_references(&self, env: &Env) -> Result<(), Invalid> {
        let need_vec = |name: &str, key: String| -> Result<(), Invalid> {
            if env.vectors.contains_key(name) {
                Ok(())
            } else {
                Err(Invalid::new(key, format!("undeclared vector '{name}'")))
            }
        };
        let need_field = |key: String| -> Result<(), Invalid> {
            if env.field.is_some() {
                Ok(())
            } else {
                Err(Invalid::new(key, "task needs a [field] section"))
            }
        };
        if let Some(q) = &self.quadrature.lower {
            if q.len() != env.cs.dim() {
                return Err(Invalid::new("quadrature.lower", format!("{} bounds, expected {}", q.len(), env.cs.dim())));
            }
        }
        if let Some(q) = &self.quadrature.upper {
            if q.len() != env.cs.dim() {
                return Err(Invalid::new("quadrature.upper", format!("{} bounds, expected {}", q.len(), env.cs.dim())));
            }
        }
        for (i, t) in self.tasks.iter().enumerate() {
            let key = |f: &str| format!("tasks[{i}].{f}");
            match t {
                TaskDecl::CheckAxioms { vectors } => {
                    for v in vectors.iter().flatten() {
                        need_vec(v, key("vectors"))?;
                    }
                }
                TaskDecl::Bracket { x, y, .. } | TaskDecl::Star { x, y, .. } => {
                    need_vec(x, key("x"))?;
                    need_vec(y, key("y"))?;
                }
                TaskDecl::Lie { x, target, .. } => {
                    need_vec(x, key("x"))?;
                    if target == "H" {
                        need_field(key("target"))?;
                    } else if !env.vectors.contains_key(target) && !env.tensors.contains_key(target) {
                        return Err(Invalid::new(key("target"), format!("undeclared vector or tensor '{target}'")));
                    }
                }
                TaskDecl::Killing { x, .. } => {
                    need_vec(x, key("x"))?;
                    need_field(key("task"))?;
                }
                TaskDecl::Torsion { x, y, z, .. } | TaskDecl::Curvature { x, y, z, .. } => {
                    need_field(key("task"))?;
                    need_vec(x, key("x"))?;
                    need_vec(y, key("y"))?;
                    need_vec(z, key("z"))?;
                }
                TaskDecl::ScalarCurvature { point: p, .. } => {
                    need_field(key("task"))?;
                    point(&env.cs, p, &key("point"))?;
                }
                TaskDecl::Action { .. } => need_field(key("task"))?,
                TaskDecl::Dirac { structure, .. } => {
                    if !env.dirac.contains_key(structure) {
                        return Err(Invalid::new(key("structure"), format!("undeclared structure '{structure}'")));
                    }
                }
            }
            if let Some(e) = expectation(t) {
                Expect::parse(&env.cs, e, &key("expect"))?;
            }
        }
        Ok(())
    }
}

fn expectation(t: &TaskDecl) -> Option<&toml::Value> {
    match t {
        TaskDecl::Bracket { expect, .. }
        | TaskDecl::Star { expect, .. }
        | TaskDecl::Lie { expect, .. }
        | TaskDecl::Torsion { expect, .. }
        | TaskDecl::ScalarCurvature { expect, .. } => expect.as_ref(),
        _ => None,
    }
}

/// An expected task value: `"zero"`, a scalar expression, a component list
/// or a number.
#[derive(Debug, Clone, PartialEq)]
pub enum Expect {
    Zero,
    Scalar(ScalarExpr),
    Components(Vec<ScalarExpr>),
    Number(f64),
}

impl Expect {
    pub fn parse(cs: &CoordSystem, v: &toml::Value, key: &str) -> Result<Expect, Invalid> {
        match v {
            toml::Value::String(s) if s == "zero" => Ok(Expect::Zero),
            toml::Value::String(s) => Ok(Expect::Scalar(expr(cs, s, key)?)),
            toml::Value::Integer(i) => Ok(Expect::Number(*i as f64)),
            toml::Value::Float(f) => Ok(Expect::Number(*f)),
            toml::Value::Array(items) => items
                .iter()
                .enumerate()
                .map(|(i, it)| match it {
                    toml::Value::String(s) => expr(cs, s, &format!("{key}[{i}]")),
                    _ => Err(Invalid::new(format!("{key}[{i}]"), "expected a string expression")),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Expect::Components),
            _ => Err(Invalid::new(key, "expected \"zero\", an expression, a number or a list of expressions")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "m = 1\n[field]\ng = [[\"1\"]]\n";

    #[test]
    fn overrides_create_nested_tables() {
        let sc = load(BASE, &["field.phi=\"x1\"".into(), "quadrature.order=7".into()]).unwrap();
        assert_eq!(sc.field.unwrap().phi.as_deref(), Some("x1"));
        assert_eq!(sc.quadrature.order, 7);
    }

    #[test]
    fn bare_override_values_are_strings() {
        let sc = load(BASE, &["field.phi=xt1^2".into()]).unwrap();
        assert_eq!(sc.field.unwrap().phi.as_deref(), Some("xt1^2"));
    }

    #[test]
    fn malformed_override_is_reported() {
        assert_eq!(load(BASE, &["novalue".into()]).unwrap_err().key, "novalue");
        assert!(load(BASE, &["m.x=1".into()]).is_err());
    }

    #[test]
    fn signature_defaults_and_checks() {
        let sc = load(BASE, &[]).unwrap();
        assert_eq!(sc.validate().unwrap().field.unwrap().p(), 1);
        let bad = load(BASE, &["field.g=[[\"-1\"]]".into(), "field.reference_point=[\"0\", \"0\"]".into()]).unwrap();
        assert_eq!(bad.validate().err().unwrap().key, "field");
    }

    #[test]
    fn expectations_parse() {
        let cs = CoordSystem::new(1).unwrap();
        assert_eq!(Expect::parse(&cs, &toml::Value::String("zero".into()), "e").unwrap(), Expect::Zero);
        assert_eq!(Expect::parse(&cs, &toml::Value::Float(0.5), "e").unwrap(), Expect::Number(0.5));
        assert!(Expect::parse(&cs, &toml::Value::Boolean(true), "e").is_err());
    }
}
