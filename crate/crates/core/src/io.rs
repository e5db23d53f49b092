//! `.qg` problem documents and spectrum reports.
//!
//! A document is a JSON object with keys `edges`, `conditions` and `model`
//! (plus an optional `vertices` list). Complex numbers are `[re, im]` pairs,
//! matrices row-major nested arrays:
//!
//! ```json
//! {
//!   "edges": [{"id": 1, "from": "a", "to": "b", "length": 3.141592653589793}],
//!   "conditions": {"a": {"kind": "dirichlet"}, "b": {"kind": "dirichlet"}},
//!   "model": {"operator": "laplace", "k_min": 0.5, "k_max": 5.5}
//! }
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::conditions::{check_self_adjoint, classify_k_independence, ConditionSpec, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::graph::{Edge, MetricGraph};
use crate::linalg::{unitarity_defect, CMatrix};
use crate::model::{resolve_vertex, Operator, QuantumGraph, VertexData};
use crate::secular::{SolverOptions, SolverStats, Spectrum};

/// A matrix entry: a bare real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(self) -> Complex64 {
        match self {
            Scalar::Real(re) => Complex64::new(re, 0.0),
            Scalar::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

pub type MatrixDoc = Vec<Vec<Scalar>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConditionDoc {
    Standard {},
    Dirichlet {},
    Neumann {},
    Delta { alpha: f64 },
    Dft {},
    MatrixPair { a: MatrixDoc, b: MatrixDoc },
    Unitary { u: MatrixDoc },
    CustomScattering { s: MatrixDoc },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Laplace,
    Dirac,
    Scattering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub operator: OperatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_root: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<String>>,
    pub edges: Vec<Edge>,
    pub conditions: BTreeMap<String, ConditionDoc>,
    pub model: ModelDoc,
}

fn to_matrix(v: &str, name: &str, rows: &MatrixDoc) -> Result<CMatrix> {
    let n = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::at_vertex(
            v,
            Error::dims(format!("row {i} of matrix {name}"), format!("{n} entries"), r.len()),
        ));
    }
    if n == 0 {
        return Err(Error::at_vertex(
            v,
            Error::dims(format!("matrix {name}"), "at least one row", 0),
        ));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j].value()))
}

fn from_matrix(m: &CMatrix) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| Scalar::Complex([m[(i, j)].re, m[(i, j)].im]))
                .collect()
        })
        .collect()
}

impl ConditionDoc {
    pub fn to_spec(&self, v: &str) -> Result<ConditionSpec> {
        Ok(match self {
            ConditionDoc::Standard {} => ConditionSpec::Standard,
            ConditionDoc::Dirichlet {} => ConditionSpec::Dirichlet,
            ConditionDoc::Neumann {} => ConditionSpec::Neumann,
            ConditionDoc::Delta { alpha } => ConditionSpec::Delta { alpha: *alpha },
            ConditionDoc::Dft {} => ConditionSpec::Dft,
            ConditionDoc::MatrixPair { a, b } => ConditionSpec::MatrixPair {
                a: to_matrix(v, "a", a)?,
                b: to_matrix(v, "b", b)?,
            },
            ConditionDoc::Unitary { u } => ConditionSpec::Unitary {
                u: to_matrix(v, "u", u)?,
            },
            ConditionDoc::CustomScattering { s } => ConditionSpec::CustomScattering {
                s: to_matrix(v, "s", s)?,
            },
        })
    }

    pub fn from_spec(spec: &ConditionSpec) -> Self {
        match spec {
            ConditionSpec::Standard => ConditionDoc::Standard {},
            ConditionSpec::Dirichlet => ConditionDoc::Dirichlet {},
            ConditionSpec::Neumann => ConditionDoc::Neumann {},
            ConditionSpec::Delta { alpha } => ConditionDoc::Delta { alpha: *alpha },
            ConditionSpec::Dft => ConditionDoc::Dft {},
            ConditionSpec::MatrixPair { a, b } => ConditionDoc::MatrixPair {
                a: from_matrix(a),
                b: from_matrix(b),
            },
            ConditionSpec::Unitary { u } => ConditionDoc::Unitary { u: from_matrix(u) },
            ConditionSpec::CustomScattering { s } => ConditionDoc::CustomScattering { s: from_matrix(s) },
        }
    }
}

/// Parses and validates a document: syntax, graph structure, and every
/// vertex condition against the chosen operator.
pub fn parse_document(text: &str) -> Result<ProblemDocument> {
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: ProblemDocument = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Syntax {
            path: format!("{path} (line {}, column {})", inner.line(), inner.column()),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| Error::Syntax {
        path: format!(". (line {}, column {})", e.line(), e.column()),
        message: e.to_string(),
    })?;
    doc.validate()?;
    Ok(doc)
}

/// Pretty-printed JSON; parses back to an identical document.
pub fn emit_document(doc: &ProblemDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

impl ProblemDocument {
    pub fn validate(&self) -> Result<()> {
        let graph = self.graph()?;
        for v in graph.vertices() {
            if !self.conditions.contains_key(v) {
                return Err(Error::at_vertex(v, Error::Semantic("missing vertex condition".into())));
            }
        }
        if let (Some(lo), Some(hi)) = (self.model.k_min, self.model.k_max) {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "model: need 0 < k_min < k_max, got [{lo}, {hi}]"
                )));
            }
        }
        for (name, x) in [("q", self.model.q), ("tol_root", self.model.tol_root)] {
            if let Some(x) = x {
                if !(x.is_finite() && x > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "model.{name} must be positive, got {x}"
                    )));
                }
            }
        }
        QuantumGraph::new(graph, &self.condition_specs()?, self.operator()?)?;
        Ok(())
    }

    pub fn graph(&self) -> Result<MetricGraph> {
        MetricGraph::build(self.vertices.as_deref().unwrap_or(&[]), self.edges.clone())
    }

    pub fn condition_specs(&self) -> Result<BTreeMap<String, ConditionSpec>> {
        self.conditions
            .iter()
            .map(|(v, c)| Ok((v.clone(), c.to_spec(v)?)))
            .collect()
    }

    pub fn operator(&self) -> Result<Operator> {
        match (self.model.operator, self.model.mass) {
            (OperatorKind::Laplace, None) => Ok(Operator::Laplace),
            (OperatorKind::Scattering, None) => Ok(Operator::Scattering),
            (OperatorKind::Dirac, mass) => {
                let mass = mass.unwrap_or(0.0);
                if !(mass.is_finite() && mass >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "model.mass must be nonnegative, got {mass}"
                    )));
                }
                Ok(Operator::Dirac { mass })
            }
            (_, Some(_)) => Err(Error::InvalidParameter(
                "model.mass applies to the dirac operator only".into(),
            )),
        }
    }

    pub fn build(&self) -> Result<QuantumGraph> {
        QuantumGraph::new(self.graph()?, &self.condition_specs()?, self.operator()?)
    }

    /// Solver options from the model section; `verify` defaults to on.
    pub fn solver_options(&self) -> SolverOptions {
        let mut opts = SolverOptions {
            verify: self.model.verify.unwrap_or(true),
            ..Default::default()
        };
        if let Some(q) = self.model.q {
            opts.q = q;
        }
        if let Some(t) = self.model.tol_root {
            opts.tol_root = t;
        }
        opts
    }

    pub fn k_range(&self) -> Option<(f64, f64)> {
        Some((self.model.k_min?, self.model.k_max?))
    }

    /// The same problem on the simplified graph. Vertices inserted by the
    /// subdivision get standard conditions; trace order at the original
    /// vertices is unchanged, so their conditions carry over as given.
    pub fn simplified(&self) -> Result<ProblemDocument> {
        let simple = self.graph()?.simplify();
        let mut conditions = self.conditions.clone();
        for v in simple.inserted_vertices() {
            conditions.insert(v.clone(), ConditionDoc::Standard {});
        }
        Ok(ProblemDocument {
            vertices: self.vertices.as_ref().map(|_| simple.vertices().to_vec()),
            edges: simple.edges().to_vec(),
            conditions,
            model: self.model.clone(),
        })
    }
}

/// Per-vertex admissibility and k-independence classification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub vertex: String,
    pub degree: usize,
    pub kind: String,
    pub admissible: bool,
    pub k_independent: Option<bool>,
    /// `A B† = 0`
    pub abh_zero: Option<bool>,
    /// `σ(1)² = I`
    pub involutive: Option<bool>,
    /// `σ(1/2) = σ(2)`
    pub probes_agree: Option<bool>,
    pub defect: f64,
    pub note: String,
}

/// One row per vertex. Inadmissible vertices are reported rather than
/// raised; other errors (dimensions, unsupported kinds) are returned.
pub fn check_document(doc: &ProblemDocument) -> Result<Vec<CheckRow>> {
    let graph = doc.graph()?;
    let specs = doc.condition_specs()?;
    let operator = doc.operator()?;
    let mut rows = Vec::new();
    for trace in graph.traces() {
        let v = trace.vertex.as_str();
        let d = trace.degree();
        let spec = specs
            .get(v)
            .ok_or_else(|| Error::at_vertex(v, Error::Semantic("missing vertex condition".into())))?;
        let mut row = CheckRow {
            vertex: v.to_string(),
            degree: d,
            kind: spec.kind_name().to_string(),
            admissible: true,
            k_independent: None,
            abh_zero: None,
            involutive: None,
            probes_agree: None,
            defect: 0.0,
            note: String::new(),
        };
        let data = match resolve_vertex(operator, v, spec, d) {
            Ok(data) => data,
            Err(e) if e.code() == crate::ErrorCode::Inadmissible => {
                row.admissible = false;
                row.note = match e {
                    Error::Vertex { source, .. } => source.to_string(),
                    other => other.to_string(),
                };
                rows.push(row);
                continue;
            }
            Err(e) => return Err(e),
        };
        match data {
            VertexData::Laplace { a, b } => {
                let r = classify_k_independence(&a, &b, DEFAULT_TOL).map_err(|e| Error::at_vertex(v, e))?;
                let all = [r.k_independent, r.involutive, r.probes_agree];
                row.abh_zero = r.k_independent;
                row.involutive = r.involutive;
                row.probes_agree = r.probes_agree;
                row.k_independent = r.k_independent;
                row.defect = r.max_defect;
                if all.iter().any(|x| *x != all[0]) {
                    row.note = "k-independence tests disagree".into();
                }
            }
            VertexData::Fixed { sigma } => {
                row.k_independent = Some(true);
                row.defect = unitarity_defect(&sigma);
            }
            VertexData::Dirac { a, b } => {
                let r = check_self_adjoint(&a, &b, DEFAULT_TOL).map_err(|e| Error::at_vertex(v, e))?;
                row.k_independent = Some(matches!(operator, Operator::Dirac { mass } if mass == 0.0));
                row.defect = r.max_defect;
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn check_table(rows: &[CheckRow]) -> String {
    let flag = |x: Option<bool>| match x {
        Some(true) => "yes",
        Some(false) => "no",
        None => "-",
    };
    let mut out =
        String::from("vertex,degree,kind,admissible,k_independent,abh_zero,involutive,probes_agree,defect,note\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.3e},{}",
            r.vertex,
            r.degree,
            r.kind,
            if r.admissible { "yes" } else { "no" },
            flag(r.k_independent),
            flag(r.abh_zero),
            flag(r.involutive),
            flag(r.probes_agree),
            r.defect,
            csv_field(&r.note),
        );
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn input_digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub input_sha256: String,
    pub operator: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    pub k_range: (f64, f64),
    pub q: f64,
    pub tol_root: f64,
    pub verify: bool,
    pub stats: SolverStats,
    pub unresolved_roots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub k: f64,
    pub multiplicity: usize,
    pub residual: Option<f64>,
    pub unresolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumReport {
    pub fn new(input: &str, operator: Operator, opts: &SolverOptions, spectrum: &Spectrum) -> Self {
        let rows = spectrum
            .roots
            .iter()
            .enumerate()
            .map(|(i, r)| SpectrumRow {
                index: i + 1,
                k: r.k,
                multiplicity: r.multiplicity,
                residual: r.verification,
                unresolved: r.unresolved,
            })
            .collect();
        SpectrumReport {
            metadata: ReportMetadata {
                input_sha256: input_digest(input),
                operator: operator.name().to_string(),
                mass: match operator {
                    Operator::Dirac { mass } => Some(mass),
                    _ => None,
                },
                k_range: spectrum.k_range,
                q: opts.q,
                tol_root: opts.tol_root,
                verify: opts.verify,
                stats: spectrum.stats,
                unresolved_roots: spectrum.roots.iter().filter(|r| r.unresolved).count(),
            },
            rows,
        }
    }

    /// `index,k,multiplicity,residual` with `k` to 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,k,multiplicity,residual\n");
        for r in &self.rows {
            let residual = r.residual.map(|x| format!("{x:.6e}")).unwrap_or_default();
            let _ = writeln!(out, "{},{:.16e},{},{}", r.index, r.k, r.multiplicity, residual);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const INTERVAL: &str = r#"{
        "edges": [{"id": 1, "from": "a", "to": "b", "length": 3.141592653589793}],
        "conditions": {"a": {"kind": "dirichlet"}, "b": {"kind": "dirichlet"}},
        "model": {"operator": "laplace", "k_min": 0.5, "k_max": 5.5}
    }"#;

    #[test]
    fn minimal_interval_is_valid() {
        let doc = parse_document(INTERVAL).unwrap();
        assert_eq!(doc.edges.len(), 1);
        assert_eq!(doc.k_range(), Some((0.5, 5.5)));
        assert_eq!(doc.operator().unwrap(), Operator::Laplace);
        assert!(doc.solver_options().verify);
    }

    #[test]
    fn wrong_unitary_dimension_names_vertex() {
        let text = r#"{
            "edges": [{"id": 1, "from": "a", "to": "b", "length": 1}, {"id": 2, "from": "b", "to": "c", "length": 1}],
            "conditions": {
                "a": {"kind": "dirichlet"}, "c": {"kind": "dirichlet"},
                "b": {"kind": "unitary", "u": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}
            },
            "model": {"operator": "laplace"}
        }"#;
        let err = parse_document(text).unwrap_err();
        assert!(
            matches!(&err, Error::Vertex { vertex, source } if vertex == "b" && matches!(**source, Error::DimensionMismatch { .. }))
        );
        assert_eq!(err.code(), crate::ErrorCode::Input);
    }

    #[test]
    fn scattering_model_rejects_delta() {
        let text = r#"{
            "edges": [{"id": 1, "from": "a", "to": "b", "length": 1}],
            "conditions": {"a": {"kind": "delta", "alpha": 2}, "b": {"kind": "standard"}},
            "model": {"operator": "scattering"}
        }"#;
        let err = parse_document(text).unwrap_err();
        assert!(err.to_string().contains("k-dependent"), "{err}");
        assert!(err.to_string().contains("'a'"));
    }

    #[test]
    fn syntax_errors_carry_a_path() {
        let text = r#"{"edges": [{"id": 1, "from": "a", "to": "b", "length": "long"}], "conditions": {}, "model": {"operator": "laplace"}}"#;
        match parse_document(text).unwrap_err() {
            Error::Syntax { path, .. } => assert!(path.starts_with("edges[0].length"), "{path}"),
            e => panic!("{e}"),
        }
        let err = parse_document("{\"edges\": [").unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }));
        let err = parse_document(r#"{"edges": [], "conditions": {}, "model": {"operator": "wave"}}"#).unwrap_err();
        assert!(matches!(err, Error::Syntax { ref path, .. } if path.starts_with("model.operator")));
    }

    #[test]
    fn missing_condition_rejected() {
        let text = r#"{
            "edges": [{"id": 1, "from": "a", "to": "b", "length": 1}],
            "conditions": {"a": {"kind": "standard"}},
            "model": {"operator": "laplace"}
        }"#;
        let err = parse_document(text).unwrap_err();
        assert!(matches!(err, Error::Vertex { ref vertex, .. } if vertex == "b"));
    }

    #[test]
    fn non_unitary_custom_scattering_rejected() {
        let text = r#"{
            "edges": [{"id": 1, "from": "a", "to": "b", "length": 1}],
            "conditions": {"a": {"kind": "custom_scattering", "s": [[[0.5, 0]]]}, "b": {"kind": "neumann"}},
            "model": {"operator": "scattering"}
        }"#;
        let err = parse_document(text).unwrap_err();
        assert!(
            matches!(&err, Error::Vertex { vertex, source } if vertex == "a" && matches!(**source, Error::NotUnitary { .. }))
        );
    }

    #[test]
    fn inadmissible_pair_has_code_two() {
        let text = r#"{
            "edges": [{"id": 1, "from": "a", "to": "b", "length": 1}],
            "conditions": {"a": {"kind": "matrix_pair", "a": [[1]], "b": [[[0, 1]]]}, "b": {"kind": "neumann"}},
            "model": {"operator": "laplace"}
        }"#;
        let err = parse_document(text).unwrap_err();
        assert_eq!(err.code(), crate::ErrorCode::Inadmissible);
        let mut de = serde_json::Deserializer::from_str(text);
        let doc = ProblemDocument::deserialize(&mut de).unwrap();
        let rows = check_document(&doc).unwrap();
        assert!(!rows[0].admissible);
        assert!(rows[1].admissible);
    }

    #[test]
    fn check_rows_classify_delta() {
        let text = r#"{
            "edges": [{"id": 1, "from": "a", "to": "b", "length": 1}, {"id": 2, "from": "a", "to": "c", "length": 1}],
            "conditions": {"a": {"kind": "delta", "alpha": 1}, "b": {"kind": "standard"}, "c": {"kind": "dirichlet"}},
            "model": {"operator": "laplace"}
        }"#;
        let rows = check_document(&parse_document(text).unwrap()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].k_independent, Some(false));
        assert_eq!(rows[0].involutive, Some(false));
        assert_eq!(rows[1].k_independent, Some(true));
        assert_eq!(rows[2].probes_agree, Some(true));
        let table = check_table(&rows);
        assert!(table.starts_with("vertex,degree,kind,"));
        assert_eq!(table.lines().count(), 4);
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"edges": [{"id": 1, "from": "a", "to": "b", "length": 1}],
            "conditions": {"a": {"kind": "dirichlet", "alpha": 3}, "b": {"kind": "dirichlet"}},
            "model": {"operator": "laplace"}}"#;
        assert!(matches!(parse_document(text).unwrap_err(), Error::Syntax { .. }));
    }

    #[test]
    fn simplified_document_adds_standard_vertices() {
        let text = r#"{
            "edges": [{"id": 1, "from": "a", "to": "a", "length": 2}, {"id": 2, "from": "a", "to": "b", "length": 1}],
            "conditions": {"a": {"kind": "standard"}, "b": {"kind": "dirichlet"}},
            "model": {"operator": "laplace"}
        }"#;
        let doc = parse_document(text).unwrap();
        let s = doc.simplified().unwrap();
        assert!(s.graph().unwrap().is_simple());
        assert_eq!(s.conditions.len(), 4);
        s.validate().unwrap();
        let total: f64 = s.edges.iter().map(|e| e.length).sum();
        assert_eq!(total, 3.0);
    }

    #[test]
    fn csv_format() {
        let doc = parse_document(INTERVAL).unwrap();
        let model = doc.build().unwrap();
        let opts = doc.solver_options();
        let sp = crate::secular::find_spectrum(&model, 0.5, 5.5, &opts).unwrap();
        let report = SpectrumReport::new(INTERVAL, model.operator(), &opts, &sp);
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "index,k,multiplicity,residual");
        assert_eq!(lines.len(), 6);
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(fields[0], "1");
        // 17 significant digits
        assert_eq!(fields[1].split('e').next().unwrap().replace('.', "").len(), 17);
        assert!((fields[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(fields[2], "1");
        assert!(fields[3].parse::<f64>().unwrap() <= 1e-8);
        assert_eq!(report.metadata.input_sha256.len(), 64);
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["rows"].as_array().unwrap().len(), 5);
    }

    fn scalar() -> impl Strategy<Value = Scalar> {
        prop_oneof![
            (-1e3..1e3f64).prop_map(Scalar::Real),
            ((-1e3..1e3f64), (-1e3..1e3f64)).prop_map(|(a, b)| Scalar::Complex([a, b])),
        ]
    }

    fn matrix(n: usize) -> impl Strategy<Value = MatrixDoc> {
        prop::collection::vec(prop::collection::vec(scalar(), n), n)
    }

    fn condition() -> impl Strategy<Value = ConditionDoc> {
        prop_oneof![
            Just(ConditionDoc::Standard {}),
            Just(ConditionDoc::Dirichlet {}),
            Just(ConditionDoc::Neumann {}),
            Just(ConditionDoc::Dft {}),
            (-50.0..50.0f64).prop_map(|alpha| ConditionDoc::Delta { alpha }),
            (1usize..4)
                .prop_flat_map(|n| (matrix(n), matrix(n)))
                .prop_map(|(a, b)| ConditionDoc::MatrixPair { a, b }),
            (1usize..4)
                .prop_flat_map(matrix)
                .prop_map(|u| ConditionDoc::Unitary { u }),
            (1usize..4)
                .prop_flat_map(matrix)
                .prop_map(|s| ConditionDoc::CustomScattering { s }),
        ]
    }

    fn document() -> impl Strategy<Value = ProblemDocument> {
        let edge = ("[a-z]{1,3}", "[a-z]{1,3}", 1e-3..1e3f64);
        (
            prop::collection::vec(edge, 1..6),
            prop::collection::btree_map("[a-z]{1,3}", condition(), 0..5),
            prop_oneof![
                Just(OperatorKind::Laplace),
                Just(OperatorKind::Dirac),
                Just(OperatorKind::Scattering)
            ],
            prop::option::of(0.0..10.0f64),
            prop::option::of((0.01..1.0f64, 1.0..100.0f64)),
            prop::option::of(any::<bool>()),
        )
            .prop_map(|(edges, conditions, operator, mass, range, verify)| ProblemDocument {
                vertices: None,
                edges: edges
                    .into_iter()
                    .enumerate()
                    .map(|(i, (from, to, length))| Edge::new(i + 1, from, to, length))
                    .collect(),
                conditions,
                model: ModelDoc {
                    operator,
                    mass,
                    k_min: range.map(|r| r.0),
                    k_max: range.map(|r| r.1),
                    q: None,
                    tol_root: Some(1e-11),
                    verify,
                },
            })
    }

    proptest! {
        #[test]
        fn emit_then_parse_is_identity(doc in document()) {
            let text = emit_document(&doc);
            let mut de = serde_json::Deserializer::from_str(&text);
            let back = ProblemDocument::deserialize(&mut de).unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(emit_document(&back), text);
        }
    }

    #[test]
    fn emit_then_parse_validated_document() {
        let doc = parse_document(INTERVAL).unwrap();
        assert_eq!(parse_document(&emit_document(&doc)).unwrap(), doc);
    }
}
