//! A metric graph together with resolved vertex data for one quantization.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::conditions::{build_named, ensure_self_adjoint, from_unitary, ConditionSpec, NamedCondition, DEFAULT_TOL};
use crate::dirac;
use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::linalg::{ensure_unitary, identity, kron, CMatrix, CVector, I};
use crate::scattering::{
    assemble_with_channels, dft_matrix, phase_matrix_with_channels, standard_scattering, vertex_scattering_laplace,
    GraphOperator,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operator {
    /// Negative Laplacian with matrix-pair vertex conditions.
    Laplace,
    /// Four-component Dirac operator, mass in natural units.
    Dirac { mass: f64 },
    /// Wave propagation with fixed unitary vertex scattering matrices.
    Scattering,
}

impl Operator {
    pub fn name(&self) -> &'static str {
        match self {
            Operator::Laplace => "laplace",
            Operator::Dirac { .. } => "dirac",
            Operator::Scattering => "scattering",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VertexData {
    Laplace { a: CMatrix, b: CMatrix },
    Fixed { sigma: CMatrix },
    Dirac { a: CMatrix, b: CMatrix },
}

#[derive(Debug, Clone)]
pub struct QuantumGraph {
    graph: MetricGraph,
    operator: Operator,
    /// Amplitudes per bond: 2 for the full Dirac problem, otherwise 1.
    channels: usize,
    vertices: BTreeMap<String, VertexData>,
}

fn unitary_tol(d: usize) -> f64 {
    DEFAULT_TOL * (1.0 + d as f64)
}

fn semantic(v: &str, msg: impl Into<String>) -> Error {
    Error::at_vertex(v, Error::Semantic(msg.into()))
}

fn expect_dim(v: &str, what: &str, m: &CMatrix, d: usize) -> Result<()> {
    if m.shape() == (d, d) {
        Ok(())
    } else {
        Err(Error::at_vertex(
            v,
            Error::dims(what, format!("{d}x{d}"), format!("{}x{}", m.nrows(), m.ncols())),
        ))
    }
}

impl QuantumGraph {
    /// Resolves every vertex condition for `operator`, rejecting
    /// combinations the quantization cannot express.
    pub fn new(graph: MetricGraph, conditions: &BTreeMap<String, ConditionSpec>, operator: Operator) -> Result<Self> {
        if let Operator::Dirac { mass } = operator {
            if !(mass.is_finite() && mass >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "Dirac mass must be nonnegative, got {mass}"
                )));
            }
        }
        for v in conditions.keys() {
            graph
                .vertex_trace(v)
                .map_err(|_| semantic(v, "condition given for a vertex that is not in the graph"))?;
        }
        let channels = if matches!(operator, Operator::Dirac { .. }) {
            2
        } else {
            1
        };
        let mut vertices = BTreeMap::new();
        for trace in graph.traces() {
            let v = trace.vertex.as_str();
            let d = trace.degree();
            let spec = conditions
                .get(v)
                .ok_or_else(|| semantic(v, "missing vertex condition"))?;
            vertices.insert(v.to_string(), resolve_vertex(operator, v, spec, d)?);
        }
        Ok(QuantumGraph {
            graph,
            operator,
            channels,
            vertices,
        })
    }

    /// Direct wave-propagation model from given vertex scattering matrices.
    pub fn from_scattering_matrices(graph: MetricGraph, per_vertex: &BTreeMap<String, CMatrix>) -> Result<Self> {
        let conditions = per_vertex
            .iter()
            .map(|(v, s)| (v.clone(), ConditionSpec::CustomScattering { s: s.clone() }))
            .collect();
        Self::new(graph, &conditions, Operator::Scattering)
    }

    /// Dirac model from already-resolved `(A, B)` pairs.
    pub(crate) fn dirac_from_pairs(
        graph: MetricGraph,
        pairs: BTreeMap<String, (CMatrix, CMatrix)>,
        mass: f64,
        channels: usize,
    ) -> Result<Self> {
        let mut vertices = BTreeMap::new();
        for trace in graph.traces() {
            let v = &trace.vertex;
            let (a, b) = pairs.get(v).ok_or_else(|| semantic(v, "missing vertex condition"))?;
            expect_dim(v, "Dirac vertex condition", a, channels * trace.degree())?;
            ensure_self_adjoint(a, b, DEFAULT_TOL).map_err(|e| Error::at_vertex(v, e))?;
            vertices.insert(
                v.clone(),
                VertexData::Dirac {
                    a: a.clone(),
                    b: b.clone(),
                },
            );
        }
        Ok(QuantumGraph {
            graph,
            operator: Operator::Dirac { mass },
            channels,
            vertices,
        })
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn operator(&self) -> Operator {
        self.operator
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn vertex_data(&self, v: &str) -> Result<&VertexData> {
        self.vertices.get(v).ok_or_else(|| Error::UnknownVertex(v.to_string()))
    }

    /// Dimension of `U(k)`.
    pub fn dimension(&self) -> usize {
        self.graph.bond_count() * self.channels
    }

    /// Length of the bond behind each slot of `U(k)`.
    pub fn slot_lengths(&self) -> Vec<f64> {
        self.graph
            .bond_lengths()
            .into_iter()
            .flat_map(|l| std::iter::repeat_n(l, self.channels))
            .collect()
    }

    fn mass(&self) -> f64 {
        match self.operator {
            Operator::Dirac { mass } => mass,
            _ => 0.0,
        }
    }

    /// Whether every vertex scattering matrix is independent of `k`.
    pub fn is_k_independent(&self) -> bool {
        self.vertices.values().all(|d| match d {
            VertexData::Fixed { .. } => true,
            VertexData::Dirac { .. } => self.mass() == 0.0,
            VertexData::Laplace { a, b } => {
                let norm = crate::linalg::spectral_norm;
                norm(&(a * b.adjoint())) <= DEFAULT_TOL * (norm(a) * norm(b) + 1.0)
            }
        })
    }

    pub fn vertex_scattering(&self, v: &str, k: f64) -> Result<CMatrix> {
        let res = match self.vertex_data(v)? {
            VertexData::Laplace { a, b } => vertex_scattering_laplace(a, b, k),
            VertexData::Fixed { sigma } => Ok(sigma.clone()),
            VertexData::Dirac { a, b } => dirac::scattering_unchecked(a, b, k, self.mass()),
        };
        res.map_err(|e| Error::at_vertex(v, e))
    }

    /// `Σ(k)`, `D(k)` and `U(k) = D(k)Σ(k)`.
    pub fn operator_at(&self, k: f64) -> Result<GraphOperator> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidWavenumber(k));
        }
        let per_vertex = self
            .vertices
            .keys()
            .map(|v| Ok((v.clone(), self.vertex_scattering(v, k)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let sigma = assemble_with_channels(&self.graph, &per_vertex, self.channels)?;
        let d = phase_matrix_with_channels(&self.graph, k, self.channels);
        Ok(GraphOperator::new(k, sigma, d))
    }

    /// Largest vertex-condition violation of the wavefunction encoded by
    /// `c`, a fixed vector of `U(k)`, relative to `‖c‖`.
    ///
    /// Entry `c_b` is the amplitude of bond `b` at its terminus; the amplitude
    /// at its origin is `e^{−ikL_b} c_b`.
    pub fn vertex_residual(&self, k: f64, c: &CVector) -> Result<f64> {
        let n = self.dimension();
        if c.len() != n {
            return Err(Error::dims("amplitude vector", n, c.len()));
        }
        let norm = c.norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero amplitude vector".into()));
        }
        let lengths = self.slot_lengths();
        let at_origin: Vec<Complex64> = (0..n)
            .map(|s| c[s] * Complex64::from_polar(1.0, -k * lengths[s]))
            .collect();

        let mut worst = 0.0f64;
        for trace in self.graph.traces() {
            let v = trace.vertex.as_str();
            let r = match &self.vertices[v] {
                VertexData::Laplace { a, b } => {
                    let (f, fp) = self.laplace_traces(trace, k, c, &at_origin);
                    (a * f + b * fp).norm()
                }
                VertexData::Fixed { sigma } => {
                    let d = trace.degree();
                    let outgoing = CVector::from_fn(d, |i, _| at_origin[trace.incident_bonds[i].slot()]);
                    let incoming = CVector::from_fn(d, |j, _| c[self.graph.reversal(trace.incident_bonds[j]).slot()]);
                    (outgoing - sigma * incoming).norm()
                }
                VertexData::Dirac { a, b } => {
                    let amps = self.spinor_amplitudes(k, c);
                    let (fp, fm) = dirac::dirac_trace_vectors(&self.graph, v, &amps, k, self.mass())?;
                    let (fp, fm) = if self.channels == 1 {
                        (alpha_channel(&fp), alpha_channel(&fm))
                    } else {
                        (fp, fm)
                    };
                    (a * fp + b * fm).norm()
                }
            };
            worst = worst.max(r);
        }
        Ok(worst / norm)
    }

    /// `F(v)` and `F′(v)` for `f_e(x) = a_e e^{ikx} + a_ē e^{−ikx}`.
    fn laplace_traces(
        &self,
        trace: &crate::graph::VertexTrace,
        k: f64,
        at_terminus: &CVector,
        at_origin: &[Complex64],
    ) -> (CVector, CVector) {
        let e_count = self.graph.edge_count();
        let d = trace.degree();
        let mut f = CVector::zeros(d);
        let mut fp = CVector::zeros(d);
        for (i, bond) in trace.incident_bonds.iter().enumerate() {
            let edge = bond.edge_id - 1;
            let len = self.graph.edges()[edge].length;
            // coefficient of e^{ikx} is the forward bond's amplitude at x = 0,
            // coefficient of e^{−ikx} is the reversed bond's amplitude at its terminus x = 0
            let a_fwd = at_origin[edge];
            let a_bwd = at_terminus[edge + e_count];
            if bond.reversed {
                let plus = a_fwd * Complex64::from_polar(1.0, k * len);
                let minus = a_bwd * Complex64::from_polar(1.0, -k * len);
                f[i] = plus + minus;
                fp[i] = -(I * k) * (plus - minus);
            } else {
                f[i] = a_fwd + a_bwd;
                fp[i] = I * k * (a_fwd - a_bwd);
            }
        }
        (f, fp)
    }

    /// Plane-wave spinor amplitudes per edge: the coefficient of `e^{ikx}` is
    /// the forward bond's amplitude at `x = 0`, that of `e^{−ikx}` is the
    /// reversed bond's amplitude at its terminus `x = 0`.
    fn spinor_amplitudes(&self, k: f64, c: &CVector) -> Vec<dirac::EdgeSpinorAmplitudes> {
        let e_count = self.graph.edge_count();
        let ch = self.channels;
        let lengths = self.slot_lengths();
        let pick = |bond_slot: usize, channel: usize, at_origin: bool| {
            if channel >= ch {
                return Complex64::new(0.0, 0.0);
            }
            let s = bond_slot * ch + channel;
            if at_origin {
                c[s] * Complex64::from_polar(1.0, -k * lengths[s])
            } else {
                c[s]
            }
        };
        (0..e_count)
            .map(|e| dirac::EdgeSpinorAmplitudes {
                forward: [pick(e, 0, true), pick(e, 1, true)],
                backward: [pick(e + e_count, 0, false), pick(e + e_count, 1, false)],
            })
            .collect()
    }
}

fn alpha_channel(v: &CVector) -> CVector {
    CVector::from_fn(v.len() / 2, |i, _| v[2 * i])
}

/// Vertex data for one condition at a vertex `v` of degree `d`.
pub fn resolve_vertex(operator: Operator, v: &str, spec: &ConditionSpec, d: usize) -> Result<VertexData> {
    match operator {
        Operator::Laplace => resolve_laplace(v, spec, d),
        Operator::Scattering => resolve_scattering(v, spec, d),
        Operator::Dirac { .. } => resolve_dirac(v, spec, d),
    }
}

fn resolve_laplace(v: &str, spec: &ConditionSpec, d: usize) -> Result<VertexData> {
    let wrap = |e| Error::at_vertex(v, e);
    let (a, b) = match spec {
        ConditionSpec::MatrixPair { a, b } => {
            expect_dim(v, "matrix A", a, d)?;
            expect_dim(v, "matrix B", b, d)?;
            (a.clone(), b.clone())
        }
        ConditionSpec::Unitary { u } => {
            expect_dim(v, "unitary U", u, d)?;
            from_unitary(u).map_err(wrap)?
        }
        ConditionSpec::Standard => build_named(NamedCondition::Standard, d).map_err(wrap)?,
        ConditionSpec::Dirichlet => build_named(NamedCondition::Dirichlet, d).map_err(wrap)?,
        ConditionSpec::Neumann => build_named(NamedCondition::Neumann, d).map_err(wrap)?,
        ConditionSpec::Delta { alpha } => build_named(NamedCondition::Delta(*alpha), d).map_err(wrap)?,
        ConditionSpec::Dft | ConditionSpec::CustomScattering { .. } => {
            return Err(semantic(
                v,
                format!(
                    "'{}' prescribes a scattering matrix directly and is not a Laplace vertex condition; use the scattering or dirac operator",
                    spec.kind_name()
                ),
            ))
        }
    };
    ensure_self_adjoint(&a, &b, DEFAULT_TOL).map_err(wrap)?;
    Ok(VertexData::Laplace { a, b })
}

/// k-independent `d×d` scattering matrix for the direct quantization.
fn fixed_scattering(v: &str, spec: &ConditionSpec, d: usize, operator: &str) -> Result<CMatrix> {
    let sigma = match spec {
        ConditionSpec::Standard => standard_scattering(d),
        ConditionSpec::Dirichlet => -identity(d),
        ConditionSpec::Neumann => identity(d),
        ConditionSpec::Dft => dft_matrix(d),
        ConditionSpec::Unitary { u: s } | ConditionSpec::CustomScattering { s } => {
            expect_dim(v, "scattering matrix", s, d)?;
            s.clone()
        }
        ConditionSpec::Delta { .. } => {
            return Err(semantic(
                v,
                format!("delta conditions scatter with a k-dependent matrix; not allowed for the {operator} operator"),
            ))
        }
        ConditionSpec::MatrixPair { .. } => {
            return Err(semantic(
                v,
                format!("general (A, B) pairs give k-dependent scattering; not allowed for the {operator} operator"),
            ))
        }
    };
    ensure_unitary(&sigma, unitary_tol(d)).map_err(|e| Error::at_vertex(v, e))?;
    Ok(sigma)
}

fn resolve_scattering(v: &str, spec: &ConditionSpec, d: usize) -> Result<VertexData> {
    Ok(VertexData::Fixed {
        sigma: fixed_scattering(v, spec, d, "scattering")?,
    })
}

fn resolve_dirac(v: &str, spec: &ConditionSpec, d: usize) -> Result<VertexData> {
    let wrap = |e| Error::at_vertex(v, e);
    let (a, b) = match spec {
        ConditionSpec::MatrixPair { a, b } => {
            expect_dim(v, "Dirac matrix A", a, 2 * d)?;
            expect_dim(v, "Dirac matrix B", b, 2 * d)?;
            (a.clone(), b.clone())
        }
        ConditionSpec::Unitary { u } => {
            expect_dim(v, "Dirac unitary U", u, 2 * d)?;
            let c = dirac::dirac_conditions_from_unitary(u).map_err(wrap)?;
            (c.a, c.b)
        }
        ConditionSpec::Delta { .. } => {
            return Err(semantic(
                v,
                "delta conditions are defined for the Laplace operator only",
            ));
        }
        other => {
            let uhat = fixed_scattering(v, other, d, "dirac")?;
            let c = dirac::dirac_conditions_from_unitary(&kron(&uhat, &identity(2))).map_err(wrap)?;
            (c.a, c.b)
        }
    };
    ensure_self_adjoint(&a, &b, DEFAULT_TOL).map_err(wrap)?;
    Ok(VertexData::Dirac { a, b })
}
