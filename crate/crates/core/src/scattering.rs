//! Vertex scattering matrices and their assembly into bond operators.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::linalg::{c, ensure_square, ensure_unitary, identity, kron, solve, CMatrix, I};

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidWavenumber(k))
    }
}

/// `σ(k) = −(A + ikB)⁻¹(A − ikB)`.
pub fn vertex_scattering_laplace(a: &CMatrix, b: &CMatrix, k: f64) -> Result<CMatrix> {
    check_k(k)?;
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::dims(
            "vertex condition pair (A, B)",
            "equal square matrices",
            "mismatch",
        ));
    }
    let ik = I * k;
    let lhs = a + b * ik;
    let rhs = -(a - b * ik);
    solve(&lhs, &rhs)
}

/// Scattering matrix of the condition `i(U − I)F + (U + I)F′ = 0`:
/// `σ(k) = ((k − 1)I + (k + 1)U)⁻¹((k + 1)I + (k − 1)U)`.
pub fn vertex_scattering_from_unitary(u: &CMatrix, k: f64) -> Result<CMatrix> {
    check_k(k)?;
    let d = ensure_square(u, "unitary parameter U")?;
    ensure_unitary(u, 1e-10 * (1.0 + d as f64))?;
    let id = identity(d);
    let lhs = &id * c(k - 1.0, 0.0) + u * c(k + 1.0, 0.0);
    let rhs = &id * c(k + 1.0, 0.0) + u * c(k - 1.0, 0.0);
    solve(&lhs, &rhs)
}

/// `(2/d) J − I`, the scattering matrix of standard conditions.
pub fn standard_scattering(d: usize) -> CMatrix {
    let w = 2.0 / d as f64;
    CMatrix::from_fn(d, d, |i, j| c(if i == j { w - 1.0 } else { w }, 0.0))
}

/// `(2/(d − iα/k)) J − I`, the scattering matrix of a delta condition.
pub fn delta_scattering(d: usize, alpha: f64, k: f64) -> Result<CMatrix> {
    check_k(k)?;
    let w = c(2.0, 0.0) / c(d as f64, -alpha / k);
    Ok(CMatrix::from_fn(d, d, |i, j| if i == j { w - 1.0 } else { w }))
}

/// Discrete Fourier transform matrix, entry `(i, j) = ω^{ij}/√d` with `ω = e^{2πi/d}`.
pub fn dft_matrix(d: usize) -> CMatrix {
    let norm = (d as f64).sqrt();
    CMatrix::from_fn(d, d, |i, j| {
        // reduce the exponent first to keep the phase exact for large i·j
        let p = (i * j) % d;
        Complex64::from_polar(1.0 / norm, 2.0 * PI * p as f64 / d as f64)
    })
}

/// True for a unitary matrix with zero back-scattering and uniform
/// transmission probability `1/(d − 1)`.
pub fn check_equi_transmitting(s: &CMatrix, tol: f64) -> Result<bool> {
    let d = ensure_square(s, "equi-transmitting test")?;
    if d < 2 {
        return Err(Error::InvalidParameter(
            "equi-transmitting test needs degree >= 2".into(),
        ));
    }
    if ensure_unitary(s, tol.max(1e-12) * d as f64).is_err() {
        return Ok(false);
    }
    let target = 1.0 / (d as f64 - 1.0);
    for i in 0..d {
        for j in 0..d {
            let ok = if i == j {
                s[(i, j)].norm() <= tol
            } else {
                (s[(i, j)].norm_sqr() - target).abs() <= tol
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Assembles `Σ_{e,e′} = δ_{t(e′),o(e)} σ^{(o(e))}_{e,e′}` on the `2E` bonds.
///
/// Row `i` of the vertex matrix at `v` is the `i`-th outgoing bond in the
/// vertex trace; column `j` is the incoming bond that reverses it.
pub fn assemble_graph_scattering(g: &MetricGraph, per_vertex: &BTreeMap<String, CMatrix>) -> Result<CMatrix> {
    assemble_with_channels(g, per_vertex, 1)
}

/// As [`assemble_graph_scattering`], with `channels` amplitudes per bond
/// stored bond-major: slot `channels·b + ch`.
pub fn assemble_with_channels(
    g: &MetricGraph,
    per_vertex: &BTreeMap<String, CMatrix>,
    channels: usize,
) -> Result<CMatrix> {
    let n = g.bond_count() * channels;
    let mut sigma = CMatrix::zeros(n, n);
    for trace in g.traces() {
        let m = per_vertex.get(&trace.vertex).ok_or_else(|| {
            Error::at_vertex(
                &trace.vertex,
                Error::Semantic("missing vertex scattering matrix".into()),
            )
        })?;
        let dim = trace.degree() * channels;
        if m.shape() != (dim, dim) {
            return Err(Error::at_vertex(
                &trace.vertex,
                Error::dims(
                    "vertex scattering matrix",
                    format!("{dim}x{dim}"),
                    format!("{}x{}", m.nrows(), m.ncols()),
                ),
            ));
        }
        for (i, out) in trace.incident_bonds.iter().enumerate() {
            for (j, b) in trace.incident_bonds.iter().enumerate() {
                let incoming = g.reversal(*b);
                for co in 0..channels {
                    for ci in 0..channels {
                        sigma[(out.slot() * channels + co, incoming.slot() * channels + ci)] =
                            m[(i * channels + co, j * channels + ci)];
                    }
                }
            }
        }
    }
    Ok(sigma)
}

/// `D(k) = diag(e^{ikL_1}, …, e^{ikL_E}, e^{ikL_1}, …, e^{ikL_E})`.
pub fn phase_matrix(g: &MetricGraph, k: f64) -> CMatrix {
    let phases: Vec<Complex64> = g
        .bond_lengths()
        .into_iter()
        .map(|l| Complex64::from_polar(1.0, k * l))
        .collect();
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(phases))
}

pub fn phase_matrix_with_channels(g: &MetricGraph, k: f64, channels: usize) -> CMatrix {
    let d = phase_matrix(g, k);
    if channels == 1 {
        d
    } else {
        kron(&d, &identity(channels))
    }
}

/// `Σ(k)`, `D(k)` and `U(k) = D(k)Σ(k)` at one wavenumber.
#[derive(Debug, Clone)]
pub struct GraphOperator {
    pub k: f64,
    pub sigma: CMatrix,
    pub d_phase: CMatrix,
    pub evolution: CMatrix,
}

impl GraphOperator {
    pub fn new(k: f64, sigma: CMatrix, d_phase: CMatrix) -> Self {
        let evolution = &d_phase * &sigma;
        GraphOperator {
            k,
            sigma,
            d_phase,
            evolution,
        }
    }

    pub fn dimension(&self) -> usize {
        self.evolution.nrows()
    }
}
