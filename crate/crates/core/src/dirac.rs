//! Four-component Dirac operator on a metric graph (natural units, ħ = c = 1).
//!
//! On each edge `−iα f′ + mβ f = E f` with `E = √(k² + m²)`. Vertex
//! conditions act on `F⁺(v)` (spinor components 1, 2 at each edge end) and
//! `F⁻(v)` (components `(−f₄, f₃)` at an edge origin, `(f₄, −f₃)` at a
//! terminus), with the two channels of each bond stored consecutively.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::conditions::{ensure_self_adjoint, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::linalg::{c, ensure_square, ensure_unitary, identity, kron, solve, CMatrix, CVector, I};
use crate::model::QuantumGraph;
use crate::secular::{find_spectrum, SolverOptions, Spectrum};

pub type Spinor = [Complex64; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn alpha_matrix() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 3)] = -I;
    m[(1, 2)] = I;
    m[(2, 1)] = -I;
    m[(3, 0)] = I;
    m
}

pub fn beta_matrix() -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_vec(vec![
        c(1.0, 0.0),
        c(1.0, 0.0),
        c(-1.0, 0.0),
        c(-1.0, 0.0),
    ]))
}

/// Wavenumber, energy and the dispersion factor `γ(k) = (E − m)/k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionState {
    pub k: f64,
    pub gamma: f64,
    pub energy: f64,
}

impl DispersionState {
    pub fn new(k: f64, mass: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidWavenumber(k));
        }
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Dirac mass must be nonnegative, got {mass}"
            )));
        }
        let energy = k.hypot(mass);
        Ok(DispersionState {
            k,
            gamma: gamma(k, mass),
            energy,
        })
    }
}

/// `γ(k) = (E − m)/k = k/(E + m)`, exactly 1 at zero mass.
pub fn gamma(k: f64, mass: f64) -> f64 {
    if mass == 0.0 {
        1.0
    } else {
        k / (k.hypot(mass) + mass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `e^{ikx}`
    Forward,
    /// `e^{−ikx}`
    Backward,
}

/// Positive-energy plane-wave spinors `[α-channel, β-channel]` travelling in
/// `direction`.
pub fn dirac_eigenspinor_basis(k: f64, mass: f64, direction: Direction) -> Result<[Spinor; 2]> {
    let g = DispersionState::new(k, mass)?.gamma;
    let s = match direction {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };
    Ok([
        [c(1.0, 0.0), ZERO, ZERO, c(0.0, s * g)],
        [ZERO, c(1.0, 0.0), c(0.0, -s * g), ZERO],
    ])
}

/// `‖(−iα ∂ₓ + mβ − E) s e^{±ikx}‖` evaluated at `x = 0`.
pub fn dirac_equation_residual(spinor: &Spinor, k: f64, mass: f64, direction: Direction) -> Result<f64> {
    let state = DispersionState::new(k, mass)?;
    let s = CVector::from_column_slice(spinor);
    let dk = match direction {
        Direction::Forward => I * k,
        Direction::Backward => -I * k,
    };
    let lhs = alpha_matrix() * (&s * (-I * dk)) + beta_matrix() * (&s * c(mass, 0.0)) - &s * c(state.energy, 0.0);
    Ok(lhs.norm())
}

/// Plane-wave amplitudes on one edge: `forward` multiplies `e^{ikx}`,
/// `backward` multiplies `e^{−ikx}`; each is `[a_α, a_β]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EdgeSpinorAmplitudes {
    pub forward: [Complex64; 2],
    pub backward: [Complex64; 2],
}

/// Spinor value on an edge at coordinate `x`.
pub fn spinor_at(amps: &EdgeSpinorAmplitudes, k: f64, mass: f64, x: f64) -> Result<Spinor> {
    let [fa, fb] = dirac_eigenspinor_basis(k, mass, Direction::Forward)?;
    let [ba, bb] = dirac_eigenspinor_basis(k, mass, Direction::Backward)?;
    let ep = Complex64::from_polar(1.0, k * x);
    let em = Complex64::from_polar(1.0, -k * x);
    let mut out = [ZERO; 4];
    for i in 0..4 {
        out[i] = (amps.forward[0] * fa[i] + amps.forward[1] * fb[i]) * ep
            + (amps.backward[0] * ba[i] + amps.backward[1] * bb[i]) * em;
    }
    Ok(out)
}

/// `(F⁺(v), F⁻(v))` for plane-wave data given per edge in id order.
pub fn dirac_trace_vectors(
    g: &MetricGraph,
    v: &str,
    amplitudes: &[EdgeSpinorAmplitudes],
    k: f64,
    mass: f64,
) -> Result<(CVector, CVector)> {
    if amplitudes.len() != g.edge_count() {
        return Err(Error::dims("edge spinor amplitudes", g.edge_count(), amplitudes.len()));
    }
    let trace = g.vertex_trace(v)?;
    let d = trace.degree();
    let mut plus = CVector::zeros(2 * d);
    let mut minus = CVector::zeros(2 * d);
    for (i, bond) in trace.incident_bonds.iter().enumerate() {
        let edge = &g.edges()[bond.edge_id - 1];
        let x = if bond.reversed { edge.length } else { 0.0 };
        let f = spinor_at(&amplitudes[bond.edge_id - 1], k, mass, x)?;
        plus[2 * i] = f[0];
        plus[2 * i + 1] = f[1];
        if bond.reversed {
            minus[2 * i] = f[3];
            minus[2 * i + 1] = -f[2];
        } else {
            minus[2 * i] = -f[3];
            minus[2 * i + 1] = f[2];
        }
    }
    Ok((plus, minus))
}

/// `σ = −(A − iγB)⁻¹(A + iγB)`; fails on inadmissible `(A, B)`.
pub fn dirac_vertex_scattering(a: &CMatrix, b: &CMatrix, k: f64, mass: f64) -> Result<CMatrix> {
    ensure_self_adjoint(a, b, DEFAULT_TOL)?;
    scattering_unchecked(a, b, k, mass)
}

pub(crate) fn scattering_unchecked(a: &CMatrix, b: &CMatrix, k: f64, mass: f64) -> Result<CMatrix> {
    let g = DispersionState::new(k, mass)?.gamma;
    let ig = I * g;
    solve(&(a - b * ig), &(-(a + b * ig)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracVertexCondition {
    pub a: CMatrix,
    pub b: CMatrix,
}

/// `A = (I − U)/2`, `B = i(I + U)/2`, realizing `σ = U` at zero mass.
pub fn dirac_conditions_from_unitary(u: &CMatrix) -> Result<DiracVertexCondition> {
    let n = ensure_square(u, "Dirac unitary U")?;
    ensure_unitary(u, DEFAULT_TOL * (1.0 + n as f64))?;
    let id = identity(n);
    Ok(DiracVertexCondition {
        a: (&id - u) * c(0.5, 0.0),
        b: (id + u) * c(0.0, 0.5),
    })
}

/// `Û ⊗ I₂`: the same scattering in both spin channels.
pub fn lift_spin_diagonal(uhat: &CMatrix) -> CMatrix {
    kron(uhat, &identity(2))
}

/// Recovers `Û` from `U = Û ⊗ I₂`, or `None` if `U` rotates spin.
pub fn spin_diagonal_part(u: &CMatrix, tol: f64) -> Option<CMatrix> {
    if !u.is_square() || !u.nrows().is_multiple_of(2) {
        return None;
    }
    let d = u.nrows() / 2;
    let uhat = CMatrix::from_fn(d, d, |i, j| u[(2 * i, 2 * j)]);
    let lifted = lift_spin_diagonal(&uhat);
    (crate::linalg::max_abs_diff(&lifted, u) <= tol).then_some(uhat)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiracPath {
    /// `det(I − D(k)Σ̂) = 0` on `2E` bonds, multiplicities doubled.
    Reduced,
    /// `det(I − (D(k)Σ̂) ⊗ I₂) = 0` on `4E` slots.
    Full,
}

/// Dirac model with spin-diagonal vertex data `Û_v ⊗ I₂`.
pub fn spin_diagonal_model(
    g: &MetricGraph,
    uhat: &BTreeMap<String, CMatrix>,
    mass: f64,
    path: DiracPath,
) -> Result<QuantumGraph> {
    let mut pairs = BTreeMap::new();
    for trace in g.traces() {
        let v = &trace.vertex;
        let u = uhat
            .get(v)
            .ok_or_else(|| Error::at_vertex(v, Error::Semantic("missing vertex scattering matrix".into())))?;
        let d = trace.degree();
        if u.shape() != (d, d) {
            return Err(Error::at_vertex(
                v,
                Error::dims(
                    "spin-diagonal block",
                    format!("{d}x{d}"),
                    format!("{}x{}", u.nrows(), u.ncols()),
                ),
            ));
        }
        let lifted = match path {
            DiracPath::Reduced => u.clone(),
            DiracPath::Full => lift_spin_diagonal(u),
        };
        let cond = dirac_conditions_from_unitary(&lifted).map_err(|e| Error::at_vertex(v, e))?;
        pairs.insert(v.clone(), (cond.a, cond.b));
    }
    let channels = match path {
        DiracPath::Reduced => 1,
        DiracPath::Full => 2,
    };
    QuantumGraph::dirac_from_pairs(g.clone(), pairs, mass, channels)
}

/// Dirac spectrum (roots in `k`, energy `√(k² + m²)`) for spin-diagonal
/// vertex data.
pub fn dirac_spectrum(
    g: &MetricGraph,
    uhat: &BTreeMap<String, CMatrix>,
    mass: f64,
    k_min: f64,
    k_max: f64,
    opts: &SolverOptions,
    path: DiracPath,
) -> Result<Spectrum> {
    let model = spin_diagonal_model(g, uhat, mass, path)?;
    let mut spectrum = find_spectrum(&model, k_min, k_max, opts)?;
    if path == DiracPath::Reduced {
        for root in &mut spectrum.roots {
            root.multiplicity *= 2;
        }
    }
    Ok(spectrum)
}

/// Spin-diagonal blocks of a full Dirac model, one per vertex.
pub fn reduce_to_spin_diagonal(model: &QuantumGraph, tol: f64) -> Result<BTreeMap<String, CMatrix>> {
    if model.channels() != 2 {
        return Err(Error::InvalidParameter("model is not a full Dirac model".into()));
    }
    let mut out = BTreeMap::new();
    for trace in model.graph().traces() {
        let v = &trace.vertex;
        let sigma = match model.vertex_data(v)? {
            crate::model::VertexData::Dirac { a, b } => scattering_unchecked(a, b, 1.0, 0.0)?,
            _ => unreachable!("full Dirac models carry Dirac vertex data"),
        };
        let uhat = spin_diagonal_part(&sigma, tol).ok_or_else(|| {
            Error::at_vertex(
                v,
                Error::Semantic("vertex scattering rotates spin; not of the form Û ⊗ I₂".into()),
            )
        })?;
        out.insert(v.clone(), uhat);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KramersReport {
    pub symmetric: bool,
    /// `‖Σ̂ − Σ̂ᵀ‖₂`
    pub asymmetry: f64,
    /// multiplicity → number of roots observed with it
    pub multiplicities: BTreeMap<usize, usize>,
}

/// Reports transpose symmetry of `Σ̂` and tabulates observed multiplicities.
pub fn kramers_check(sigma_hat: &CMatrix, spectrum: &Spectrum) -> KramersReport {
    let asymmetry = crate::linalg::spectral_norm(&(sigma_hat - sigma_hat.transpose()));
    let mut multiplicities = BTreeMap::new();
    for r in &spectrum.roots {
        *multiplicities.entry(r.multiplicity).or_insert(0) += 1;
    }
    KramersReport {
        symmetric: asymmetry <= DEFAULT_TOL * (1.0 + sigma_hat.nrows() as f64),
        asymmetry,
        multiplicities,
    }
}
