//! Laplace vertex conditions `A F(v) + B F′(v) = 0`.
//!
//! `F(v)` holds the function values and `F′(v)` the outgoing derivatives at
//! the edge ends meeting at `v`, both in [`VertexTrace`](crate::graph::VertexTrace)
//! order.

use crate::error::{Error, Result};
use crate::linalg::{c, hstack, identity, singular_values, spectral_norm, CMatrix, I};
use crate::scattering::vertex_scattering_laplace;

pub const DEFAULT_TOL: f64 = 1e-10;

/// Probe wavenumbers used to classify k-independence.
pub const PROBE_K0: f64 = 1.0;
pub const PROBE_K1: f64 = 0.5;
pub const PROBE_K2: f64 = 2.0;

/// Per-vertex boundary data.
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionSpec {
    MatrixPair {
        a: CMatrix,
        b: CMatrix,
    },
    Unitary {
        u: CMatrix,
    },
    Standard,
    Dirichlet,
    Neumann,
    /// Continuity plus a derivative sum proportional to the vertex value.
    Delta {
        alpha: f64,
    },
    /// Discrete Fourier transform scattering matrix.
    Dft,
    /// A vertex scattering matrix given directly.
    CustomScattering {
        s: CMatrix,
    },
}

impl ConditionSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ConditionSpec::MatrixPair { .. } => "matrix_pair",
            ConditionSpec::Unitary { .. } => "unitary",
            ConditionSpec::Standard => "standard",
            ConditionSpec::Dirichlet => "dirichlet",
            ConditionSpec::Neumann => "neumann",
            ConditionSpec::Delta { .. } => "delta",
            ConditionSpec::Dft => "dft",
            ConditionSpec::CustomScattering { .. } => "custom_scattering",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedCondition {
    Standard,
    Dirichlet,
    Neumann,
    Delta(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub self_adjoint: bool,
    pub rank_ok: bool,
    pub hermitian_ok: bool,
    /// `A B† = 0`. `None` until classified.
    pub k_independent: Option<bool>,
    /// `σ(k₀)² = I`.
    pub involutive: Option<bool>,
    /// `σ(k₁) = σ(k₂)`.
    pub probes_agree: Option<bool>,
    pub max_defect: f64,
}

fn check_pair_dims(a: &CMatrix, b: &CMatrix) -> Result<usize> {
    let d = a.nrows();
    if !a.is_square() || b.shape() != (d, d) {
        return Err(Error::dims(
            "vertex condition pair (A, B)",
            format!("two square matrices of equal size, A is {}x{}", a.nrows(), a.ncols()),
            format!("B {}x{}", b.nrows(), b.ncols()),
        ));
    }
    if d == 0 {
        return Err(Error::dims("vertex condition pair (A, B)", "dimension >= 1", 0));
    }
    Ok(d)
}

/// Self-adjointness criterion: `[A B]` has full rank `d` and `A B†` is Hermitian.
pub fn check_self_adjoint(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<AdmissibilityReport> {
    check_pair_dims(a, b)?;
    let sv = singular_values(&hstack(a, b));
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let rank_ok = smax > 0.0 && smin > tol * smax;

    let abh = a * b.adjoint();
    let herm_defect = spectral_norm(&(&abh - abh.adjoint())) / (1.0 + spectral_norm(&abh));
    let hermitian_ok = herm_defect <= tol;

    Ok(AdmissibilityReport {
        self_adjoint: rank_ok && hermitian_ok,
        rank_ok,
        hermitian_ok,
        k_independent: None,
        involutive: None,
        probes_agree: None,
        max_defect: herm_defect,
    })
}

/// Fails with [`Error::Inadmissible`] unless `(A, B)` is self-adjoint.
pub fn ensure_self_adjoint(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<AdmissibilityReport> {
    let report = check_self_adjoint(a, b, tol)?;
    if report.self_adjoint {
        Ok(report)
    } else {
        let reason = match (report.rank_ok, report.hermitian_ok) {
            (false, false) => "(A, B) is rank deficient and A B† is not Hermitian".to_string(),
            (false, true) => "(A, B) is rank deficient".to_string(),
            _ => format!("A B† is not Hermitian (defect {:.3e})", report.max_defect),
        };
        Err(Error::Inadmissible { reason })
    }
}

/// `A = i(U − I)`, `B = U + I`.
pub fn from_unitary(u: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let d = crate::linalg::ensure_square(u, "unitary parameter U")?;
    crate::linalg::ensure_unitary(u, DEFAULT_TOL * (1.0 + d as f64))?;
    let id = identity(d);
    Ok(((u - &id) * I, u + id))
}

/// Checks admissibility, then the three k-independence tests: `A B† = 0`,
/// `σ(k₀)² = I` and `σ(k₁) = σ(k₂)`.
pub fn classify_k_independence(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<AdmissibilityReport> {
    let mut report = ensure_self_adjoint(a, b, tol)?;
    let d = a.nrows();

    let abh_norm = spectral_norm(&(a * b.adjoint()));
    let k_independent = abh_norm <= tol * (spectral_norm(a) * spectral_norm(b) + 1.0);

    let s0 = vertex_scattering_laplace(a, b, PROBE_K0)?;
    let square_defect = spectral_norm(&(&s0 * &s0 - identity(d)));
    let involutive = square_defect <= tol;

    let s1 = vertex_scattering_laplace(a, b, PROBE_K1)?;
    let s2 = vertex_scattering_laplace(a, b, PROBE_K2)?;
    let probe_defect = spectral_norm(&(s1 - s2));
    let probes_agree = probe_defect <= tol;

    let defect = |ok: bool, x: f64| if ok { x } else { 0.0 };
    report.k_independent = Some(k_independent);
    report.involutive = Some(involutive);
    report.probes_agree = Some(probes_agree);
    report.max_defect = report
        .max_defect
        .max(defect(involutive, square_defect))
        .max(defect(probes_agree, probe_defect));
    Ok(report)
}

/// Matrix pair for a named condition at a vertex of degree `d`.
pub fn build_named(kind: NamedCondition, d: usize) -> Result<(CMatrix, CMatrix)> {
    if d == 0 {
        return Err(Error::InvalidParameter("vertex degree must be at least 1".into()));
    }
    let zero = CMatrix::zeros(d, d);
    Ok(match kind {
        NamedCondition::Dirichlet => (identity(d), zero),
        NamedCondition::Neumann => (zero, identity(d)),
        NamedCondition::Standard => standard_pair(d, 0.0),
        NamedCondition::Delta(alpha) => {
            if !alpha.is_finite() {
                return Err(Error::InvalidParameter(format!("delta strength {alpha}")));
            }
            standard_pair(d, alpha)
        }
    })
}

/// Continuity rows `f_i − f_{i+1} = 0` plus the row `Σ f′ + α f_1 = 0`.
fn standard_pair(d: usize, alpha: f64) -> (CMatrix, CMatrix) {
    let mut a = CMatrix::zeros(d, d);
    let mut b = CMatrix::zeros(d, d);
    for i in 0..d - 1 {
        a[(i, i)] = c(1.0, 0.0);
        a[(i, i + 1)] = c(-1.0, 0.0);
    }
    a[(d - 1, 0)] = c(alpha, 0.0);
    for j in 0..d {
        b[(d - 1, j)] = c(1.0, 0.0);
    }
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_matrix;
    use crate::test_support::{random_invertible, random_unitary, rng};

    #[test]
    fn dirichlet_is_self_adjoint() {
        let r = check_self_adjoint(&identity(3), &CMatrix::zeros(3, 3), DEFAULT_TOL).unwrap();
        assert!(r.self_adjoint && r.rank_ok && r.hermitian_ok);
    }

    #[test]
    fn standard_is_self_adjoint_at_degree_three() {
        let (a, b) = build_named(NamedCondition::Standard, 3).unwrap();
        assert!(check_self_adjoint(&a, &b, DEFAULT_TOL).unwrap().self_adjoint);
    }

    #[test]
    fn zero_pair_is_rank_deficient() {
        let z = CMatrix::zeros(2, 2);
        let r = check_self_adjoint(&z, &z, DEFAULT_TOL).unwrap();
        assert!(!r.rank_ok);
        assert!(!r.self_adjoint);
    }

    #[test]
    fn non_hermitian_product_rejected() {
        // A = I, B = [[0, 1], [0, 0]] gives A B† = B† which is not Hermitian
        let b = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let r = check_self_adjoint(&identity(2), &b, DEFAULT_TOL).unwrap();
        assert!(r.rank_ok);
        assert!(!r.hermitian_ok);
        assert!(matches!(
            ensure_self_adjoint(&identity(2), &b, DEFAULT_TOL),
            Err(Error::Inadmissible { .. })
        ));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(matches!(
            check_self_adjoint(&identity(2), &identity(3), DEFAULT_TOL),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn from_unitary_identity_is_neumann() {
        let (a, b) = from_unitary(&identity(3)).unwrap();
        assert_eq!(a, CMatrix::zeros(3, 3));
        assert_eq!(b, identity(3) * c(2.0, 0.0));
    }

    #[test]
    fn from_unitary_minus_identity_is_dirichlet() {
        let (a, b) = from_unitary(&(-identity(2))).unwrap();
        assert_eq!(a, identity(2) * c(0.0, -2.0));
        assert_eq!(b, CMatrix::zeros(2, 2));
    }

    #[test]
    fn from_unitary_rejects_non_unitary() {
        let m = identity(2) * c(2.0, 0.0);
        assert!(matches!(from_unitary(&m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn random_unitaries_give_admissible_pairs() {
        let mut r = rng(11);
        for d in 1..=8 {
            for _ in 0..100 {
                let u = random_unitary(&mut r, d);
                let (a, b) = from_unitary(&u).unwrap();
                let rep = check_self_adjoint(&a, &b, DEFAULT_TOL).unwrap();
                assert!(rep.self_adjoint, "d={d}: {rep:?}");
                assert!(rep.max_defect < 1e-12);
            }
        }
    }

    #[test]
    fn admissibility_invariant_under_left_multiplication() {
        let mut r = rng(12);
        for d in 1..=6 {
            for _ in 0..20 {
                let (a, b) = from_unitary(&random_unitary(&mut r, d)).unwrap();
                let g = random_invertible(&mut r, d);
                let rep = check_self_adjoint(&(&g * &a), &(&g * &b), DEFAULT_TOL).unwrap();
                assert!(rep.self_adjoint);
            }
            // an inadmissible pair stays inadmissible
            let bad_b = CMatrix::from_fn(d, d, |i, j| if j == i + 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
            let g = random_invertible(&mut r, d);
            let before = check_self_adjoint(&identity(d), &bad_b, DEFAULT_TOL).unwrap();
            let after = check_self_adjoint(&g, &(&g * &bad_b), DEFAULT_TOL).unwrap();
            assert_eq!(before.self_adjoint, after.self_adjoint);
        }
    }

    #[test]
    fn standard_degree_two_matrices() {
        let (a, b) = build_named(NamedCondition::Standard, 2).unwrap();
        assert_eq!(a, real_matrix(2, 2, &[1.0, -1.0, 0.0, 0.0]));
        assert_eq!(b, real_matrix(2, 2, &[0.0, 0.0, 1.0, 1.0]));
    }

    #[test]
    fn dirichlet_degree_one() {
        let (a, b) = build_named(NamedCondition::Dirichlet, 1).unwrap();
        assert_eq!(a, real_matrix(1, 1, &[1.0]));
        assert_eq!(b, real_matrix(1, 1, &[0.0]));
        assert!(build_named(NamedCondition::Standard, 0).is_err());
    }

    #[test]
    fn zero_delta_matches_standard_scattering() {
        let (a0, b0) = build_named(NamedCondition::Delta(0.0), 3).unwrap();
        let (a, b) = build_named(NamedCondition::Standard, 3).unwrap();
        for k in [0.3, 1.0, 9.0] {
            let s0 = vertex_scattering_laplace(&a0, &b0, k).unwrap();
            let s = vertex_scattering_laplace(&a, &b, k).unwrap();
            assert!(crate::linalg::max_abs_diff(&s0, &s) < 1e-14);
        }
    }

    #[test]
    fn named_builders_are_admissible() {
        for d in 1..=6 {
            for kind in [
                NamedCondition::Standard,
                NamedCondition::Dirichlet,
                NamedCondition::Neumann,
                NamedCondition::Delta(-1.0),
                NamedCondition::Delta(1.0),
                NamedCondition::Delta(5.0),
            ] {
                let (a, b) = build_named(kind, d).unwrap();
                assert!(
                    check_self_adjoint(&a, &b, DEFAULT_TOL).unwrap().self_adjoint,
                    "{kind:?} d={d}"
                );
            }
        }
    }

    #[test]
    fn classification_examples() {
        let (a, b) = build_named(NamedCondition::Standard, 4).unwrap();
        let r = classify_k_independence(&a, &b, DEFAULT_TOL).unwrap();
        assert_eq!(r.k_independent, Some(true));
        assert_eq!(r.involutive, Some(true));
        assert_eq!(r.probes_agree, Some(true));

        let (a, b) = build_named(NamedCondition::Delta(1.0), 3).unwrap();
        let r = classify_k_independence(&a, &b, DEFAULT_TOL).unwrap();
        assert_eq!(r.k_independent, Some(false));
        assert_eq!(r.involutive, Some(false));
        assert_eq!(r.probes_agree, Some(false));

        let (a, b) = build_named(NamedCondition::Dirichlet, 2).unwrap();
        let r = classify_k_independence(&a, &b, DEFAULT_TOL).unwrap();
        assert_eq!(r.k_independent, Some(true));
        let s = vertex_scattering_laplace(&a, &b, 1.0).unwrap();
        assert!(crate::linalg::max_abs_diff(&s, &(-identity(2))) < 1e-15);

        let z = CMatrix::zeros(2, 2);
        assert!(matches!(
            classify_k_independence(&z, &z, DEFAULT_TOL),
            Err(Error::Inadmissible { .. })
        ));
    }

    #[test]
    fn proposition_one_tests_agree_on_catalog() {
        let mut r = rng(13);
        let mut catalog = Vec::new();
        for d in 1..=5 {
            for kind in [
                NamedCondition::Standard,
                NamedCondition::Dirichlet,
                NamedCondition::Neumann,
                NamedCondition::Delta(1.0),
                NamedCondition::Delta(-1.0),
                NamedCondition::Delta(5.0),
            ] {
                catalog.push(build_named(kind, d).unwrap());
            }
            for _ in 0..5 {
                catalog.push(from_unitary(&random_unitary(&mut r, d)).unwrap());
            }
            // Hermitian unitary (reflection): k-independent
            let u = random_unitary(&mut r, d);
            let p = u.columns(0, 1) * u.columns(0, 1).adjoint();
            catalog.push(from_unitary(&(identity(d) - p * c(2.0, 0.0))).unwrap());
        }
        for (a, b) in catalog {
            let rep = classify_k_independence(&a, &b, DEFAULT_TOL).unwrap();
            assert_eq!(rep.k_independent, rep.involutive, "{rep:?}");
            assert_eq!(rep.involutive, rep.probes_agree, "{rep:?}");
        }
    }
}
