//! Dense complex matrix helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Builds a matrix from real row-major data.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    assert_eq!(data.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| c(data[i * cols + j], 0.0))
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// `‖M†M − I‖₂`, zero for an exactly unitary matrix.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    spectral_norm(&(m.adjoint() * m - identity(n)))
}

pub fn ensure_square(m: &CMatrix, context: &str) -> Result<usize> {
    if m.is_square() {
        Ok(m.nrows())
    } else {
        Err(Error::dims(
            context,
            "square matrix",
            format!("{}x{}", m.nrows(), m.ncols()),
        ))
    }
}

pub fn ensure_unitary(m: &CMatrix, tol: f64) -> Result<()> {
    ensure_square(m, "unitary matrix")?;
    let defect = unitarity_defect(m);
    if defect <= tol {
        Ok(())
    } else {
        Err(Error::NotUnitary { defect })
    }
}

/// Solves `lhs · X = rhs` with a single LU factorization.
pub fn solve(lhs: &CMatrix, rhs: &CMatrix) -> Result<CMatrix> {
    let lu = lhs.clone().lu();
    let x = lu
        .solve(rhs)
        .ok_or_else(|| Error::Singular(format!("{}x{} system", lhs.nrows(), lhs.ncols())))?;
    if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(x)
    } else {
        Err(Error::Singular("non-finite solution".into()))
    }
}

pub fn determinant(m: &CMatrix) -> Complex64 {
    m.clone().lu().determinant()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Horizontal concatenation `[A B]`.
pub fn hstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = CMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Eigen-decomposition of a unitary matrix.
///
/// A unitary matrix is normal, so its complex Schur form is diagonal and the
/// Schur vectors are orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    pub values: Vec<Complex64>,
    /// `arg(λ)` in `(−π, π]`.
    pub phases: Vec<f64>,
    /// Column `j` is the eigenvector of `values[j]`.
    pub vectors: CMatrix,
}

impl UnitaryEigen {
    pub fn new(u: &CMatrix) -> Option<Self> {
        let n = u.nrows();
        let schur = nalgebra::linalg::Schur::try_new(u.clone(), f64::EPSILON, 10_000)?;
        let (q, t) = schur.unpack();
        let values: Vec<Complex64> = (0..n).map(|j| t[(j, j)]).collect();
        let phases = values.iter().map(|z| z.arg()).collect();
        Some(UnitaryEigen {
            values,
            phases,
            vectors: q,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `|⟨v_i, w_j⟩|` for eigenvector `i` of `self` and `j` of `other`.
    pub fn overlaps(&self, other: &UnitaryEigen) -> DMatrix<f64> {
        (self.vectors.adjoint() * &other.vectors).map(|z| z.norm())
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_phase(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut t = theta % TAU;
    if t <= -PI {
        t += TAU;
    } else if t > PI {
        t -= TAU;
    }
    t
}
