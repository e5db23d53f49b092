//! Spectra of quantum graphs: metric graphs carrying a Laplace or Dirac
//! operator, coupled at vertices by self-adjoint matching conditions.
//!
//! Eigenvalues are found as roots `k` of `det(I − D(k)Σ(k)) = 0`.

pub mod cli;
pub mod conditions;
pub mod dirac;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod model;
pub mod scattering;
pub mod secular;

#[cfg(test)]
mod test_support;

pub use conditions::{AdmissibilityReport, ConditionSpec, NamedCondition};
pub use error::{Error, ErrorCode, Result};
pub use graph::{Bond, Edge, MetricGraph, VertexTrace};
pub use linalg::{CMatrix, CVector};
pub use model::{Operator, QuantumGraph};
pub use secular::{find_spectrum, secular_value, verify_eigenfunction, Root, SolverOptions, Spectrum};
