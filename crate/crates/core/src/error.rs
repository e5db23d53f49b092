use thiserror::Error;

/// Process exit codes shared by the CLI and the C ABI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(i32)]
pub enum ErrorCode {
    Input = 1,
    Inadmissible = 2,
    Numerical = 3,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no edges")]
    EmptyGraph,

    #[error("duplicate edge id {0}")]
    DuplicateEdge(usize),

    #[error("edge ids must be contiguous from 1 to {count}; missing id {missing}")]
    NonContiguousEdgeIds { count: usize, missing: usize },

    #[error("edge {edge} references unknown vertex '{vertex}'")]
    DanglingEndpoint { edge: usize, vertex: String },

    #[error("edge {edge} has invalid length {length} (must be positive and finite)")]
    InvalidLength { edge: usize, length: f64 },

    #[error("duplicate vertex label '{0}'")]
    DuplicateVertex(String),

    #[error("vertex '{0}' has no incident edges")]
    IsolatedVertex(String),

    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),

    #[error("{context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: String,
        found: String,
    },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("vertex conditions are not self-adjoint: {reason}")]
    Inadmissible { reason: String },

    #[error("wavenumber must be positive and finite, got {0}")]
    InvalidWavenumber(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("bisection did not converge in bracket [{lo}, {hi}]")]
    NonConvergent { lo: f64, hi: f64 },

    #[error("no null direction of I - U(k) at k = {k} (smallest singular value {smallest:.3e})")]
    NoNullDirection { k: f64, smallest: f64 },

    #[error("eigen-decomposition failed at k = {0}")]
    EigenFailure(f64),

    #[error("inconsistent results: {0}")]
    Inconsistent(String),

    #[error("vertex '{vertex}': {source}")]
    Vertex {
        vertex: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {message}")]
    Syntax { path: String, message: String },

    #[error("{0}")]
    Semantic(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn at_vertex(vertex: impl Into<String>, source: Error) -> Self {
        Error::Vertex {
            vertex: vertex.into(),
            source: Box::new(source),
        }
    }

    pub(crate) fn dims(context: impl Into<String>, expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub fn code(&self) -> ErrorCode {
        match self {
            Error::Vertex { source, .. } => source.code(),
            Error::Inadmissible { .. } => ErrorCode::Inadmissible,
            Error::Singular(_)
            | Error::NonConvergent { .. }
            | Error::NoNullDirection { .. }
            | Error::EigenFailure(_)
            | Error::Inconsistent(_) => ErrorCode::Numerical,
            _ => ErrorCode::Input,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
