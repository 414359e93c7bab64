use thiserror::Error;

/// Errors raised anywhere in the compiler.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dense representation of {num_qubits} qubits exceeds the cap of {cap}")]
    DenseDimensionExceeded { num_qubits: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("vertex {0} has no coordinates")]
    MissingCoordinates(usize),
    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("term is not factorable across the split: {0}")]
    NotFactorable(String),
    #[error("jobs overlap: {0}")]
    OverlappingJobs(String),
    #[error("factors share support: {0}")]
    SharedSupport(String),
    #[error("edges do not cross: {0}")]
    NotCrossing(String),
    #[error("edges carry different Pauli axes at the shared vertex: {0}")]
    MismatchedAxis(String),
    #[error("no valid plan: {0}")]
    PlanInfeasible(String),
    #[error("geometry audit failed: {0}")]
    AuditFailed(String),
    #[error("routing failed after {refinements} refinements: {reason}")]
    RoutingFailed { refinements: usize, reason: String },
    #[error("eigensolver did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("resolvent is numerically singular (condition number {condition:e})")]
    SingularResolvent { condition: f64 },
    #[error("series does not converge: |V| = {norm_v:e} >= distance {distance:e}")]
    DivergentExpansion { norm_v: f64, distance: f64 },
    #[error("low-energy count mismatch: expected {expected}, found {found}")]
    DegeneracyMismatch { expected: usize, found: usize },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Name of the module family the error belongs to.
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            DenseDimensionExceeded { .. } | DimensionMismatch { .. } | Parse(_) => "pauli_algebra",
            UnknownVertex(_) | MissingCoordinates(_) => "interaction_graph",
            MalformedCircuit(_) => "clock_compiler",
            NotFactorable(_) | OverlappingJobs(_) | SharedSupport(_) | NotCrossing(_)
            | MismatchedAxis(_) => "gadget_engine",
            PlanInfeasible(_) | AuditFailed(_) | RoutingFailed { .. } => "lattice_embedder",
            NoConvergence { .. } | SingularResolvent { .. } | DivergentExpansion { .. }
            | DegeneracyMismatch { .. } => "spectral_lab",
            OutOfRange(_) => "adiabatic_path",
            InvalidParameter(_) => "config",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
