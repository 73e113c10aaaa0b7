use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: expected {expected} values, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("node crossing: gap {gap:e} after node {index} is not positive")]
    NodeCrossing { index: usize, gap: f64 },

    #[error("nodes are not strictly increasing at index {index}")]
    NonMonotoneNodes { index: usize },

    #[error("grid is not uniform (relative gap deviation {deviation:e})")]
    NonUniformGrid { deviation: f64 },

    #[error("relaxation did not converge in {iterations} sweeps (last update {last_update:e})")]
    NoConvergence { iterations: usize, last_update: f64 },

    #[error("monitor function is not real-valued at node {index}")]
    InvalidMonitor { index: usize },

    #[error("time inversion with epsilon {epsilon} leaves its domain at t = {t}")]
    DomainViolation { t: f64, epsilon: f64 },

    #[error("Fourier series cannot meet the tolerance in double precision (term cap {cap})")]
    NoDecay { cap: usize },

    #[error("series truncation not certified at t = {t} (guard time {guard})")]
    TruncationUnsafe { t: f64, guard: f64 },

    #[error("step {step}: {source}")]
    AtStep { step: usize, source: Box<Error> },

    #[error("N = {n}: {source}")]
    AtResolution { n: usize, source: Box<Error> },
}

impl Error {
    /// Stable machine-readable name of the innermost error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::ShapeMismatch { .. } => "shape_mismatch",
            Error::NodeCrossing { .. } => "node_crossing",
            Error::NonMonotoneNodes { .. } => "non_monotone_nodes",
            Error::NonUniformGrid { .. } => "non_uniform_grid",
            Error::NoConvergence { .. } => "no_convergence",
            Error::InvalidMonitor { .. } => "invalid_monitor",
            Error::DomainViolation { .. } => "domain_violation",
            Error::NoDecay { .. } => "no_decay",
            Error::TruncationUnsafe { .. } => "truncation_unsafe",
            Error::AtStep { source, .. } | Error::AtResolution { source, .. } => source.code(),
        }
    }

    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::AtStep { step, source: Box::new(self) }
    }

    pub(crate) fn at_resolution(self, n: usize) -> Self {
        Error::AtResolution { n, source: Box::new(self) }
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {value}")))
    }
}
