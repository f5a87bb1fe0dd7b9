use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("flat simplex")]
    FlatSimplex,
    #[error("degenerate simplex")]
    DegenerateSimplex,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("empty point set")]
    EmptyPointSet,
    #[error("no points")]
    NoPoints,
    #[error("periodic integrity failure: {what} (expected {expected}, found {found})")]
    PeriodicIntegrity {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("threshold monotonicity violated: {0}")]
    ThresholdMonotonicity(String),
    #[error("non-manifold input: {0}")]
    NonManifold(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("not tabulated: rho_{k} is only tabulated for k = 1..=5")]
    NotTabulated { k: usize },
    #[error("no asymptotic available for d = {dim}, k = {k}")]
    NoAsymptotic { dim: usize, k: usize },
    #[error("unknown density {0:?}")]
    UnknownDensity(String),
    #[error("quadrature did not converge (achieved error estimate {achieved:e})")]
    Quadrature { achieved: f64 },
    #[error("asymptotics mismatch: closed route {closed}, numeric route {numeric}")]
    AsymptoticsMismatch { closed: f64, numeric: f64 },
    #[error("too few surviving tetrahedra ({0})")]
    TooFewTetrahedra(usize),
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error("window too low: {0}")]
    WindowTooLow(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("Euler identity violated at alpha = {alpha}: simplices give {from_counts}, marks give {from_marks}")]
    EulerIdentity {
        alpha: f64,
        from_counts: i64,
        from_marks: i64,
    },
    #[error("realization {index} (seed {seed}, stream {index}): {source}")]
    Realization {
        index: u64,
        seed: u64,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl fmt::Display) -> Self {
        Error::InvalidParameter(msg.to_string())
    }
}
