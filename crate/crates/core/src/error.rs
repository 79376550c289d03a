use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{func}: argument outside domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("lattice covolume {det} violates the unit-covolume invariant")]
    Covolume { det: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("enumeration would visit more than {cap} nodes (radius {radius})")]
    ResourceCap { cap: u64, radius: f64 },

    #[error("requested volume {requested} exceeds enumerated cutoff {vmax}")]
    CutoffExceeded { requested: f64, vmax: f64 },

    #[error("tail bound {achieved:e} did not reach tolerance {tol:e}")]
    Tolerance { achieved: f64, tol: f64 },

    #[error("quadrature did not converge (error estimate {estimate:e})")]
    Quadrature { estimate: f64 },

    #[error("pole of the Epstein zeta function at s = n/2")]
    Pole,

    #[error("too few samples: need at least {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("unknown experiment '{0}'")]
    UnknownExperiment(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain { func, detail: detail.into() }
}
