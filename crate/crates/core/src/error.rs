use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("hex layout with {0} rings exceeds the supported maximum of 20")]
    TooManyRings(usize),

    #[error("cell {cell} holds {count} active users but the pilot length supports only {limit}")]
    CellOverload {
        cell: usize,
        count: usize,
        limit: usize,
    },

    #[error("density {value:e} at ({x:.1}, {y:.1}) lies outside the declared bounds [{lower:e}, {upper:e}]")]
    DensityBounds {
        x: f64,
        y: f64,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("pilot length {0} is not prime")]
    NonPrimePilotLength(usize),

    #[error("{cells} cells need distinct Zadoff-Chu roots but length {len} offers only {available}")]
    NotEnoughRoots {
        cells: usize,
        len: usize,
        available: usize,
    },

    #[error("block range {start}..={end} is outside 0..={blocks}")]
    BlockRange {
        start: usize,
        end: usize,
        blocks: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{0} is not Hermitian positive definite")]
    NotPositiveDefinite(&'static str),

    #[error("probability {0} is outside (0, 1)")]
    Probability(f64),

    #[error("rate threshold undefined: Q^-1(eps)*sqrt(V) + M = {0:e} is not positive")]
    UndefinedThreshold(f64),

    #[error("pathloss exponent {0} <= 2 makes the interference integral diverge")]
    DivergentTail(f64),

    #[error("large-scale coefficients of the user triple are not pairwise distinct")]
    DuplicateCoefficients,

    #[error("extrapolation system is ill-conditioned (condition number {0:.3e})")]
    IllConditioned(f64),

    #[error("statistics unavailable: {0}")]
    Unavailable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::TooManyRings(_)
            | Error::NonPrimePilotLength(_)
            | Error::NotEnoughRoots { .. }
            | Error::DensityBounds { .. }
            | Error::Io(_)
            | Error::Json(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
