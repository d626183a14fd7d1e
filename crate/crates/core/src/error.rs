use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },

    /// Poisson-Dirichlet parameters outside `0 <= alpha < 1`, `theta > -alpha`.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("operation needs at least one observation, got the empty partition")]
    EmptyPartition,

    #[error("invalid partition counts: {0}")]
    InvalidCounts(String),

    #[error("invalid ranked masses: {0}")]
    InvalidMasses(String),

    #[error("tail mass {tail:e} exceeds the simulation limit {limit:e}")]
    TailTooLarge { tail: f64, limit: f64 },

    #[error(
        "stick-breaking hit the cap of {cap} sticks with remaining mass {remaining:e} \
         above tail_eps {target:e}; use a larger tail_eps for these parameters"
    )]
    StickCapReached {
        cap: usize,
        remaining: f64,
        target: f64,
    },

    #[error("{0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
