use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("metric is not positive definite")]
    SingularMetric,

    /// The monad degenerates at the evaluation point.
    #[error("singular point {point:?}: sigma_min(alpha) = {sigma_alpha:.3e}, sigma_min(beta*) = {sigma_beta:.3e}")]
    SingularPoint {
        point: [f64; 6],
        sigma_alpha: f64,
        sigma_beta: f64,
    },

    #[error("stencil evaluation failed: {0}")]
    Stencil(String),

    #[error("holomorphic frame degenerates at {0:?}")]
    DegenerateFrame([f64; 6]),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("time step {dt:.4e} exceeds the stability bound {limit:.4e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("positivity lost at node {node} (step {step}): eigenvalues {eigenvalues:?}")]
    PositivityLoss {
        node: usize,
        step: usize,
        eigenvalues: [f64; 2],
    },

    #[error("node budget exceeded: {nodes} > {budget}")]
    Budget { nodes: usize, budget: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status: 2 for usage, configuration and I/O problems, 3 for numerical aborts.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_)
            | Error::InvalidInput(_)
            | Error::Resolution(_)
            | Error::Budget { .. } => 2,
            _ => 3,
        }
    }
}
