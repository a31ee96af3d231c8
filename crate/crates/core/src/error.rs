use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("source and observation points coincide (separation {separation:e} λ); use the self-term path")]
    CoincidentPoints { separation: f64 },

    #[error("dipole orientation is not a unit vector (norm {norm})")]
    InvalidDipole { norm: f64 },

    #[error("decay rates must be positive (gamma11 = {gamma11}, gamma22 = {gamma22})")]
    NonPositiveDecay { gamma11: f64, gamma22: f64 },

    #[error(
        "solver inconsistency: |gamma12| = {gamma12} exceeds sqrt(gamma11 * gamma22) = {bound}"
    )]
    InconsistentCouplings { gamma12: f64, bound: f64 },

    #[error("dense operator would have {unknowns} unknowns (limit {limit}); use the iterative path")]
    DenseTooLarge { unknowns: usize, limit: usize },

    #[error("Krylov solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("time propagation did not reach a steady state by t = {t_max} (|dρ/dt| = {derivative:e})")]
    PropagationNotConverged { t_max: f64, derivative: f64 },

    #[error("steady state is not unique: Liouvillian kernel has dimension {kernel_dim}")]
    MultipleSteadyStates { kernel_dim: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Strips iteration context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Iteration { source, .. } => source.root(),
            other => other,
        }
    }
}
