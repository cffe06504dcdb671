use thiserror::Error;

/// Errors produced by the estimation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid band plan: {0}")]
    BandPlan(String),

    #[error("invalid channel: {0}")]
    Channel(String),

    #[error("delay {delay_s:e} s (cluster {cluster}, component {component}) maps to phase {phase} rad outside [0, 2pi)")]
    Aliasing {
        cluster: usize,
        component: usize,
        delay_s: f64,
        phase: f64,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid Hankel configuration: {0}")]
    HankelConfig(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("matrix is rank deficient: {0}")]
    RankDeficient(String),

    #[error("duplicate phases {0} rad collapse the steering matrix")]
    DuplicatePhases(f64),

    #[error("eigenvalues {lambda_i} and {lambda_p} are too close for first-order perturbation")]
    NearDegenerate { lambda_i: f64, lambda_p: f64 },

    #[error("cluster {0} has zero power")]
    ZeroClusterPower(usize),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("initializer failed: {0}")]
    Initializer(String),

    #[error("no converged trials")]
    NoConvergedTrials,

    #[error("empty input: {0}")]
    Empty(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("sweep point {sweep_index}, trial {trial_index}: {source}")]
    Trial {
        sweep_index: usize,
        trial_index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
