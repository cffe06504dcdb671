//! Multiband weighted subspace fitting for time-of-arrival estimation in
//! clustered multipath channels, with a first-order analysis of the delay
//! bias caused by unresolved components.

pub mod bias;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod scenario;
pub mod subspace;
pub mod wsf;

pub use error::{Error, Result};
pub use model::{
    exact_frequency_response, steering_derivative, steering_vector, synthesize_snapshots,
    BandPlan, ClusterApprox, ClusteredChannel, GainPhaseMode, SnapshotSet,
};
pub use subspace::{block_hankel, eigendecompose, sample_covariance, BlockHankelConfig, SubspaceDecomposition};
pub use wsf::{estimate_delays, FitResult, Weighting, WeightingMode};
