//! Multiband frequency grid, clustered channel, steering vectors and snapshot
//! synthesis.

mod band;
mod channel;
mod snapshots;
mod steering;

pub use band::BandPlan;
pub use channel::{
    exact_frequency_response, Cluster, ClusterApprox, ClusteredChannel, ChannelWarning, Mpc,
};
pub use snapshots::{synthesize_snapshots, GainPhaseMode, SnapshotSet};
pub use steering::{steering_derivative, steering_from_exponents, steering_vector, derivative_from_exponents};
