//! Fixtures shared by the benchmarks.

use mpcbias_core::{
    synthesize_snapshots, BandPlan, BlockHankelConfig, ClusteredChannel, GainPhaseMode, SnapshotSet,
};

pub fn band_plan() -> BandPlan {
    BandPlan::from_centers_mhz(12, 12.0, &[10.0, 50.0, 80.0, 150.0]).expect("valid plan")
}

/// Three-cluster channel with the second LOS-cluster MPC at `second_ns`.
pub fn channel(second_ns: f64) -> ClusteredChannel {
    ClusteredChannel::from_powers(&[
        (vec![1.0, 0.5], vec![5e-9, second_ns * 1e-9]),
        (vec![0.85, 0.55, 0.35], vec![33e-9, 33.5e-9, 34e-9]),
        (vec![0.55], vec![95e-9]),
    ])
    .expect("valid channel")
}

pub fn hankel(channel: &ClusteredChannel) -> BlockHankelConfig {
    BlockHankelConfig::with_default_rows(12, channel.num_components(), channel.num_clusters())
        .expect("valid Hankel size")
}

/// 32 snapshots at the given SNR against the LOS-cluster power.
pub fn snapshots(channel: &ClusteredChannel, snr_db: f64, seed: u64) -> SnapshotSet {
    let noise = channel.clusters()[0].power() / 10f64.powf(snr_db / 10.0);
    synthesize_snapshots(channel, &band_plan(), 32, noise, seed, GainPhaseMode::PerSnapshot)
        .expect("valid snapshot request")
}
