#![allow(dead_code)]

use mpcbias_core::bias::{build_perturbation, PerturbationModel};
use mpcbias_core::linalg::CMatrix;
use mpcbias_core::{BandPlan, BlockHankelConfig, ClusteredChannel};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn plan() -> BandPlan {
    BandPlan::from_centers_mhz(12, 12.0, &[10.0, 50.0, 80.0, 150.0]).unwrap()
}

pub fn scenario1(second_ns: f64) -> ClusteredChannel {
    ClusteredChannel::from_powers(&[
        (vec![1.0, 0.5], vec![5e-9, second_ns * 1e-9]),
        (vec![0.85, 0.55, 0.35], vec![33e-9, 33.5e-9, 34e-9]),
        (vec![0.55], vec![95e-9]),
    ])
    .unwrap()
}

pub fn hankel_for(ch: &ClusteredChannel) -> BlockHankelConfig {
    BlockHankelConfig::with_default_rows(12, ch.num_components(), ch.num_clusters()).unwrap()
}

pub fn model_for(ch: &ClusteredChannel, noise: f64) -> PerturbationModel {
    let plan = plan();
    build_perturbation(&ch.cluster_approx(&plan), &plan, &hankel_for(ch), noise).unwrap()
}

/// Three clusters with random anchors (at least 15 ns apart), powers and
/// small intra-cluster spreads.
pub fn random_channel(rng: &mut ChaCha8Rng) -> ClusteredChannel {
    let mut anchor = rng.random_range(2.0..10.0);
    let mut layout = Vec::new();
    for _ in 0..3 {
        let k = rng.random_range(1..=3usize);
        let mut powers = vec![rng.random_range(0.5..1.5)];
        let mut delays = vec![anchor * 1e-9];
        let mut d = anchor;
        for _ in 1..k {
            d += rng.random_range(0.05..0.6);
            powers.push(rng.random_range(0.1..0.8));
            delays.push(d * 1e-9);
        }
        layout.push((powers, delays));
        anchor = d + rng.random_range(15.0..40.0);
    }
    ClusteredChannel::from_powers(&layout).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `rows x cols` matrix with orthonormal columns.
pub fn random_orthonormal(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    let m = CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    m.qr().q()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let den = b.iter().map(|y| y.abs()).fold(0.0, f64::max);
    num / den.max(f64::MIN_POSITIVE)
}
