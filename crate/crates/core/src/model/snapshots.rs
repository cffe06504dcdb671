use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::channel::response_unchecked;
use super::{BandPlan, ClusteredChannel};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// How MPC gain phases evolve across snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GainPhaseMode {
    /// Gains used as given; every snapshot sees the same channel.
    Fixed,
    /// One uniform random phase per MPC, shared by all snapshots of a set.
    PerTrial,
    /// Independent uniform random phase per MPC and snapshot (WSSUS).
    #[default]
    PerSnapshot,
}

/// Noisy multiband measurements, one snapshot per column.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSet {
    pub data: CMatrix,
    pub noise_power: f64,
    pub band_plan: BandPlan,
    pub seed: u64,
}

impl SnapshotSet {
    pub fn num_snapshots(&self) -> usize {
        self.data.ncols()
    }
}

/// Draws `count` snapshots `h + q_s`, with `q_s` circular complex Gaussian of
/// variance `noise_power` per entry. Deterministic given `seed`.
pub fn synthesize_snapshots(
    channel: &ClusteredChannel,
    plan: &BandPlan,
    count: usize,
    noise_power: f64,
    seed: u64,
    phases: GainPhaseMode,
) -> Result<SnapshotSet> {
    if count == 0 {
        return Err(Error::Empty("snapshot count must be at least 1".into()));
    }
    if !noise_power.is_finite() || noise_power < 0.0 {
        return Err(Error::Config(format!("noise power must be nonnegative, got {noise_power}")));
    }
    channel.check(plan)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = channel.num_components();
    let draw_phases = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
        (0..k)
            .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)))
            .collect()
    };
    let fixed = match phases {
        GainPhaseMode::Fixed => Some(response_unchecked(channel, plan)),
        GainPhaseMode::PerTrial => {
            let f = draw_phases(&mut rng);
            Some(response_unchecked(&channel.with_gain_factors(&f), plan))
        }
        GainPhaseMode::PerSnapshot => None,
    };
    let rows = plan.len();
    let std = (noise_power / 2.0).sqrt();
    let mut data = CMatrix::zeros(rows, count);
    for s in 0..count {
        let h = match &fixed {
            Some(h) => h.clone(),
            None => {
                let f = draw_phases(&mut rng);
                response_unchecked(&channel.with_gain_factors(&f), plan)
            }
        };
        for r in 0..rows {
            let noise = if noise_power > 0.0 {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * std, im * std)
            } else {
                Complex64::new(0.0, 0.0)
            };
            data[(r, s)] = h[r] + noise;
        }
    }
    Ok(SnapshotSet {
        data,
        noise_power,
        band_plan: plan.clone(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::exact_frequency_response;

    fn setup() -> (ClusteredChannel, BandPlan) {
        let plan = BandPlan::from_centers_mhz(12, 12.0, &[10.0, 50.0, 80.0, 150.0]).unwrap();
        let ch = ClusteredChannel::from_powers(&[
            (vec![1.0, 0.5], vec![5e-9, 6e-9]),
            (vec![0.85, 0.55, 0.35], vec![33e-9, 33.5e-9, 34e-9]),
            (vec![0.55], vec![95e-9]),
        ])
        .unwrap();
        (ch, plan)
    }

    #[test]
    fn noiseless_fixed_columns_equal_response() {
        let (ch, plan) = setup();
        let h = exact_frequency_response(&ch, &plan).unwrap();
        let s = synthesize_snapshots(&ch, &plan, 5, 0.0, 7, GainPhaseMode::Fixed).unwrap();
        for c in 0..5 {
            assert_eq!(s.data.column(c), h.column(0));
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let (ch, plan) = setup();
        for mode in [GainPhaseMode::Fixed, GainPhaseMode::PerTrial, GainPhaseMode::PerSnapshot] {
            let a = synthesize_snapshots(&ch, &plan, 8, 0.3, 42, mode).unwrap();
            let b = synthesize_snapshots(&ch, &plan, 8, 0.3, 42, mode).unwrap();
            assert_eq!(a, b);
            let c = synthesize_snapshots(&ch, &plan, 8, 0.3, 43, mode).unwrap();
            assert_ne!(a.data, c.data);
        }
    }

    #[test]
    fn noise_variance_law_of_large_numbers() {
        let plan = BandPlan::new(4, 1.0, 0.0, vec![0, 3]).unwrap();
        let ch = ClusteredChannel::from_powers(&[(vec![0.0], vec![0.0])]).unwrap();
        let s = synthesize_snapshots(&ch, &plan, 10_000, 0.7, 1, GainPhaseMode::Fixed).unwrap();
        for r in 0..plan.len() {
            let row = s.data.row(r);
            let mean_sq: f64 = row.iter().map(|z| z.norm_sqr()).sum::<f64>() / 10_000.0;
            assert!((mean_sq - 0.7).abs() < 0.05 * 0.7, "row {r}: {mean_sq}");
        }
    }

    #[test]
    fn per_trial_phases_shared_across_snapshots() {
        let (ch, plan) = setup();
        let s = synthesize_snapshots(&ch, &plan, 3, 0.0, 9, GainPhaseMode::PerTrial).unwrap();
        assert_eq!(s.data.column(0), s.data.column(2));
        let s = synthesize_snapshots(&ch, &plan, 3, 0.0, 9, GainPhaseMode::PerSnapshot).unwrap();
        assert_ne!(s.data.column(0), s.data.column(1));
    }

    #[test]
    fn rejects_empty_and_negative_noise() {
        let (ch, plan) = setup();
        assert!(synthesize_snapshots(&ch, &plan, 0, 0.0, 0, GainPhaseMode::Fixed).is_err());
        assert!(synthesize_snapshots(&ch, &plan, 1, -1.0, 0, GainPhaseMode::Fixed).is_err());
    }
}
