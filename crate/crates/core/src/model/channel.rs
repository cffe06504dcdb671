use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use super::BandPlan;
use crate::error::{Error, Result};
use crate::linalg::CVector;

/// A single multipath component: complex gain and delay in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mpc {
    pub gain: Complex64,
    pub delay: f64,
}

impl Mpc {
    pub fn new(gain: Complex64, delay: f64) -> Self {
        Self { gain, delay }
    }

    /// Zero-phase component with the given power `|alpha|^2`.
    pub fn from_power(power: f64, delay: f64) -> Self {
        Self::new(Complex64::new(power.max(0.0).sqrt(), 0.0), delay)
    }
}

/// Components with nearly equal delays. The first component is the anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    components: Vec<Mpc>,
}

impl Cluster {
    pub fn new(components: Vec<Mpc>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Channel("cluster has no components".into()));
        }
        for c in &components {
            if !c.delay.is_finite() || c.delay < 0.0 {
                return Err(Error::Channel(format!("invalid delay {} s", c.delay)));
            }
            if !c.gain.re.is_finite() || !c.gain.im.is_finite() {
                return Err(Error::Channel("non-finite gain".into()));
            }
        }
        if components.windows(2).any(|w| w[1].delay < w[0].delay) {
            return Err(Error::Channel(
                "delays within a cluster must be nondecreasing".into(),
            ));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[Mpc] {
        &self.components
    }

    pub fn anchor(&self) -> &Mpc {
        &self.components[0]
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `sigma_p^2 = sum_k |alpha_{p,k}|^2`
    pub fn power(&self) -> f64 {
        self.components.iter().map(|c| c.gain.norm_sqr()).sum()
    }

    fn last_delay(&self) -> f64 {
        self.components[self.components.len() - 1].delay
    }
}

/// Non-fatal channel conditions.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelWarning {
    /// Clusters `p` and `p + 1` are closer than `1 / B`.
    ClustersUnresolvable { cluster: usize, gap_s: f64, resolution_s: f64 },
    /// Two distinct delays map to the same phase on the grid.
    AliasedDelays { first_s: f64, second_s: f64 },
}

impl fmt::Display for ChannelWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ClustersUnresolvable { cluster, gap_s, resolution_s } => write!(
                f,
                "clusters {} and {} are separated by {:.3} ns, below the {:.3} ns resolution",
                cluster,
                cluster + 1,
                gap_s * 1e9,
                resolution_s * 1e9
            ),
            Self::AliasedDelays { first_s, second_s } => write!(
                f,
                "delays {:.3} ns and {:.3} ns alias to the same grid phase",
                first_s * 1e9,
                second_s * 1e9
            ),
        }
    }
}

/// Clustered multipath channel (ground truth).
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredChannel {
    clusters: Vec<Cluster>,
}

impl ClusteredChannel {
    pub fn new(clusters: Vec<Cluster>) -> Result<Self> {
        if clusters.is_empty() {
            return Err(Error::Channel("channel has no clusters".into()));
        }
        Ok(Self { clusters })
    }

    /// Builds a zero-phase channel from per-cluster `|alpha|^2` and delays in
    /// seconds.
    pub fn from_powers(clusters: &[(Vec<f64>, Vec<f64>)]) -> Result<Self> {
        let mut out = Vec::with_capacity(clusters.len());
        for (p, (powers, delays)) in clusters.iter().enumerate() {
            if powers.len() != delays.len() {
                return Err(Error::Channel(format!(
                    "cluster {p}: {} powers but {} delays",
                    powers.len(),
                    delays.len()
                )));
            }
            if let Some(bad) = powers.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(Error::Channel(format!("cluster {p}: invalid power {bad}")));
            }
            out.push(Cluster::new(
                powers
                    .iter()
                    .zip(delays)
                    .map(|(&pw, &d)| Mpc::from_power(pw, d))
                    .collect(),
            )?);
        }
        Self::new(out)
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    /// Total number of components `K`.
    pub fn num_components(&self) -> usize {
        self.clusters.iter().map(Cluster::len).sum()
    }

    pub fn iter_components(&self) -> impl Iterator<Item = &Mpc> {
        self.clusters.iter().flat_map(|c| c.components.iter())
    }

    /// Anchor delays `tau_{p,1}` in seconds.
    pub fn anchor_delays(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.anchor().delay).collect()
    }

    /// Returns a copy with every gain multiplied by the matching factor
    /// (flattened component order).
    pub fn with_gain_factors(&self, factors: &[Complex64]) -> Self {
        let mut it = factors.iter();
        let clusters = self
            .clusters
            .iter()
            .map(|c| Cluster {
                components: c
                    .components
                    .iter()
                    .map(|m| Mpc::new(m.gain * it.next().copied().unwrap_or(Complex64::new(1.0, 0.0)), m.delay))
                    .collect(),
            })
            .collect();
        Self { clusters }
    }

    /// Scales every gain by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        self.with_gain_factors(&vec![c; self.num_components()])
    }

    /// Checks the aliasing guard and reports resolvability warnings.
    pub fn check(&self, plan: &BandPlan) -> Result<Vec<ChannelWarning>> {
        for (p, cl) in self.clusters.iter().enumerate() {
            for (k, c) in cl.components.iter().enumerate() {
                let phase = plan.phase_of(c.delay);
                if !(0.0..2.0 * PI).contains(&phase) {
                    return Err(Error::Aliasing {
                        cluster: p,
                        component: k,
                        delay_s: c.delay,
                        phase,
                    });
                }
            }
        }
        let mut warnings = Vec::new();
        let resolution = 1.0 / plan.bandwidth_hz();
        for (p, w) in self.clusters.windows(2).enumerate() {
            let gap = w[1].anchor().delay - w[0].last_delay();
            if gap < resolution {
                warnings.push(ChannelWarning::ClustersUnresolvable {
                    cluster: p,
                    gap_s: gap,
                    resolution_s: resolution,
                });
            }
        }
        let delays: Vec<f64> = self.iter_components().map(|c| c.delay).collect();
        let period = 2.0 * PI / plan.subcarrier_spacing();
        for i in 0..delays.len() {
            for j in i + 1..delays.len() {
                let diff = (delays[j] - delays[i]).abs();
                if diff > 0.0 && (diff / period - (diff / period).round()).abs() < 1e-12 {
                    warnings.push(ChannelWarning::AliasedDelays {
                        first_s: delays[i],
                        second_s: delays[j],
                    });
                }
            }
        }
        Ok(warnings)
    }

    /// First-order cluster description used by the bias analysis.
    pub fn cluster_approx(&self, plan: &BandPlan) -> ClusterApprox {
        ClusterApprox::new(self, plan)
    }
}

/// Per-cluster quantities of the first-order steering expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterApprox {
    /// Anchor phases `phi_{p,1}`.
    pub anchor_phases: Vec<f64>,
    /// `alpha_p = sum_k alpha_{p,k}`.
    pub lumped_gains: Vec<Complex64>,
    /// `gamma_p = sum_{k>=2} alpha_{p,k} dphi_{p,k} / alpha_p` (zero when `alpha_p = 0`).
    pub gamma: Vec<Complex64>,
    /// `e_p = sum_{k>=2} |alpha_{p,k}|^2 dphi_{p,k}`.
    pub e: Vec<f64>,
    /// `sigma_p^2 = sum_k |alpha_{p,k}|^2`.
    pub cluster_powers: Vec<f64>,
}

impl ClusterApprox {
    pub fn new(channel: &ClusteredChannel, plan: &BandPlan) -> Self {
        let ws = plan.subcarrier_spacing();
        let mut out = Self {
            anchor_phases: Vec::with_capacity(channel.num_clusters()),
            lumped_gains: Vec::new(),
            gamma: Vec::new(),
            e: Vec::new(),
            cluster_powers: Vec::new(),
        };
        for cl in channel.clusters() {
            let anchor = cl.anchor().delay;
            let mut lumped = Complex64::new(0.0, 0.0);
            let mut weighted = Complex64::new(0.0, 0.0);
            let mut e = 0.0;
            for (k, c) in cl.components().iter().enumerate() {
                lumped += c.gain;
                if k > 0 {
                    let dphi = ws * (c.delay - anchor);
                    weighted += c.gain * dphi;
                    e += c.gain.norm_sqr() * dphi;
                }
            }
            out.anchor_phases.push(ws * anchor);
            out.lumped_gains.push(lumped);
            out.gamma.push(if lumped.norm() > 0.0 {
                weighted / lumped
            } else {
                Complex64::new(0.0, 0.0)
            });
            out.e.push(e);
            out.cluster_powers.push(cl.power());
        }
        out
    }

    pub fn num_clusters(&self) -> usize {
        self.anchor_phases.len()
    }
}

/// Noiseless multiband frequency response, phases relative to `omega_0`.
pub fn exact_frequency_response(channel: &ClusteredChannel, plan: &BandPlan) -> Result<CVector> {
    channel.check(plan)?;
    Ok(response_unchecked(channel, plan))
}

pub(crate) fn response_unchecked(channel: &ClusteredChannel, plan: &BandPlan) -> CVector {
    let exps = plan.full_exponents();
    let ws = plan.subcarrier_spacing();
    let mut h = CVector::zeros(exps.len());
    for c in channel.iter_components() {
        let phi = ws * c.delay;
        for (hk, &e) in h.iter_mut().zip(&exps) {
            *hk += c.gain * Complex64::from_polar(1.0, -phi * e);
        }
    }
    h
}
