use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multiband frequency sampling grid.
///
/// Band `i` covers subcarriers `omega_0 + (n + n_i) * omega_s` for
/// `n = 0..N`. All phases are measured relative to `omega_0`, so the grid
/// exponent of subcarrier `n` in band `i` is `n + n_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPlan {
    num_subcarriers: usize,
    subcarrier_spacing: f64,
    base_frequency: f64,
    band_offsets: Vec<usize>,
}

impl BandPlan {
    /// `subcarrier_spacing` and `base_frequency` are angular (rad/s).
    pub fn new(
        num_subcarriers: usize,
        subcarrier_spacing: f64,
        base_frequency: f64,
        band_offsets: Vec<usize>,
    ) -> Result<Self> {
        if num_subcarriers == 0 {
            return Err(Error::BandPlan("need at least one subcarrier".into()));
        }
        if !(subcarrier_spacing.is_finite() && subcarrier_spacing > 0.0) {
            return Err(Error::BandPlan(format!(
                "subcarrier spacing must be positive, got {subcarrier_spacing}"
            )));
        }
        if !base_frequency.is_finite() || base_frequency < 0.0 {
            return Err(Error::BandPlan(format!(
                "base frequency must be nonnegative, got {base_frequency}"
            )));
        }
        match band_offsets.first() {
            None => return Err(Error::BandPlan("need at least one band".into())),
            Some(&n0) if n0 != 0 => {
                return Err(Error::BandPlan(format!("first band offset must be 0, got {n0}")))
            }
            _ => {}
        }
        if band_offsets.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::BandPlan(format!(
                "band offsets must be strictly increasing: {band_offsets:?}"
            )));
        }
        Ok(Self {
            num_subcarriers,
            subcarrier_spacing,
            base_frequency,
            band_offsets,
        })
    }

    /// Builds a plan from band centers in MHz. The subcarrier spacing is
    /// `bandwidth / N`, and every center must be an integer multiple of it.
    pub fn from_centers_mhz(
        num_subcarriers: usize,
        bandwidth_mhz: f64,
        centers_mhz: &[f64],
    ) -> Result<Self> {
        if num_subcarriers == 0 {
            return Err(Error::BandPlan("need at least one subcarrier".into()));
        }
        if !(bandwidth_mhz.is_finite() && bandwidth_mhz > 0.0) {
            return Err(Error::BandPlan(format!(
                "bandwidth must be positive, got {bandwidth_mhz} MHz"
            )));
        }
        let spacing_mhz = bandwidth_mhz / num_subcarriers as f64;
        let mut grid = Vec::with_capacity(centers_mhz.len());
        for &c in centers_mhz {
            let k = c / spacing_mhz;
            if !c.is_finite() || c < 0.0 || (k - k.round()).abs() > 1e-9 * k.abs().max(1.0) {
                return Err(Error::BandPlan(format!(
                    "band center {c} MHz is not on the {spacing_mhz} MHz subcarrier grid"
                )));
            }
            grid.push(k.round() as i64);
        }
        let first = *grid
            .first()
            .ok_or_else(|| Error::BandPlan("need at least one band".into()))?;
        let offsets = grid
            .iter()
            .map(|&g| usize::try_from(g - first))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::BandPlan("band centers must be ascending".into()))?;
        let to_rad = 2.0 * PI * 1e6;
        Self::new(
            num_subcarriers,
            spacing_mhz * to_rad,
            centers_mhz[0] * to_rad,
            offsets,
        )
    }

    pub fn num_bands(&self) -> usize {
        self.band_offsets.len()
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    /// Angular subcarrier spacing `omega_s` (rad/s).
    pub fn subcarrier_spacing(&self) -> f64 {
        self.subcarrier_spacing
    }

    pub fn base_frequency(&self) -> f64 {
        self.base_frequency
    }

    pub fn band_offsets(&self) -> &[usize] {
        &self.band_offsets
    }

    /// `B = N * omega_s` (rad/s).
    pub fn bandwidth(&self) -> f64 {
        self.num_subcarriers as f64 * self.subcarrier_spacing
    }

    /// Bandwidth in Hz.
    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth() / (2.0 * PI)
    }

    /// `omega_i = omega_0 + n_i * omega_s`.
    pub fn band_center(&self, band: usize) -> f64 {
        self.base_frequency + self.band_offsets[band] as f64 * self.subcarrier_spacing
    }

    /// Length of the stacked multiband vector, `N * L`.
    pub fn len(&self) -> usize {
        self.num_subcarriers * self.num_bands()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid exponents `n + n_i` for `rows_per_band` subcarriers of every band,
    /// in block order.
    pub fn exponents(&self, rows_per_band: usize) -> Vec<f64> {
        self.band_offsets
            .iter()
            .flat_map(|&ni| (0..rows_per_band).map(move |n| (n + ni) as f64))
            .collect()
    }

    /// Exponents for the full `N`-subcarrier grid.
    pub fn full_exponents(&self) -> Vec<f64> {
        self.exponents(self.num_subcarriers)
    }

    /// Largest grid exponent `N - 1 + n_{L-1}`.
    pub fn max_exponent(&self) -> usize {
        self.num_subcarriers - 1 + self.band_offsets.last().copied().unwrap_or(0)
    }

    /// Phase `omega_s * tau` of a delay in seconds.
    pub fn phase_of(&self, delay_s: f64) -> f64 {
        self.subcarrier_spacing * delay_s
    }

    /// Delay in seconds of a phase.
    pub fn delay_of(&self, phase: f64) -> f64 {
        phase / self.subcarrier_spacing
    }
}
