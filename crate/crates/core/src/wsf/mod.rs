//! Weighted subspace fitting: cost, analytic derivatives and the delay
//! estimator built on them.

mod esprit;
mod objective;
mod solver;

pub use esprit::esprit_phases;
pub use objective::{
    projector_complement, wsf_cost, wsf_gradient, wsf_hessian_limit, SteeringGrid, WsfObjective,
};
pub(crate) use objective::{hadamard_re, pinv};
pub use solver::{estimate_delays, estimate_from_covariance, fit_subspace, FitResult, SolverOptions};

use serde::{Deserialize, Serialize};

use crate::subspace::SubspaceDecomposition;

/// Choice of the diagonal weighting matrix `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeightingMode {
    /// `W = I`
    #[default]
    Identity,
    /// `W = Lambda_s + sigma_n^2 I`, with `Lambda_s` the noise-free signal
    /// eigenvalues; equal to the full top-`P` eigenvalues of `R`.
    Eigen,
}

impl std::str::FromStr for WeightingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" => Ok(Self::Identity),
            "eigen" => Ok(Self::Eigen),
            other => Err(format!("unknown weighting '{other}' (expected identity|eigen)")),
        }
    }
}

/// A weighting mode together with its realized diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Weighting {
    pub mode: WeightingMode,
    pub diag: Vec<f64>,
}

impl Weighting {
    pub fn identity(p: usize) -> Self {
        Self {
            mode: WeightingMode::Identity,
            diag: vec![1.0; p],
        }
    }

    /// `Lambda_s + sigma_n^2 I` from noise-free eigenvalues and noise power.
    pub fn eigen(excess_values: &[f64], noise_power: f64) -> Self {
        Self {
            mode: WeightingMode::Eigen,
            diag: excess_values.iter().map(|l| l + noise_power).collect(),
        }
    }

    pub fn for_decomposition(mode: WeightingMode, decomp: &SubspaceDecomposition) -> Self {
        match mode {
            WeightingMode::Identity => Self::identity(decomp.rank()),
            WeightingMode::Eigen => Self::eigen(&decomp.excess_values(), decomp.noise_power),
        }
    }

    /// Same mode with every weight multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            mode: self.mode,
            diag: self.diag.iter().map(|w| w * c).collect(),
        }
    }
}
