//! CRLB variance floor, predicted RMSE and Monte-Carlo error statistics.

use crate::error::{Error, Result};
use crate::linalg::{real_diag, real_inverse, CMatrix, RVector};
use crate::wsf::{hadamard_re, projector_complement, FitResult};

/// Deterministic CRB on the phases:
/// `sigma_n^2 / (2T) * {Re[(D^H P_A^perp D) .* R_alpha^T]}^{-1}_pp`.
pub fn crlb_phase_variance(
    a: &CMatrix,
    d: &CMatrix,
    cluster_powers: &[f64],
    noise_power: f64,
    effective_snapshots: f64,
) -> Result<RVector> {
    let p = a.ncols();
    if d.shape() != a.shape() || cluster_powers.len() != p {
        return Err(Error::Dimension(format!(
            "A is {:?}, D is {:?}, {} cluster powers",
            a.shape(),
            d.shape(),
            cluster_powers.len()
        )));
    }
    if effective_snapshots.is_nan() || effective_snapshots <= 0.0 {
        return Err(Error::Config(format!(
            "effective snapshot count must be positive, got {effective_snapshots}"
        )));
    }
    let proj = projector_complement(a)?;
    let g = d.adjoint() * proj * d;
    // hadamard_re gives 2 Re{X .* Y^T}
    let info = hadamard_re(&g, &real_diag(cluster_powers)) * 0.5;
    let inv = real_inverse(&info, "CRLB information matrix")?;
    let scale = noise_power / (2.0 * effective_snapshots);
    Ok(RVector::from_iterator(p, (0..p).map(|i| scale * inv[(i, i)])))
}

/// `sqrt(var + bias^2)`
pub fn predicted_rmse(bias: f64, crlb_var: f64) -> f64 {
    (crlb_var + bias * bias).sqrt()
}

/// One Monte-Carlo estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialEstimate {
    pub delays: Vec<f64>,
    pub converged: bool,
}

impl From<&FitResult> for TrialEstimate {
    fn from(fit: &FitResult) -> Self {
        Self {
            delays: fit.delays.clone(),
            converged: fit.converged,
        }
    }
}

/// Pairs estimates with true delays, closest pairs first. Entry `j` is the
/// index of the estimate assigned to `truth[j]`.
pub fn greedy_match(estimates: &[f64], truth: &[f64]) -> Vec<Option<usize>> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(estimates.len() * truth.len());
    for (i, e) in estimates.iter().enumerate() {
        for (j, t) in truth.iter().enumerate() {
            pairs.push(((e - t).abs(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used = vec![false; estimates.len()];
    let mut out = vec![None; truth.len()];
    for (_, i, j) in pairs {
        if !used[i] && out[j].is_none() {
            used[i] = true;
            out[j] = Some(i);
        }
    }
    out
}

/// Running error moments; merging is a plain sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorAccumulator {
    pub sum: f64,
    pub sum_sq: f64,
    pub used: usize,
    pub excluded: usize,
}

impl ErrorAccumulator {
    pub fn push(&mut self, estimate: &TrialEstimate, truth: &[f64], component: usize) {
        let matched = if estimate.converged {
            greedy_match(&estimate.delays, truth)
                .get(component)
                .copied()
                .flatten()
        } else {
            None
        };
        match matched {
            Some(i) => {
                let err = estimate.delays[i] - truth[component];
                self.sum += err;
                self.sum_sq += err * err;
                self.used += 1;
            }
            None => self.excluded += 1,
        }
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
            used: self.used + other.used,
            excluded: self.excluded + other.excluded,
        }
    }

    pub fn trials(&self) -> usize {
        self.used + self.excluded
    }

    pub fn finish(&self) -> Result<EmpiricalError> {
        if self.used == 0 {
            return Err(Error::NoConvergedTrials);
        }
        let n = self.used as f64;
        Ok(EmpiricalError {
            rmse: (self.sum_sq / n).sqrt(),
            mean: self.sum / n,
            used: self.used,
            excluded: self.excluded,
            exclusion_rate: self.excluded as f64 / self.trials() as f64,
        })
    }
}

/// Empirical error of one component over a batch of trials (seconds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalError {
    pub rmse: f64,
    pub mean: f64,
    pub used: usize,
    pub excluded: usize,
    pub exclusion_rate: f64,
}

/// RMSE of `truth[component]` after greedy association; non-converged
/// trials are excluded and counted.
pub fn empirical_rmse(
    estimates: &[TrialEstimate],
    truth: &[f64],
    component: usize,
) -> Result<EmpiricalError> {
    if estimates.is_empty() {
        return Err(Error::Empty("no trials".into()));
    }
    if component >= truth.len() {
        return Err(Error::Dimension(format!(
            "component {component} of {} true delays",
            truth.len()
        )));
    }
    let mut acc = ErrorAccumulator::default();
    for est in estimates {
        acc.push(est, truth, component);
    }
    acc.finish()
}

/// One sweep point, all quantities in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricPoint {
    pub sweep: f64,
    pub rmse_empirical: Option<f64>,
    /// Mean signed error of the converged trials.
    pub bias_empirical: Option<f64>,
    pub rmse_predicted: f64,
    pub bias_predicted: f64,
    pub crlb_std: f64,
    /// Fraction of trials excluded as non-converged.
    pub excluded: Option<f64>,
}

impl MetricPoint {
    /// Analytic columns only; `rmse_predicted` is built from the other two.
    pub fn analytic(sweep: f64, bias: f64, crlb_var: f64) -> Self {
        Self {
            sweep,
            rmse_empirical: None,
            bias_empirical: None,
            rmse_predicted: predicted_rmse(bias, crlb_var),
            bias_predicted: bias,
            crlb_std: crlb_var.sqrt(),
            excluded: None,
        }
    }

    pub fn with_empirical(mut self, emp: &EmpiricalError) -> Self {
        self.rmse_empirical = Some(emp.rmse);
        self.bias_empirical = Some(emp.mean);
        self.excluded = Some(emp.exclusion_rate);
        self
    }
}

/// Metrics along one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub points: Vec<MetricPoint>,
    pub trials: usize,
}
