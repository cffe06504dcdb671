use crate::error::{Error, Result};
use crate::linalg::{CMatrix, RMatrix, RVector};
use crate::model::{BandPlan, SnapshotSet};
use crate::subspace::{eigendecompose, sample_covariance, BlockHankelConfig, SubspaceDecomposition};

use super::{esprit_phases, SteeringGrid, Weighting, WeightingMode, WsfObjective};

/// Outcome of one delay fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Estimated phases, ascending.
    pub phases: Vec<f64>,
    /// `phases / omega_s` in seconds, ascending.
    pub delays: Vec<f64>,
    pub cost: f64,
    pub initial_cost: f64,
    /// Accepted steps.
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
}

/// Stopping rules for the damped Newton iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Converged once the proposed step is below this (radians, max-norm).
    pub step_tolerance: f64,
    /// Cap on Newton system solves, accepted or not.
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            step_tolerance: 1e-12,
            max_iterations: 100,
        }
    }
}

/// Minimizes the WSF cost over a subspace, starting from `init` or from the
/// ESPRIT estimate.
pub fn fit_subspace(
    decomp: &SubspaceDecomposition,
    plan: &BandPlan,
    cfg: &BlockHankelConfig,
    weighting: &Weighting,
    init: Option<&[f64]>,
    opts: SolverOptions,
) -> Result<FitResult> {
    let start = match init {
        Some(x) => {
            if x.len() != decomp.rank() {
                return Err(Error::Dimension(format!(
                    "{} initial phases for a rank-{} subspace",
                    x.len(),
                    decomp.rank()
                )));
            }
            x.to_vec()
        }
        None => esprit_phases(&decomp.signal_vectors, cfg.rows(), plan.band_offsets())?,
    };
    let objective = WsfObjective::new(
        SteeringGrid::new(plan, cfg),
        &decomp.signal_vectors,
        &weighting.diag,
    )?;
    let mut fit = minimize(&objective, start, opts)?;
    fit.delays = fit.phases.iter().map(|&p| plan.delay_of(p)).collect();
    Ok(fit)
}

/// Damped Newton on `J`. The curvature is the central difference of the
/// analytic gradient when that is positive definite, else the large-sample
/// Hessian. Steps are only accepted when the cost does not increase.
fn minimize(objective: &WsfObjective, start: Vec<f64>, opts: SolverOptions) -> Result<FitResult> {
    let mut phases = start;
    let mut cost = objective.cost(&phases)?;
    let initial_cost = cost;
    let mut damping = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    let mut gradient = objective.gradient(&phases)?;
    let mut hessian = curvature(objective, &phases)?;

    for _ in 0..opts.max_iterations {
        let step = match newton_step(&hessian, &gradient, damping) {
            Some(s) => s,
            None => {
                damping = next_damping(damping, &hessian);
                continue;
            }
        };
        if step.amax() < opts.step_tolerance {
            converged = true;
            break;
        }
        let trial: Vec<f64> = phases.iter().zip(step.iter()).map(|(p, s)| p + s).collect();
        let trial_cost = match objective.cost(&trial) {
            Ok(c) if c.is_finite() => c,
            Ok(_) | Err(Error::DuplicatePhases(_)) | Err(Error::RankDeficient(_)) => {
                damping = next_damping(damping, &hessian);
                continue;
            }
            Err(e) => return Err(e),
        };
        if trial_cost <= cost {
            phases = trial;
            cost = trial_cost;
            iterations += 1;
            damping = if damping > 0.0 { damping / 10.0 } else { 0.0 };
            gradient = objective.gradient(&phases)?;
            hessian = curvature(objective, &phases)?;
        } else {
            damping = next_damping(damping, &hessian);
        }
    }

    let mut order: Vec<usize> = (0..phases.len()).collect();
    order.sort_by(|&a, &b| phases[a].total_cmp(&phases[b]));
    let sorted = order.iter().map(|&i| phases[i]).collect();
    Ok(FitResult {
        phases: sorted,
        delays: Vec::new(),
        cost,
        initial_cost,
        iterations,
        converged,
        gradient_norm: gradient.norm(),
    })
}

fn curvature(objective: &WsfObjective, phases: &[f64]) -> Result<RMatrix> {
    let p = phases.len();
    let h = 1e-6;
    let mut fd = RMatrix::zeros(p, p);
    let mut x = phases.to_vec();
    for j in 0..p {
        x[j] = phases[j] + h;
        let up = objective.gradient(&x);
        x[j] = phases[j] - h;
        let down = objective.gradient(&x);
        x[j] = phases[j];
        match (up, down) {
            (Ok(u), Ok(d)) => fd.set_column(j, &((u - d) / (2.0 * h))),
            _ => return objective.hessian_limit(phases),
        }
    }
    let fd = (&fd + fd.transpose()) * 0.5;
    if fd.iter().all(|v| v.is_finite()) && fd.clone().cholesky().is_some() {
        Ok(fd)
    } else {
        objective.hessian_limit(phases)
    }
}

fn next_damping(current: f64, hessian: &RMatrix) -> f64 {
    let floor = 1e-6 * hessian.trace().abs().max(f64::MIN_POSITIVE);
    (current * 10.0).max(floor)
}

/// Solves `(H + damping I) step = -g`; adds Levenberg damping when `H` is not
/// positive definite.
fn newton_step(hessian: &RMatrix, gradient: &RVector, damping: f64) -> Option<RVector> {
    let p = hessian.nrows();
    let mut m = hessian + RMatrix::identity(p, p) * damping;
    if let Some(ch) = m.clone().cholesky() {
        return Some(-ch.solve(gradient));
    }
    if damping == 0.0 {
        m += RMatrix::identity(p, p) * next_damping(0.0, hessian);
        return m.cholesky().map(|ch| -ch.solve(gradient));
    }
    None
}

/// Fits delays to a covariance matrix.
pub fn estimate_from_covariance(
    r: &CMatrix,
    plan: &BandPlan,
    cfg: &BlockHankelConfig,
    mode: WeightingMode,
    init: Option<&[f64]>,
) -> Result<FitResult> {
    let decomp = eigendecompose(r, cfg.clusters())?;
    let weighting = Weighting::for_decomposition(mode, &decomp);
    fit_subspace(&decomp, plan, cfg, &weighting, init, SolverOptions::default())
}

/// Sample covariance, subspace split and WSF fit of a snapshot set.
pub fn estimate_delays(
    snapshots: &SnapshotSet,
    cfg: &BlockHankelConfig,
    mode: WeightingMode,
    init: Option<&[f64]>,
) -> Result<FitResult> {
    let r = sample_covariance(snapshots, cfg)?;
    estimate_from_covariance(&r, &snapshots.band_plan, cfg, mode, init)
}
