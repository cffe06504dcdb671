//! First-order analysis of the delay bias caused by unresolved multipath
//! components.
//!
//! Intra-cluster spread perturbs the covariance by
//! `E = A diag(e) D^H + D diag(e) A^H`. The signal subspace moves to first
//! order in `E`, which shifts the gradient of the WSF cost at the true anchor
//! phases; the bias is `|H^{-1} J'|` with `H` the large-sample Hessian.
//!
//! Eigenvalues written `Lambda_s` here are the noise-free signal eigenvalues
//! `lambda_i - sigma_n^2` (see [`SubspaceDecomposition::excess_values`]).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_part, hpd_inverse, real_diag, real_inverse, CMatrix, CVector, RMatrix, RVector,
};
use crate::model::{steering_from_exponents, BandPlan, ClusterApprox, ClusteredChannel};
use crate::subspace::{eigendecompose, BlockHankelConfig, SubspaceDecomposition};
use crate::wsf::{
    hadamard_re, pinv,
    estimate_from_covariance, projector_complement, SteeringGrid, Weighting, WeightingMode,
    WsfObjective,
};

/// Covariance model of a clustered channel around its anchor phases.
#[derive(Debug, Clone)]
pub struct PerturbationModel {
    pub anchor_phases: Vec<f64>,
    /// Reduced steering matrix `A` at the anchors.
    pub steering: CMatrix,
    /// Its derivative `D`.
    pub derivative: CMatrix,
    pub e: Vec<f64>,
    /// Diagonal of `R_alpha`.
    pub cluster_powers: Vec<f64>,
    pub noise_power: f64,
    /// `E`, Hermitian.
    pub perturbation: CMatrix,
    pub subcarrier_spacing: f64,
    grid: SteeringGrid,
}

impl PerturbationModel {
    pub fn num_clusters(&self) -> usize {
        self.anchor_phases.len()
    }

    pub fn grid(&self) -> &SteeringGrid {
        &self.grid
    }

    /// Same geometry with `e` replaced (and `E` rebuilt).
    pub fn with_e(&self, e: Vec<f64>) -> Self {
        let perturbation = assemble_perturbation(&self.steering, &self.derivative, &e);
        Self {
            e,
            perturbation,
            ..self.clone()
        }
    }

    /// `A R_alpha A^H + sigma_n^2 I`
    pub fn unperturbed_covariance(&self) -> CMatrix {
        let a = &self.steering;
        let n = a.nrows();
        hermitian_part(
            &(a * real_diag(&self.cluster_powers) * a.adjoint()
                + CMatrix::identity(n, n) * Complex64::new(self.noise_power, 0.0)),
        )
    }

    /// Reference decomposition of the unperturbed covariance.
    pub fn reference_decomposition(&self) -> Result<SubspaceDecomposition> {
        eigendecompose(&self.unperturbed_covariance(), self.num_clusters())
    }

    fn gram_inverse(&self) -> Result<CMatrix> {
        hpd_inverse(&(self.steering.adjoint() * &self.steering), "steering matrix")
    }

    /// `D^H P_A^perp D`
    fn projected_derivative_gram(&self) -> Result<CMatrix> {
        let proj = projector_complement(&self.steering)?;
        Ok(self.derivative.adjoint() * proj * &self.derivative)
    }
}

fn assemble_perturbation(a: &CMatrix, d: &CMatrix, e: &[f64]) -> CMatrix {
    let de = real_diag(e);
    let half = a * &de * d.adjoint();
    &half + half.adjoint()
}

/// Builds `A`, `D` and `E` at the anchor phases. Second-order terms in the
/// intra-cluster phase offsets are dropped.
pub fn build_perturbation(
    approx: &ClusterApprox,
    plan: &BandPlan,
    cfg: &BlockHankelConfig,
    noise_power: f64,
) -> Result<PerturbationModel> {
    if approx.num_clusters() != cfg.clusters() {
        return Err(Error::Dimension(format!(
            "{} clusters in the channel, {} in the Hankel configuration",
            approx.num_clusters(),
            cfg.clusters()
        )));
    }
    let grid = SteeringGrid::new(plan, cfg);
    let (a, d) = grid.matrices(&approx.anchor_phases)?;
    let perturbation = assemble_perturbation(&a, &d, &approx.e);
    Ok(PerturbationModel {
        anchor_phases: approx.anchor_phases.clone(),
        steering: a,
        derivative: d,
        e: approx.e.clone(),
        cluster_powers: approx.cluster_powers.clone(),
        noise_power,
        perturbation,
        subcarrier_spacing: plan.subcarrier_spacing(),
        grid,
    })
}

/// `A R_alpha A^H + E + sigma_n^2 I`
pub fn model_covariance(model: &PerturbationModel) -> CMatrix {
    hermitian_part(&(model.unperturbed_covariance() + &model.perturbation))
}

/// Covariance of the reduced Hankel rows without the first-order expansion:
/// `sum_{p,k} |alpha_{p,k}|^2 a_M(phi_{p,k}) a_M(phi_{p,k})^H + sigma_n^2 I`.
///
/// This is the expectation of [`crate::subspace::sample_covariance`] under
/// independent uniform gain phases.
pub fn exact_covariance(
    channel: &ClusteredChannel,
    plan: &BandPlan,
    cfg: &BlockHankelConfig,
    noise_power: f64,
) -> CMatrix {
    let exps = plan.exponents(cfg.rows());
    let n = exps.len();
    let mut r = CMatrix::identity(n, n) * Complex64::new(noise_power, 0.0);
    for c in channel.iter_components() {
        let a: CVector = steering_from_exponents(plan.phase_of(c.delay), &exps);
        r += &a * a.adjoint() * Complex64::new(c.gain.norm_sqr(), 0.0);
    }
    hermitian_part(&r)
}

/// First-order perturbed signal subspace `U_s + U_e`.
pub fn perturbed_subspace_first_order(
    decomp: &SubspaceDecomposition,
    perturbation: &CMatrix,
) -> Result<CMatrix> {
    Ok(&decomp.signal_vectors + subspace_perturbation(decomp, perturbation)?)
}

/// `U_e`: for column `i`, `sum_{p != i} rho_{i,p} u_{s,p} + sum_m beta_{i,m} u_{n,m}`
/// with `rho_{i,p} = u_{s,p}^H E u_{s,i} / (lambda_i - lambda_p)` and
/// `beta_{i,m} = u_{n,m}^H E u_{s,i} / (lambda_i - sigma_n^2)`.
pub fn subspace_perturbation(decomp: &SubspaceDecomposition, e: &CMatrix) -> Result<CMatrix> {
    let us = &decomp.signal_vectors;
    let un = &decomp.noise_vectors;
    let lambda = &decomp.signal_values;
    let excess = decomp.excess_values();
    let p = decomp.rank();
    let tol = 1e-12 * lambda[0].abs().max(f64::MIN_POSITIVE);
    let eus = e * us;
    let signal_coupling = us.adjoint() * &eus;
    let noise_coupling = un.adjoint() * &eus;
    let mut ue = CMatrix::zeros(us.nrows(), p);
    for i in 0..p {
        if excess[i] <= tol {
            return Err(Error::NearDegenerate {
                lambda_i: lambda[i],
                lambda_p: decomp.noise_power,
            });
        }
        let mut col = un * noise_coupling.column(i) / Complex64::new(excess[i], 0.0);
        for k in 0..p {
            if k == i {
                continue;
            }
            let gap = lambda[i] - lambda[k];
            if gap.abs() <= tol {
                return Err(Error::NearDegenerate {
                    lambda_i: lambda[i],
                    lambda_p: lambda[k],
                });
            }
            col += us.column(k) * (signal_coupling[(k, i)] / gap);
        }
        ue.set_column(i, &col);
    }
    Ok(ue)
}

fn minus_two_re_diag(m: &CMatrix) -> RVector {
    let p = m.nrows().min(m.ncols());
    RVector::from_iterator(p, (0..p).map(|i| -2.0 * m[(i, i)].re))
}

/// Gradient at the anchors for a general diagonal weighting:
/// `-2 Re diag[A^+ U_s W Lambda_s^{-1} U_s^H A diag(e) D^H P^perp D]`.
pub fn bias_gradient_general(
    model: &PerturbationModel,
    decomp: &SubspaceDecomposition,
    weighting: &Weighting,
) -> Result<RVector> {
    let excess = decomp.excess_values();
    if let Some(bad) = excess.iter().find(|&&l| l <= 0.0) {
        return Err(Error::Singular(format!("nonpositive signal eigenvalue {bad}")));
    }
    let ratio: Vec<f64> = weighting
        .diag
        .iter()
        .zip(&excess)
        .map(|(w, l)| w / l)
        .collect();
    let us = &decomp.signal_vectors;
    let inner = us * real_diag(&ratio) * us.adjoint();
    let m = pinv(&model.steering)?
        * inner
        * &model.steering
        * real_diag(&model.e)
        * model.projected_derivative_gram()?;
    Ok(minus_two_re_diag(&m))
}

fn inverse_powers(model: &PerturbationModel) -> Result<Vec<f64>> {
    model
        .cluster_powers
        .iter()
        .enumerate()
        .map(|(p, &s)| {
            if s > 0.0 {
                Ok(1.0 / s)
            } else {
                Err(Error::ZeroClusterPower(p))
            }
        })
        .collect()
}

/// Gradient for `W = I`:
/// `-2 Re diag[(A^H A)^{-1} diag(e / sigma_alpha) D^H P^perp D]`.
pub fn bias_gradient_identity(model: &PerturbationModel) -> Result<RVector> {
    let inv = inverse_powers(model)?;
    let scaled: Vec<f64> = inv.iter().zip(&model.e).map(|(s, e)| s * e).collect();
    let m = model.gram_inverse()? * real_diag(&scaled) * model.projected_derivative_gram()?;
    Ok(minus_two_re_diag(&m))
}

/// Gradient for `W = Lambda_s + sigma_n^2 I`:
/// `-2 Re diag[(I + sigma_n^2 (A^H A)^{-1} diag(1 / sigma_alpha)) diag(e) D^H P^perp D]`.
pub fn bias_gradient_eigweight(model: &PerturbationModel) -> Result<RVector> {
    let inv = inverse_powers(model)?;
    let p = model.num_clusters();
    let factor = CMatrix::identity(p, p)
        + model.gram_inverse()? * real_diag(&inv) * Complex64::new(model.noise_power, 0.0);
    let m = factor * real_diag(&model.e) * model.projected_derivative_gram()?;
    Ok(minus_two_re_diag(&m))
}

/// Large-sample Hessian for `W = I` at the anchors:
/// `2 Re{[D^H P^perp D] .* [(A^H A)^{-1}]^T}`.
pub fn hessian_identity(model: &PerturbationModel) -> Result<RMatrix> {
    Ok(hadamard_re(
        &model.projected_derivative_gram()?,
        &model.gram_inverse()?,
    ))
}

/// Which closed-form gradient produced a bias prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientForm {
    /// Arbitrary diagonal weighting, evaluated through the reference subspace.
    General,
    /// `W = I`, expressed through cluster powers.
    Identity,
    /// `W = Lambda_s + sigma_n^2 I`, expressed through cluster powers.
    EigenWeighted,
}

/// Predicted first-order bias of the anchor phases.
#[derive(Debug, Clone)]
pub struct BiasReport {
    /// `-H^{-1} J'`: signed first-order error `phi_hat - phi_0`.
    pub signed_phase: RVector,
    /// `|H^{-1} J'|`
    pub bias_phase: RVector,
    /// `bias_phase / omega_s` (seconds).
    pub bias_delay: RVector,
    /// `signed_phase / omega_s` (seconds).
    pub signed_delay: RVector,
    pub gradient: RVector,
    pub gradient_form: GradientForm,
    pub hessian: RMatrix,
    pub weighting: Weighting,
}

/// `|H^{-1} J'|` at the anchors for the given weighting.
pub fn predict_bias(
    model: &PerturbationModel,
    decomp: &SubspaceDecomposition,
    mode: WeightingMode,
) -> Result<BiasReport> {
    let weighting = Weighting::for_decomposition(mode, decomp);
    let (gradient, gradient_form, hessian) = match mode {
        WeightingMode::Identity => (
            bias_gradient_identity(model)?,
            GradientForm::Identity,
            hessian_identity(model)?,
        ),
        WeightingMode::Eigen => {
            let objective =
                WsfObjective::new(model.grid.clone(), &decomp.signal_vectors, &weighting.diag)?;
            (
                bias_gradient_eigweight(model)?,
                GradientForm::EigenWeighted,
                objective.hessian_limit(&model.anchor_phases)?,
            )
        }
    };
    let hinv = real_inverse(&hessian, "large-sample Hessian")?;
    let signed_phase = -(hinv * &gradient);
    let bias_phase = signed_phase.abs();
    let ws = model.subcarrier_spacing;
    Ok(BiasReport {
        bias_delay: &bias_phase / ws,
        signed_delay: &signed_phase / ws,
        signed_phase,
        bias_phase,
        gradient,
        gradient_form,
        hessian,
        weighting,
    })
}

/// Gradient forms along the first-order derivation chain, and the gaps
/// between consecutive forms.
#[derive(Debug, Clone)]
pub struct ChainDiagnostics {
    /// Full WSF gradient with `U_E = U_s + U_e`.
    pub full: RVector,
    /// Only the terms linear in `U_e`: `U_s W U_e^H + U_e W U_s^H`.
    pub cross_terms: RVector,
    /// `A^+ U_s W Lambda_s^{-1} U_s^H E P^perp D`.
    pub noise_projected: RVector,
    /// `E` replaced by its `A diag(e) D^H` half.
    pub simplified: RVector,
    pub full_vs_cross: f64,
    pub cross_vs_noise_projected: f64,
    pub noise_projected_vs_simplified: f64,
    pub full_vs_simplified: f64,
    /// Norm of the `D diag(e) A^H` half after projection (zero in exact
    /// arithmetic).
    pub annihilated_norm: f64,
}

/// Evaluates every step of the gradient simplification for the given model.
pub fn gradient_chain_check(
    model: &PerturbationModel,
    decomp: &SubspaceDecomposition,
    weighting: &Weighting,
) -> Result<ChainDiagnostics> {
    let a = &model.steering;
    let d = &model.derivative;
    let proj = projector_complement(a)?;
    let ap = pinv(a)?;
    let us = &decomp.signal_vectors;
    let w = real_diag(&weighting.diag);
    let ue = subspace_perturbation(decomp, &model.perturbation)?;
    let ue_full = us + &ue;

    let grad_of = |s: &CMatrix| minus_two_re_diag(&(&ap * s * &proj * d));

    let full = grad_of(&(&ue_full * &w * ue_full.adjoint()));
    let cross_terms = grad_of(&(us * &w * ue.adjoint() + &ue * &w * us.adjoint()));

    let excess = decomp.excess_values();
    let ratio: Vec<f64> = weighting
        .diag
        .iter()
        .zip(&excess)
        .map(|(wi, l)| wi / l)
        .collect();
    let left = us * real_diag(&ratio) * us.adjoint();
    let noise_projected = grad_of(&(&left * &model.perturbation));
    let de = real_diag(&model.e);
    let simplified = grad_of(&(&left * a * &de * d.adjoint()));
    let annihilated = &ap * &left * d * &de * a.adjoint() * &proj * d;
    let annihilated_norm = crate::linalg::fro(&annihilated);

    let gap = |x: &RVector, y: &RVector| (x - y).amax();
    Ok(ChainDiagnostics {
        full_vs_cross: gap(&full, &cross_terms),
        cross_vs_noise_projected: gap(&cross_terms, &noise_projected),
        noise_projected_vs_simplified: gap(&noise_projected, &simplified),
        full_vs_simplified: gap(&full, &simplified),
        full,
        cross_terms,
        noise_projected,
        simplified,
        annihilated_norm,
    })
}

/// Noiseless WSF estimate on [`exact_covariance`] minus the anchor phases.
pub fn empirical_phase_bias(
    channel: &ClusteredChannel,
    plan: &BandPlan,
    cfg: &BlockHankelConfig,
    mode: WeightingMode,
) -> Result<Vec<f64>> {
    let r = exact_covariance(channel, plan, cfg, 0.0);
    let approx = channel.cluster_approx(plan);
    let fit = estimate_from_covariance(&r, plan, cfg, mode, Some(&approx.anchor_phases))?;
    Ok(fit
        .phases
        .iter()
        .zip(&approx.anchor_phases)
        .map(|(est, truth)| est - truth)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::fro;

    fn plan() -> BandPlan {
        BandPlan::from_centers_mhz(12, 12.0, &[10.0, 50.0, 80.0, 150.0]).unwrap()
    }

    fn scenario1(second_ns: f64) -> ClusteredChannel {
        ClusteredChannel::from_powers(&[
            (vec![1.0, 0.5], vec![5e-9, second_ns * 1e-9]),
            (vec![0.85, 0.55, 0.35], vec![33e-9, 33.5e-9, 34e-9]),
            (vec![0.55], vec![95e-9]),
        ])
        .unwrap()
    }

    fn model_for(ch: &ClusteredChannel, noise: f64) -> PerturbationModel {
        let plan = plan();
        let cfg = BlockHankelConfig::with_default_rows(12, ch.num_components(), ch.num_clusters()).unwrap();
        build_perturbation(&ch.cluster_approx(&plan), &plan, &cfg, noise).unwrap()
    }

    #[test]
    fn singleton_channel_has_no_perturbation_or_bias() {
        let ch = ClusteredChannel::from_powers(&[
            (vec![1.0], vec![5e-9]),
            (vec![0.5], vec![33e-9]),
            (vec![0.3], vec![95e-9]),
        ])
        .unwrap();
        let m = model_for(&ch, 0.01);
        assert_eq!(fro(&m.perturbation), 0.0);
        let d = m.reference_decomposition().unwrap();
        for mode in [WeightingMode::Identity, WeightingMode::Eigen] {
            let r = predict_bias(&m, &d, mode).unwrap();
            assert!(r.bias_phase.iter().all(|&b| b == 0.0), "{mode:?}");
        }
    }

    #[test]
    fn single_cluster_perturbation_structure() {
        let ch = ClusteredChannel::from_powers(&[(vec![1.0, 0.5], vec![5e-9, 6e-9])]).unwrap();
        let plan = plan();
        let cfg = BlockHankelConfig::new(12, 7, 2, 1).unwrap();
        let m = build_perturbation(&ch.cluster_approx(&plan), &plan, &cfg, 0.0).unwrap();
        let a = m.steering.column(0).into_owned();
        let d = m.derivative.column(0).into_owned();
        let want = (&a * d.adjoint() + &d * a.adjoint()) * Complex64::new(m.e[0], 0.0);
        assert!(fro(&(&m.perturbation - want)) < 1e-12 * fro(&m.perturbation));
        let sv = m.perturbation.clone().svd(false, false).singular_values;
        assert!(sv.iter().skip(2).all(|&s| s < 1e-10 * sv[0]));
        assert!(fro(&(&m.perturbation - m.perturbation.adjoint())) == 0.0);
    }

    #[test]
    fn rank_one_model_covariance() {
        let ch = ClusteredChannel::from_powers(&[(vec![1.0], vec![5e-9])]).unwrap();
        let plan = plan();
        let cfg = BlockHankelConfig::new(12, 7, 1, 1).unwrap();
        let m = build_perturbation(&ch.cluster_approx(&plan), &plan, &cfg, 0.0).unwrap();
        let r = model_covariance(&m);
        let a = m.steering.column(0).into_owned();
        assert!(fro(&(r - &a * a.adjoint())) < 1e-12);
    }

    #[test]
    fn first_order_subspace_zero_and_linear() {
        let m = model_for(&scenario1(6.0), 0.0);
        let d = m.reference_decomposition().unwrap();
        let zero = CMatrix::zeros(m.perturbation.nrows(), m.perturbation.ncols());
        let ue0 = perturbed_subspace_first_order(&d, &zero).unwrap();
        assert_eq!(ue0, d.signal_vectors);
        let full = subspace_perturbation(&d, &m.perturbation).unwrap();
        let half = subspace_perturbation(&d, &(&m.perturbation * Complex64::new(0.5, 0.0))).unwrap();
        assert!(fro(&(full * Complex64::new(0.5, 0.0) - half)) < 1e-12);
    }

    #[test]
    fn degenerate_reference_is_rejected() {
        // two clusters of equal power and orthogonal steering give equal eigenvalues
        let r = real_diag(&[2.0, 2.0, 0.0, 0.0]);
        let d = eigendecompose(&r, 2).unwrap();
        let e = CMatrix::from_fn(4, 4, |i, k| Complex64::new((i + k) as f64, 0.0));
        assert!(matches!(
            subspace_perturbation(&d, &e),
            Err(Error::NearDegenerate { .. })
        ));
    }

    #[test]
    fn gradient_forms_vanish_without_spread() {
        let m = model_for(&scenario1(6.0), 0.01);
        let m0 = m.with_e(vec![0.0; 3]);
        let d = m0.reference_decomposition().unwrap();
        assert_eq!(bias_gradient_identity(&m0).unwrap().amax(), 0.0);
        assert_eq!(bias_gradient_eigweight(&m0).unwrap().amax(), 0.0);
        let g = bias_gradient_general(&m0, &d, &Weighting::identity(3)).unwrap();
        assert_eq!(g.amax(), 0.0);
        let diag = gradient_chain_check(&m0, &d, &Weighting::identity(3)).unwrap();
        assert!(diag.full_vs_simplified < 1e-12 * diag.full.len() as f64 * 1e3, "{diag:?}");
        assert_eq!(diag.simplified.amax(), 0.0);
        assert_eq!(diag.annihilated_norm, 0.0);
    }

    #[test]
    fn identity_gradient_scaling() {
        let m = model_for(&scenario1(6.0), 0.0);
        let g = bias_gradient_identity(&m).unwrap();
        let mut doubled = m.clone();
        doubled.cluster_powers.iter_mut().for_each(|s| *s *= 2.0);
        let g2 = bias_gradient_identity(&doubled).unwrap();
        assert!((g.scale(0.5) - g2).amax() < 1e-12 * g.amax());
        // doubling the only intra-cluster offset doubles e and the gradient
        let spread = |ns: f64| {
            ClusteredChannel::from_powers(&[
                (vec![1.0, 0.5], vec![5e-9, ns * 1e-9]),
                (vec![0.85], vec![33e-9]),
                (vec![0.55], vec![95e-9]),
            ])
            .unwrap()
        };
        let m1 = model_for(&spread(6.0), 0.0);
        let m2 = model_for(&spread(7.0), 0.0);
        assert!((m2.e[0] - 2.0 * m1.e[0]).abs() < 1e-15);
        let g1 = bias_gradient_identity(&m1).unwrap();
        let g2 = bias_gradient_identity(&m2).unwrap();
        assert!((g2 - g1.scale(2.0)).amax() < 1e-9 * g1.amax());
    }

    #[test]
    fn eigweight_gradient_without_noise() {
        let m = model_for(&scenario1(6.0), 0.0);
        let g = bias_gradient_eigweight(&m).unwrap();
        let want = minus_two_re_diag(&(real_diag(&m.e) * m.projected_derivative_gram().unwrap()));
        assert!((g - &want).amax() < 1e-12 * want.amax());
    }

    #[test]
    fn zero_cluster_power_rejected() {
        let mut m = model_for(&scenario1(6.0), 0.0);
        m.cluster_powers[1] = 0.0;
        assert!(matches!(bias_gradient_identity(&m), Err(Error::ZeroClusterPower(1))));
    }

    #[test]
    fn identity_hessian_single_cluster_closed_form() {
        let ch = ClusteredChannel::from_powers(&[(vec![1.0, 0.5], vec![5e-9, 6e-9])]).unwrap();
        let plan = plan();
        let cfg = BlockHankelConfig::new(12, 7, 2, 1).unwrap();
        let m = build_perturbation(&ch.cluster_approx(&plan), &plan, &cfg, 0.0).unwrap();
        let h = hessian_identity(&m).unwrap();
        let a = m.steering.column(0).into_owned();
        let d = m.derivative.column(0).into_owned();
        let proj = projector_complement(&m.steering).unwrap();
        let dpd = (d.adjoint() * proj * &d)[(0, 0)].re;
        let want = 2.0 * dpd / a.norm_squared();
        assert!(h[(0, 0)] > 0.0);
        assert!((h[(0, 0)] - want).abs() < 1e-10 * want);
        // a single cluster is shifted to its power-weighted mean phase
        let r = predict_bias(&m, &m.reference_decomposition().unwrap(), WeightingMode::Identity).unwrap();
        assert!((r.signed_phase[0] - m.e[0] / 1.5).abs() < 1e-12);
    }

    #[test]
    fn bias_increases_with_spread() {
        let mut last = 0.0;
        for ns in [6.0, 6.5, 7.0, 8.0] {
            let m = model_for(&scenario1(ns), 0.0);
            let d = m.reference_decomposition().unwrap();
            let r = predict_bias(&m, &d, WeightingMode::Identity).unwrap();
            assert!(r.bias_delay[0] > last);
            assert!(r.bias_delay.iter().all(|&b| b >= 0.0));
            last = r.bias_delay[0];
        }
    }
}
