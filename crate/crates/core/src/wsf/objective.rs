use crate::error::{Error, Result};
use crate::linalg::{hpd_inverse, real_diag, CMatrix, RMatrix, RVector};
use crate::model::{derivative_from_exponents, steering_from_exponents, BandPlan};
use crate::subspace::BlockHankelConfig;

/// Exponent table of the reduced (`M` rows per band) steering vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringGrid {
    exponents: Vec<f64>,
}

impl SteeringGrid {
    pub fn new(plan: &BandPlan, cfg: &BlockHankelConfig) -> Self {
        Self {
            exponents: plan.exponents(cfg.rows()),
        }
    }

    pub fn from_exponents(exponents: Vec<f64>) -> Self {
        Self { exponents }
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// Reduced steering matrix `A` (`LM x P`) and its derivative matrix `D`.
    pub fn matrices(&self, phases: &[f64]) -> Result<(CMatrix, CMatrix)> {
        for i in 0..phases.len() {
            for j in i + 1..phases.len() {
                if (phases[i] - phases[j]).abs() < 1e-12 {
                    return Err(Error::DuplicatePhases(phases[i]));
                }
            }
        }
        let n = self.dim();
        let mut a = CMatrix::zeros(n, phases.len());
        let mut d = CMatrix::zeros(n, phases.len());
        for (p, &phi) in phases.iter().enumerate() {
            a.set_column(p, &steering_from_exponents(phi, &self.exponents));
            d.set_column(p, &derivative_from_exponents(phi, &self.exponents));
        }
        Ok((a, d))
    }
}

/// `I - A (A^H A)^{-1} A^H`.
pub fn projector_complement(a: &CMatrix) -> Result<CMatrix> {
    let gram_inv = hpd_inverse(&(a.adjoint() * a), "steering matrix")?;
    let n = a.nrows();
    Ok(CMatrix::identity(n, n) - a * gram_inv * a.adjoint())
}

/// Pseudoinverse of a full-column-rank matrix.
pub(crate) fn pinv(a: &CMatrix) -> Result<CMatrix> {
    Ok(hpd_inverse(&(a.adjoint() * a), "steering matrix")? * a.adjoint())
}

/// `J(phi) = tr{P_A^perp(phi) U W U^H}` with its analytic derivatives.
///
/// The target `U W U^H` is formed once; the derivatives are
/// `J' = -2 Re diag(A^+ S P^perp D)` and the large-sample Hessian
/// `2 Re{(D^H P^perp D) .* (A^+ S A^+^H)^T}`.
#[derive(Debug, Clone)]
pub struct WsfObjective {
    grid: SteeringGrid,
    target: CMatrix,
}

impl WsfObjective {
    pub fn new(grid: SteeringGrid, subspace: &CMatrix, weights: &[f64]) -> Result<Self> {
        if subspace.nrows() != grid.dim() {
            return Err(Error::Dimension(format!(
                "subspace has {} rows, steering grid has {}",
                subspace.nrows(),
                grid.dim()
            )));
        }
        if weights.len() != subspace.ncols() {
            return Err(Error::Dimension(format!(
                "{} weights for {} subspace columns",
                weights.len(),
                subspace.ncols()
            )));
        }
        let target = subspace * real_diag(weights) * subspace.adjoint();
        Ok(Self { grid, target })
    }

    pub fn grid(&self) -> &SteeringGrid {
        &self.grid
    }

    pub fn cost(&self, phases: &[f64]) -> Result<f64> {
        let (a, _) = self.grid.matrices(phases)?;
        let proj = projector_complement(&a)?;
        Ok((proj * &self.target).trace().re)
    }

    pub fn gradient(&self, phases: &[f64]) -> Result<RVector> {
        let (a, d) = self.grid.matrices(phases)?;
        let proj = projector_complement(&a)?;
        let m = pinv(&a)? * &self.target * proj * d;
        Ok(RVector::from_iterator(
            phases.len(),
            (0..phases.len()).map(|p| -2.0 * m[(p, p)].re),
        ))
    }

    pub fn hessian_limit(&self, phases: &[f64]) -> Result<RMatrix> {
        let (a, d) = self.grid.matrices(phases)?;
        let proj = projector_complement(&a)?;
        let ap = pinv(&a)?;
        let left = d.adjoint() * proj * d;
        let right = &ap * &self.target * ap.adjoint();
        Ok(hadamard_re(&left, &right))
    }
}

/// `2 Re{X .* Y^T}`
pub(crate) fn hadamard_re(x: &CMatrix, y: &CMatrix) -> RMatrix {
    let p = x.nrows();
    let mut h = RMatrix::from_fn(p, p, |i, k| 2.0 * (x[(i, k)] * y[(k, i)]).re);
    // symmetric in exact arithmetic
    let ht = h.transpose();
    h = (h + ht) * 0.5;
    h
}

fn objective(grid: &SteeringGrid, subspace: &CMatrix, weights: &[f64]) -> Result<WsfObjective> {
    WsfObjective::new(grid.clone(), subspace, weights)
}

/// `tr{P_A^perp(phi) U_E W U_E^H}`.
pub fn wsf_cost(phases: &[f64], grid: &SteeringGrid, subspace: &CMatrix, weights: &[f64]) -> Result<f64> {
    objective(grid, subspace, weights)?.cost(phases)
}

/// Gradient of [`wsf_cost`] with respect to the phases.
pub fn wsf_gradient(
    phases: &[f64],
    grid: &SteeringGrid,
    subspace: &CMatrix,
    weights: &[f64],
) -> Result<RVector> {
    objective(grid, subspace, weights)?.gradient(phases)
}

/// Large-sample Hessian of [`wsf_cost`].
pub fn wsf_hessian_limit(
    phases: &[f64],
    grid: &SteeringGrid,
    subspace: &CMatrix,
    weights: &[f64],
) -> Result<RMatrix> {
    objective(grid, subspace, weights)?.hessian_limit(phases)
}
