use num_complex::Complex64;

use super::BandPlan;
use crate::linalg::{CVector, J};

/// Steering vector over an arbitrary exponent table: entry `k` is
/// `exp(-j * phi * exponents[k])`.
pub fn steering_from_exponents(phi: f64, exponents: &[f64]) -> CVector {
    CVector::from_iterator(
        exponents.len(),
        exponents.iter().map(|&e| Complex64::from_polar(1.0, -phi * e)),
    )
}

/// Derivative of [`steering_from_exponents`] with respect to `phi`.
pub fn derivative_from_exponents(phi: f64, exponents: &[f64]) -> CVector {
    CVector::from_iterator(
        exponents.len(),
        exponents
            .iter()
            .map(|&e| -J * e * Complex64::from_polar(1.0, -phi * e)),
    )
}

/// Multiband steering vector `a(phi)` of length `N * L`.
pub fn steering_vector(phi: f64, plan: &BandPlan) -> CVector {
    steering_from_exponents(phi, &plan.full_exponents())
}

/// `d(phi) = da/dphi`.
pub fn steering_derivative(phi: f64, plan: &BandPlan) -> CVector {
    derivative_from_exponents(phi, &plan.full_exponents())
}
