use std::f64::consts::PI;

use nalgebra::Schur;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// Coarse-to-fine ESPRIT phase estimates from a signal subspace.
///
/// The unit shift inside every band gives unambiguous coarse phases; the band
/// offsets `n_i` then refine them, each stage picking the `2 pi / n_i` branch
/// closest to the current estimate. `subspace` has `L * rows` rows in block
/// order.
pub fn esprit_phases(subspace: &CMatrix, rows: usize, band_offsets: &[usize]) -> Result<Vec<f64>> {
    let bands = band_offsets.len();
    let p = subspace.ncols();
    if rows < 2 || subspace.nrows() != bands * rows {
        return Err(Error::Initializer(format!(
            "subspace with {} rows does not match {bands} bands of {rows}",
            subspace.nrows()
        )));
    }
    if bands * (rows - 1) < p {
        return Err(Error::Initializer(format!(
            "{p} components exceed the {} shift-invariant rows",
            bands * (rows - 1)
        )));
    }

    let select = |offset: usize, len: usize, band_list: &[usize]| {
        let mut out = CMatrix::zeros(band_list.len() * len, p);
        for (k, &b) in band_list.iter().enumerate() {
            for r in 0..len {
                out.set_row(k * len + r, &subspace.row(b * rows + offset + r));
            }
        }
        out
    };

    let all: Vec<usize> = (0..bands).collect();
    let upper = select(0, rows - 1, &all);
    let lower = select(1, rows - 1, &all);
    let psi = least_squares(&upper, &lower)?;
    let (values, vectors) = eigen_general(&psi)?;
    let vectors_inv = vectors
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Initializer("ESPRIT eigenvectors are singular".into()))?;

    let mut phases: Vec<f64> = values.iter().map(|z| wrap(-z.arg())).collect();

    let base = select(0, rows, &[0]);
    for (b, &nb) in band_offsets.iter().enumerate().skip(1) {
        let shifted = select(0, rows, &[b]);
        let rot = &vectors_inv * least_squares(&base, &shifted)? * &vectors;
        let n = nb as f64;
        for (k, phi) in phases.iter_mut().enumerate() {
            let raw = -rot[(k, k)].arg();
            let branch = ((*phi * n - raw) / (2.0 * PI)).round();
            *phi = (raw + 2.0 * PI * branch) / n;
        }
    }
    if phases.iter().any(|x| !x.is_finite()) {
        return Err(Error::Initializer("non-finite ESPRIT phase".into()));
    }
    Ok(phases)
}

/// Maps a phase into `(-pi/2, 3pi/2]`: delays are nonnegative, so a slightly
/// negative estimate stays near zero instead of wrapping to `2 pi`.
fn wrap(phi: f64) -> f64 {
    let mut x = phi.rem_euclid(2.0 * PI);
    if x > 1.5 * PI {
        x -= 2.0 * PI;
    }
    x
}

/// `argmin_X ||A X - B||_F` for full-column-rank `A`.
fn least_squares(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let gram = a.adjoint() * a;
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Initializer("rank-deficient ESPRIT selection".into()))?;
    Ok(chol.solve(&(a.adjoint() * b)))
}

/// Eigenvalues and unit eigenvectors of a general complex matrix via Schur
/// form and back substitution.
fn eigen_general(m: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    let n = m.nrows();
    let (q, t) = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Initializer("Schur decomposition did not converge".into()))?
        .unpack();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut vectors = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        values.push(lambda);
        let mut y = CVector::zeros(n);
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in i + 1..=k {
                acc += t[(i, j)] * y[j];
            }
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < 1e-14 * scale {
                denom = Complex64::new(1e-14 * scale, 0.0);
            }
            y[i] = -acc / denom;
        }
        let x = &q * y;
        let norm = x.norm();
        vectors.set_column(k, &(x / Complex64::new(norm, 0.0)));
    }
    Ok((values, vectors))
}
