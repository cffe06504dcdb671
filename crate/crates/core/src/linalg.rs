//! Small complex linear-algebra helpers shared by the estimator and the
//! bias analysis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type RVector = DVector<f64>;

pub(crate) const J: Complex64 = Complex64::new(0.0, 1.0);

/// `(M + M^H) / 2`
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Inverse of a Hermitian positive definite matrix via Cholesky.
pub fn hpd_inverse(m: &CMatrix, what: &str) -> Result<CMatrix> {
    m.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::RankDeficient(what.to_string()))
}

/// Inverse of a real matrix via LU.
pub fn real_inverse(m: &RMatrix, what: &str) -> Result<RMatrix> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular(what.to_string()))
}

/// Elementwise real part.
pub fn real_part(m: &CMatrix) -> RMatrix {
    m.map(|z| z.re)
}

/// `2 Re{diag(M)}` as a vector.
pub fn two_re_diag(m: &CMatrix) -> RVector {
    RVector::from_iterator(m.nrows().min(m.ncols()), (0..m.nrows().min(m.ncols())).map(|i| 2.0 * m[(i, i)].re))
}

/// Diagonal complex matrix from real entries.
pub fn real_diag(v: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        v.len(),
        v.iter().map(|&x| Complex64::new(x, 0.0)),
    ))
}

/// Frobenius norm of a complex matrix.
pub fn fro(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Rotate a vector so that its largest-magnitude entry is real and positive.
pub fn normalize_phase(v: &mut CVector) {
    let mut best = 0usize;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm_sqr();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if best_mag > 0.0 {
        let rot = v[best].conj() / v[best].norm();
        *v *= rot;
    }
}

/// Eigenvalues and eigenvectors of a Hermitian matrix in descending order.
pub fn hermitian_eigen_desc(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Dimension(format!("matrix is {}x{}, not square", n, m.ncols())));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigen("matrix has non-finite entries".into()));
    }
    let eig = nalgebra::SymmetricEigen::try_new(hermitian_part(m), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col: CVector = eig.eigenvectors.column(src).into_owned();
        normalize_phase(&mut col);
        vectors.set_column(dst, &col);
    }
    Ok((values, vectors))
}
