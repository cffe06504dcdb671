//! Block-Hankel data matrix, sample covariance and signal/noise subspace
//! split.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen_desc, CMatrix, CVector};
use crate::model::SnapshotSet;

/// Shape of the per-band Hankel blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockHankelConfig {
    num_subcarriers: usize,
    rows: usize,
    total_components: usize,
    clusters: usize,
}

impl BlockHankelConfig {
    /// `rows` is `M`; the column count is `Q = N - M + 1`.
    ///
    /// Requires `P <= M - 1`, `Q >= P` and `1 <= P <= K`. The stricter
    /// identifiability conditions `M > K`, `Q >= K` are reported by
    /// [`Self::meets_component_conditions`].
    pub fn new(
        num_subcarriers: usize,
        rows: usize,
        total_components: usize,
        clusters: usize,
    ) -> Result<Self> {
        if rows == 0 || rows > num_subcarriers {
            return Err(Error::HankelConfig(format!(
                "M = {rows} must lie in 1..={num_subcarriers}"
            )));
        }
        if clusters == 0 || clusters > total_components {
            return Err(Error::HankelConfig(format!(
                "need 1 <= P <= K, got P = {clusters}, K = {total_components}"
            )));
        }
        let q = num_subcarriers - rows + 1;
        if rows <= clusters || q < clusters {
            return Err(Error::HankelConfig(format!(
                "M = {rows}, Q = {q} cannot carry a {clusters}-dimensional signal subspace"
            )));
        }
        Ok(Self {
            num_subcarriers,
            rows,
            total_components,
            clusters,
        })
    }

    /// Smallest `M` with `M > K` and `N - M + 1 >= K`; when none exists,
    /// `M = N / 2 + 1`.
    pub fn with_default_rows(
        num_subcarriers: usize,
        total_components: usize,
        clusters: usize,
    ) -> Result<Self> {
        let n = num_subcarriers;
        let rows = (total_components + 1..=n)
            .find(|&m| n + 1 >= m + total_components)
            .unwrap_or(n / 2 + 1);
        Self::new(n, rows, total_components, clusters)
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    /// `M`
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// `Q = N - M + 1`
    pub fn cols(&self) -> usize {
        self.num_subcarriers - self.rows + 1
    }

    pub fn total_components(&self) -> usize {
        self.total_components
    }

    /// Signal subspace dimension `P`.
    pub fn clusters(&self) -> usize {
        self.clusters
    }

    /// `M > K` and `Q >= K`.
    pub fn meets_component_conditions(&self) -> bool {
        self.rows > self.total_components && self.cols() >= self.total_components
    }
}

/// Stacks the `M x Q` Hankel matrix of every band: rows `i*M .. i*M + M` hold
/// `h_i[m + q]`.
pub fn block_hankel(h: &CVector, cfg: &BlockHankelConfig) -> Result<CMatrix> {
    let n = cfg.num_subcarriers();
    if h.is_empty() || !h.len().is_multiple_of(n) {
        return Err(Error::Dimension(format!(
            "vector of length {} is not a whole number of {n}-subcarrier bands",
            h.len()
        )));
    }
    let bands = h.len() / n;
    let (m, q) = (cfg.rows(), cfg.cols());
    Ok(CMatrix::from_fn(bands * m, q, |r, c| {
        let (band, row) = (r / m, r % m);
        h[band * n + row + c]
    }))
}

/// `R = (1 / (S Q)) sum_s H_s H_s^H`, symmetrized.
pub fn sample_covariance(snapshots: &SnapshotSet, cfg: &BlockHankelConfig) -> Result<CMatrix> {
    let plan = &snapshots.band_plan;
    if plan.num_subcarriers() != cfg.num_subcarriers() {
        return Err(Error::Dimension(format!(
            "band plan has {} subcarriers, Hankel config expects {}",
            plan.num_subcarriers(),
            cfg.num_subcarriers()
        )));
    }
    let s = snapshots.num_snapshots();
    if s == 0 {
        return Err(Error::Empty("no snapshots".into()));
    }
    let dim = plan.num_bands() * cfg.rows();
    let mut r = CMatrix::zeros(dim, dim);
    for col in snapshots.data.column_iter() {
        let h = block_hankel(&col.into_owned(), cfg)?;
        r.gemm(Complex64::new(1.0, 0.0), &h, &h.adjoint(), Complex64::new(1.0, 0.0));
    }
    let scale = 1.0 / (s * cfg.cols()) as f64;
    Ok((&r + r.adjoint()).scale(0.5 * scale))
}

/// Signal/noise split of a Hermitian covariance.
#[derive(Debug, Clone)]
pub struct SubspaceDecomposition {
    /// `U_s`, `LM x P`, orthonormal.
    pub signal_vectors: CMatrix,
    /// Top-`P` eigenvalues of `R`, descending.
    pub signal_values: Vec<f64>,
    /// `U_n`, `LM x (LM - P)`.
    pub noise_vectors: CMatrix,
    /// Remaining eigenvalues, descending.
    pub noise_values: Vec<f64>,
    /// Mean of the noise eigenvalues.
    pub noise_power: f64,
    /// `lambda_P - lambda_{P+1} < 1e-12 lambda_1`.
    pub ill_separated: bool,
}

impl SubspaceDecomposition {
    pub fn dim(&self) -> usize {
        self.signal_vectors.nrows()
    }

    pub fn rank(&self) -> usize {
        self.signal_vectors.ncols()
    }

    /// `lambda_i - sigma_n^2`: the eigenvalues of the noise-free part.
    pub fn excess_values(&self) -> Vec<f64> {
        self.signal_values
            .iter()
            .map(|l| l - self.noise_power)
            .collect()
    }
}

/// Splits `R` into the top-`P` eigenpairs and the rest.
pub fn eigendecompose(r: &CMatrix, clusters: usize) -> Result<SubspaceDecomposition> {
    let dim = r.nrows();
    if clusters == 0 || clusters >= dim {
        return Err(Error::Dimension(format!(
            "signal dimension {clusters} must lie in 1..{dim}"
        )));
    }
    let (values, vectors) = hermitian_eigen_desc(r)?;
    let noise_values = values[clusters..].to_vec();
    let noise_power = noise_values.iter().sum::<f64>() / noise_values.len() as f64;
    let gap = values[clusters - 1] - values[clusters];
    Ok(SubspaceDecomposition {
        signal_vectors: vectors.columns(0, clusters).into_owned(),
        signal_values: values[..clusters].to_vec(),
        noise_vectors: vectors.columns(clusters, dim - clusters).into_owned(),
        noise_values,
        noise_power,
        ill_separated: gap < 1e-12 * values[0].abs(),
    })
}
