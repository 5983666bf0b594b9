//! Projection of embedding frames onto their leading principal components.

use alloc::vec::Vec;

use crate::linalg::SymmetricEigen;
use crate::{stats_from_matrix, Error, GaussianStats, Matrix, Result};

pub const PCA_MAGIC: [u8; 4] = *b"FPCA";
pub const PCA_VERSION: u32 = 1;
const PCA_HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaProjection {
    mean: Vec<f64>,
    /// `k × d`; orthonormal rows in order of decreasing eigenvalue.
    components: Matrix,
    eigenvalues: Vec<f64>,
}

/// Fits the top-`k` principal components of the rows of `x`.
pub fn fit_pca(x: &Matrix, k: usize) -> Result<PcaProjection> {
    if x.rows() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: x.rows(),
        });
    }
    PcaProjection::from_stats(&stats_from_matrix(x)?, k)
}

impl PcaProjection {
    /// Fits from a precomputed mean and covariance. This is how a projection
    /// is fitted on a pooled population too large to hold as one matrix.
    pub fn from_stats(stats: &GaussianStats, k: usize) -> Result<Self> {
        let d = stats.dim();
        let max_k = d.min(stats.n() - 1);
        if k == 0 || k > max_k {
            return Err(Error::InvalidArgument(alloc::format!(
                "component count {k} outside 1..={max_k}"
            )));
        }
        let eig = SymmetricEigen::new(stats.sigma())?;
        let mut components = Matrix::zeros(k, d);
        let mut eigenvalues = Vec::with_capacity(k);
        for (dst, src) in (0..d).rev().take(k).enumerate() {
            let row = components.row_mut(dst);
            row.copy_from_slice(eig.vectors.row(src));
            fix_sign(row);
            eigenvalues.push(eig.values[src]);
        }
        Ok(PcaProjection {
            mean: stats.mu().to_vec(),
            components,
            eigenvalues,
        })
    }

    pub fn from_parts(mean: Vec<f64>, components: Matrix, eigenvalues: Vec<f64>) -> Result<Self> {
        let (k, d) = components.shape();
        if mean.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: mean.len(),
            });
        }
        if eigenvalues.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: eigenvalues.len(),
            });
        }
        if k == 0 {
            return Err(Error::InvalidHeader("projection has no components"));
        }
        if mean.iter().chain(&eigenvalues).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: 0, col: 0 });
        }
        components.check_finite()?;
        Ok(PcaProjection {
            mean,
            components,
            eigenvalues,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.rows()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn components(&self) -> &Matrix {
        &self.components
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `(X − mean) · componentsᵀ`.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: x.cols(),
            });
        }
        let k = self.output_dim();
        let mut out = Matrix::zeros(x.rows(), k);
        let mut centered = alloc::vec![0.0; self.input_dim()];
        for (i, row) in x.row_iter().enumerate() {
            for ((c, v), m) in centered.iter_mut().zip(row).zip(&self.mean) {
                *c = v - m;
            }
            let dst = out.row_mut(i);
            for (j, comp) in self.components.row_iter().enumerate() {
                dst[j] = crate::linalg::dot(&centered, comp);
            }
        }
        Ok(out)
    }

    /// Moments of the projected frames, `C(μ − mean)` and `C Σ Cᵀ`, without
    /// touching the frames themselves.
    pub fn apply_stats(&self, stats: &GaussianStats) -> Result<GaussianStats> {
        if stats.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: stats.dim(),
            });
        }
        let centered: Vec<f64> = stats.mu().iter().zip(&self.mean).map(|(v, m)| v - m).collect();
        let mu = self.components.mat_vec(&centered)?;
        let mut sigma = self
            .components
            .matmul(stats.sigma())?
            .matmul_transpose(&self.components)?;
        sigma.symmetrize();
        GaussianStats::from_parts(mu, sigma, stats.n())
    }

    /// Projection file: `FPCA`, version `u32`, d `u32`, k `u32`, then mean
    /// (d × `f64`), eigenvalues (k × `f64`) and components (k × d `f64`,
    /// row-major), all little-endian.
    pub fn encode(&self) -> Vec<u8> {
        let (k, d) = self.components.shape();
        let mut out = Vec::with_capacity(PCA_HEADER_LEN + 8 * (d + k + k * d));
        out.extend_from_slice(&PCA_MAGIC);
        out.extend_from_slice(&PCA_VERSION.to_le_bytes());
        out.extend_from_slice(&(d as u32).to_le_bytes());
        out.extend_from_slice(&(k as u32).to_le_bytes());
        for v in self
            .mean
            .iter()
            .chain(&self.eigenvalues)
            .chain(self.components.as_slice())
        {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < PCA_HEADER_LEN {
            return Err(Error::Length {
                expected: PCA_HEADER_LEN,
                found: bytes.len(),
            });
        }
        let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
        if magic != PCA_MAGIC {
            return Err(Error::BadMagic {
                expected: PCA_MAGIC,
                found: magic,
            });
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        if u32_at(4) != PCA_VERSION {
            return Err(Error::UnsupportedVersion(u32_at(4)));
        }
        let d = u32_at(8) as usize;
        let k = u32_at(12) as usize;
        let expected = PCA_HEADER_LEN + 8 * (d + k + k * d);
        if bytes.len() != expected {
            return Err(Error::Length {
                expected,
                found: bytes.len(),
            });
        }
        let mut values = bytes[PCA_HEADER_LEN..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let mean = values.by_ref().take(d).collect();
        let eigenvalues = values.by_ref().take(k).collect();
        let components = Matrix::from_vec(k, d, values.collect())?;
        Self::from_parts(mean, components, eigenvalues)
    }
}

/// Flips `v` so its largest-magnitude entry is positive; ties go to the
/// lowest index.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let mut pivot = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[pivot].abs() {
            pivot = i;
        }
    }
    if v.get(pivot).is_some_and(|&p| p < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}
