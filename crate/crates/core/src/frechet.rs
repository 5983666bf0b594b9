//! Fréchet distance between two Gaussian fits:
//!
//! `FAD(r, t) = ‖μ_r − μ_t‖² + tr(Σ_r) + tr(Σ_t) − 2·tr((Σ_r Σ_t)^½)`
//!
//! The trace-of-square-root term never forms the nonsymmetric product
//! `Σ_r Σ_t`. With `Σ_r = Vᵀ Λ V` we have
//! `tr((Σ_r Σ_t)^½) = Σ √eig(Λ^½ V Σ_t Vᵀ Λ^½)`, and the matrix on the right
//! is symmetric PSD (it is `Σ_r^½ Σ_t Σ_r^½` rotated into the eigenbasis of
//! `Σ_r`), so a symmetric eigensolver suffices.
//!
//! Directions in which `Σ_r` is numerically null (eigenvalue below
//! `d · ε · λ_max`) are dropped before the second eigenproblem. Rank-deficient
//! covariances are accepted; this keeps the eigensolver's rounding dust from
//! surfacing as spurious `√ε`-sized contributions.

use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::linalg::SymmetricEigen;
use crate::{Error, GaussianStats, Matrix, Result, EIGEN_NEGATIVE_TOL, FAD_CLAMP_EPS};

/// Symmetry tolerance applied to covariance inputs.
const SYMMETRY_TOL: f64 = 1e-8;

/// A Fréchet distance value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrechetDistance {
    pub value: f64,
    /// Set when a slightly negative result was clamped to zero.
    pub clamped: bool,
    pub dim: usize,
}

impl FrechetDistance {
    pub fn inverse(&self) -> Result<f64> {
        fad_inverse(self.value)
    }
}

/// A FAD value with the ids of the sets and the embedding model it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FadResult {
    pub ref_id: String,
    pub eval_id: String,
    pub model: String,
    pub dim: usize,
    pub value: f64,
    pub clamped: bool,
}

impl FadResult {
    pub fn new(
        ref_id: impl Into<String>,
        eval_id: impl Into<String>,
        model: impl Into<String>,
        distance: FrechetDistance,
    ) -> Self {
        FadResult {
            ref_id: ref_id.into(),
            eval_id: eval_id.into(),
            model: model.into(),
            dim: distance.dim,
            value: distance.value,
            clamped: distance.clamped,
        }
    }

    pub fn inverse(&self) -> Result<f64> {
        fad_inverse(self.value)
    }
}

/// `1 / fad`; zero has no inverse.
pub fn fad_inverse(fad: f64) -> Result<f64> {
    if fad == 0.0 {
        Err(Error::UndefinedInverse)
    } else if !(fad > 0.0) {
        Err(Error::NegativeDistance(fad))
    } else {
        Ok(1.0 / fad)
    }
}

/// Reference-side precomputation: the eigendecomposition of `Σ_r` restricted
/// to its numerical range. Reuse it when one reference is compared against
/// many evaluation sets.
#[derive(Debug, Clone)]
pub struct FrechetReference {
    mu: Vec<f64>,
    trace: f64,
    // rows: eigenvectors of Σ_r spanning its numerical range
    basis: Matrix,
    sqrt_values: Vec<f64>,
}

impl FrechetReference {
    pub fn new(r: &GaussianStats) -> Result<Self> {
        Self::from_covariance(r.mu().to_vec(), r.sigma())
    }

    fn from_covariance(mu: Vec<f64>, sigma: &Matrix) -> Result<Self> {
        check_covariance(sigma)?;
        let d = sigma.rows();
        let eig = SymmetricEigen::new(sigma)?;
        let keep = numerical_range(&eig.values, d)?;
        let mut basis = Matrix::zeros(keep.len(), d);
        let mut sqrt_values = Vec::with_capacity(keep.len());
        for (dst, &src) in keep.iter().enumerate() {
            basis.row_mut(dst).copy_from_slice(eig.vectors.row(src));
            sqrt_values.push(libm::sqrt(eig.values[src]));
        }
        Ok(FrechetReference {
            mu,
            trace: sigma.trace(),
            basis,
            sqrt_values,
        })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// Numerical rank of `Σ_r`.
    pub fn rank(&self) -> usize {
        self.sqrt_values.len()
    }

    /// `tr((Σ_r Σ_t)^½)` for this reference's `Σ_r`.
    pub fn trace_sqrt_product(&self, sigma_t: &Matrix) -> Result<f64> {
        if sigma_t.shape() != (self.dim(), self.dim()) {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: sigma_t.rows(),
            });
        }
        check_covariance(sigma_t)?;
        let r = self.rank();
        if r == 0 {
            return Ok(0.0);
        }
        // Λ^½ (V Σ_t Vᵀ) Λ^½ over the retained eigenvectors
        let projected = self.basis.matmul(sigma_t)?.matmul_transpose(&self.basis)?;
        let mut m = Matrix::zeros(r, r);
        for i in 0..r {
            for j in 0..=i {
                let v = 0.5
                    * (projected[(i, j)] + projected[(j, i)])
                    * self.sqrt_values[i]
                    * self.sqrt_values[j];
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        let values = SymmetricEigen::values_only(&m)?;
        let keep = numerical_range(&values, r)?;
        Ok(keep.iter().map(|&i| libm::sqrt(values[i])).sum())
    }

    pub fn distance(&self, t: &GaussianStats) -> Result<FrechetDistance> {
        if t.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: t.dim(),
            });
        }
        let mean_term: f64 = self
            .mu
            .iter()
            .zip(t.mu())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let cross = self.trace_sqrt_product(t.sigma())?;
        let raw = mean_term + self.trace + t.sigma().trace() - 2.0 * cross;
        clamp_distance(raw, self.dim())
    }
}

fn clamp_distance(raw: f64, dim: usize) -> Result<FrechetDistance> {
    if raw >= 0.0 {
        Ok(FrechetDistance {
            value: raw,
            clamped: false,
            dim,
        })
    } else if raw >= -FAD_CLAMP_EPS {
        Ok(FrechetDistance {
            value: 0.0,
            clamped: true,
            dim,
        })
    } else if raw.is_nan() {
        Err(Error::NonFinite { row: 0, col: 0 })
    } else {
        Err(Error::NegativeDistance(raw))
    }
}

fn check_covariance(sigma: &Matrix) -> Result<()> {
    sigma.check_finite()?;
    sigma.check_symmetric(SYMMETRY_TOL)
}

/// Indices of eigenvalues above the numerical-rank threshold `n · ε · λ_max`.
/// Negative eigenvalues below `-EIGEN_NEGATIVE_TOL · λ_max` are an error.
fn numerical_range(values: &[f64], n: usize) -> Result<Vec<usize>> {
    let largest = values.iter().copied().fold(0.0, f64::max);
    let smallest = values.iter().copied().fold(0.0, f64::min);
    if smallest < -EIGEN_NEGATIVE_TOL * largest || (largest == 0.0 && smallest < 0.0) {
        return Err(Error::Indefinite {
            eigenvalue: smallest,
            largest,
        });
    }
    let threshold = n as f64 * f64::EPSILON * largest;
    Ok((0..values.len())
        .filter(|&i| values[i] > threshold)
        .collect())
}

/// `tr((Σ_r Σ_t)^½)` for two symmetric PSD matrices.
pub fn trace_sqrt_product(sigma_r: &Matrix, sigma_t: &Matrix) -> Result<f64> {
    if sigma_r.rows() != sigma_r.cols() {
        return Err(Error::DimensionMismatch {
            expected: sigma_r.rows(),
            found: sigma_r.cols(),
        });
    }
    let zero_mean = alloc::vec![0.0; sigma_r.rows()];
    FrechetReference::from_covariance(zero_mean, sigma_r)?.trace_sqrt_product(sigma_t)
}

pub fn frechet_distance(r: &GaussianStats, t: &GaussianStats) -> Result<FrechetDistance> {
    if r.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: r.dim(),
            found: t.dim(),
        });
    }
    let reference = FrechetReference::new(r)?;
    if same_moments(r, t) {
        return Ok(FrechetDistance {
            value: 0.0,
            clamped: false,
            dim: r.dim(),
        });
    }
    reference.distance(t)
}

/// Bitwise-equal moments have distance exactly zero; evaluating the formula
/// would leave rounding dust instead.
fn same_moments(a: &GaussianStats, b: &GaussianStats) -> bool {
    a.mu() == b.mu() && a.sigma() == b.sigma()
}

/// Symmetric `k × k` matrix of FAD values with a zero diagonal. Cell `(i, j)`
/// for `i < j` is `FAD(sets[i], sets[j])` and is mirrored into `(j, i)`.
pub fn pairwise_fad(sets: &[GaussianStats]) -> Result<Matrix> {
    let k = sets.len();
    if k < 2 {
        return Err(Error::InsufficientData { needed: 2, found: k });
    }
    let dim = sets[0].dim();
    if let Some(bad) = sets.iter().find(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    let mut out = Matrix::zeros(k, k);
    for i in 0..k - 1 {
        let reference = FrechetReference::new(&sets[i])?;
        for j in (i + 1)..k {
            let v = if same_moments(&sets[i], &sets[j]) {
                0.0
            } else {
                reference.distance(&sets[j])?.value
            };
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}
