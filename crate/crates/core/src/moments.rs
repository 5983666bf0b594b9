//! Mean and covariance of embedding frames.
//!
//! Covariances use the unbiased `n - 1` denominator. Both the batch
//! ([`stats_from_matrix`]) and streaming ([`MomentAccumulator`]) paths
//! accumulate in `f64` and return exactly symmetric matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Matrix, Result};

pub const STATS_MAGIC: [u8; 4] = *b"FSTA";
pub const STATS_VERSION: u32 = 1;
const STATS_HEADER_LEN: usize = 20;

/// Gaussian fit `(μ, Σ)` of a set of frames.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    mu: Vec<f64>,
    sigma: Matrix,
    n: usize,
}

impl GaussianStats {
    /// Builds stats from explicit moments, e.g. for analytic distributions.
    /// `sigma` must be square, finite and symmetric to 1e-12 relative; it is
    /// stored exactly symmetrized.
    pub fn from_parts(mu: Vec<f64>, mut sigma: Matrix, n: usize) -> Result<Self> {
        let d = mu.len();
        if d == 0 {
            return Err(Error::InsufficientData {
                needed: 1,
                found: 0,
            });
        }
        if sigma.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: sigma.rows(),
            });
        }
        if n < 2 {
            return Err(Error::InsufficientData { needed: 2, found: n });
        }
        if let Some(i) = mu.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: 0, col: i });
        }
        sigma.check_finite()?;
        sigma.check_symmetric(1e-12)?;
        sigma.symmetrize();
        Ok(GaussianStats { mu, sigma, n })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &Matrix {
        &self.sigma
    }

    /// Number of frames the fit was computed from.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Stats cache encoding: `FSTA`, version `u32`, d `u32`, n `u64`, then
    /// μ (d × `f64`) and Σ (d × d `f64`, row-major), all little-endian.
    pub fn encode(&self) -> Vec<u8> {
        let d = self.dim();
        let mut out = Vec::with_capacity(STATS_HEADER_LEN + 8 * (d + d * d));
        out.extend_from_slice(&STATS_MAGIC);
        out.extend_from_slice(&STATS_VERSION.to_le_bytes());
        out.extend_from_slice(&(d as u32).to_le_bytes());
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        for v in self.mu.iter().chain(self.sigma.as_slice()) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < STATS_HEADER_LEN {
            return Err(Error::Length {
                expected: STATS_HEADER_LEN,
                found: bytes.len(),
            });
        }
        let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
        if magic != STATS_MAGIC {
            return Err(Error::BadMagic {
                expected: STATS_MAGIC,
                found: magic,
            });
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != STATS_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let d = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let n = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
        let expected = STATS_HEADER_LEN + 8 * (d + d * d);
        if bytes.len() != expected {
            return Err(Error::Length {
                expected,
                found: bytes.len(),
            });
        }
        let mut values = bytes[STATS_HEADER_LEN..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let mu: Vec<f64> = values.by_ref().take(d).collect();
        let sigma = Matrix::from_vec(d, d, values.collect())?;
        GaussianStats::from_parts(mu, sigma, n)
    }
}

/// Two-pass batch fit: column means first, then centered cross-products.
pub fn stats_from_matrix(x: &Matrix) -> Result<GaussianStats> {
    let (n, d) = x.shape();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, found: n });
    }
    if d == 0 {
        return Err(Error::InsufficientData {
            needed: 1,
            found: 0,
        });
    }
    x.check_finite()?;

    let mut mu = vec![0.0; d];
    for row in x.row_iter() {
        for (m, v) in mu.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in mu.iter_mut() {
        *m /= n as f64;
    }

    let mut centered = vec![0.0; d];
    let mut sigma = Matrix::zeros(d, d);
    for row in x.row_iter() {
        for ((c, v), m) in centered.iter_mut().zip(row).zip(&mu) {
            *c = v - m;
        }
        add_upper_outer(&mut sigma, &centered);
    }
    let denom = (n - 1) as f64;
    mirror_upper(&mut sigma, |v| v / denom);
    Ok(GaussianStats { mu, sigma, n })
}

/// Adds `v vᵀ` into the upper triangle of `m`.
fn add_upper_outer(m: &mut Matrix, v: &[f64]) {
    let d = v.len();
    for i in 0..d {
        let vi = v[i];
        if vi == 0.0 {
            continue;
        }
        let row = &mut m.row_mut(i)[i..];
        for (r, vj) in row.iter_mut().zip(&v[i..]) {
            *r += vi * vj;
        }
    }
}

/// Applies `f` to the upper triangle and mirrors it into the lower one.
fn mirror_upper(m: &mut Matrix, f: impl Fn(f64) -> f64) {
    let d = m.rows();
    for i in 0..d {
        for j in i..d {
            let v = f(m[(i, j)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Running sums for a streaming Gaussian fit.
///
/// Frames are accumulated as deviations from the first frame seen, which
/// keeps the final subtraction well conditioned when |μ| is large compared to
/// the spread. Only the upper triangle of the outer-product sum is updated per
/// frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentAccumulator {
    count: usize,
    shift: Vec<f64>,
    sum: Vec<f64>,
    upper_outer: Matrix,
}

impl MomentAccumulator {
    pub fn new(dim: usize) -> Self {
        MomentAccumulator {
            count: 0,
            shift: vec![0.0; dim],
            sum: vec![0.0; dim],
            upper_outer: Matrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.sum.len()
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Running mean, or `None` before the first frame.
    pub fn mean(&self) -> Option<Vec<f64>> {
        if self.count == 0 {
            return None;
        }
        let n = self.count as f64;
        Some(self.shift.iter().zip(&self.sum).map(|(s, v)| s + v / n).collect())
    }

    pub fn accumulate(&mut self, frame: &[f64]) -> Result<()> {
        if frame.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: frame.len(),
            });
        }
        if let Some(col) = frame.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: self.count,
                col,
            });
        }
        if self.count == 0 {
            self.shift.copy_from_slice(frame);
        }
        let dev: Vec<f64> = frame.iter().zip(&self.shift).map(|(x, s)| x - s).collect();
        for (s, v) in self.sum.iter_mut().zip(&dev) {
            *s += v;
        }
        add_upper_outer(&mut self.upper_outer, &dev);
        self.count += 1;
        Ok(())
    }

    pub fn accumulate_f32(&mut self, frame: &[f32]) -> Result<()> {
        let wide: Vec<f64> = frame.iter().map(|&v| f64::from(v)).collect();
        self.accumulate(&wide)
    }

    /// Accumulates every row of `x` in order.
    pub fn accumulate_rows(&mut self, x: &Matrix) -> Result<()> {
        x.row_iter().try_for_each(|row| self.accumulate(row))
    }

    /// Folds `other` into `self`, re-expressing its sums about `self`'s
    /// shift. Merging in a fixed order keeps results reproducible when
    /// partial sums are computed in parallel.
    pub fn merge(&mut self, other: &MomentAccumulator) -> Result<()> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if other.count == 0 {
            return Ok(());
        }
        if self.count == 0 {
            *self = other.clone();
            return Ok(());
        }
        // with y = x - other.shift and δ = other.shift - self.shift:
        // Σ(y+δ) = Σy + nδ and Σ(y+δ)(y+δ)ᵀ = Σyyᵀ + Σy δᵀ + δ Σyᵀ + n δδᵀ
        let d = self.dim();
        let n = other.count as f64;
        let delta: Vec<f64> = other.shift.iter().zip(&self.shift).map(|(o, s)| o - s).collect();
        for i in 0..d {
            let row = self.upper_outer.row_mut(i);
            let orow = other.upper_outer.row(i);
            for j in i..d {
                row[j] += orow[j]
                    + other.sum[i] * delta[j]
                    + delta[i] * other.sum[j]
                    + n * delta[i] * delta[j];
            }
        }
        for ((a, b), dl) in self.sum.iter_mut().zip(&other.sum).zip(&delta) {
            *a += b + n * dl;
        }
        self.count += other.count;
        Ok(())
    }

    /// `μ = shift + s / n`, `Σ = (S - s sᵀ / n) / (n - 1)` where `s` and `S`
    /// are the shifted first and second sums.
    pub fn finalize(&self) -> Result<GaussianStats> {
        let n = self.count;
        if n < 2 {
            return Err(Error::InsufficientData { needed: 2, found: n });
        }
        let d = self.dim();
        let nf = n as f64;
        let mu = self.mean().unwrap_or_default();
        let mut sigma = Matrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                sigma[(i, j)] =
                    (self.upper_outer[(i, j)] - self.sum[i] * self.sum[j] / nf) / (nf - 1.0);
            }
        }
        mirror_upper(&mut sigma, |v| v);
        Ok(GaussianStats { mu, sigma, n })
    }
}
