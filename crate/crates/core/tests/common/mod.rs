#![allow(dead_code)]

use fadkit_core::Matrix;
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn from_na(m: &DMatrix<f64>) -> Matrix {
    let mut out = Matrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[(i, j)] = m[(i, j)];
        }
    }
    out
}

pub fn gaussian_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}

/// `A Aᵀ / d` for Gaussian `A`: symmetric positive (semi)definite.
pub fn random_psd(rng: &mut StdRng, d: usize, rank: usize) -> Matrix {
    let a = gaussian_matrix(rng, d, rank);
    let mut s = a.matmul_transpose(&a).unwrap();
    for v in s.as_mut_slice() {
        *v /= rank as f64;
    }
    s.symmetrize();
    s
}

/// Haar-ish random orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn random_orthogonal(rng: &mut StdRng, d: usize) -> Matrix {
    let g = to_na(&gaussian_matrix(rng, d, d));
    from_na(&g.qr().q())
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

/// Rows `x ↦ A·x + b`.
pub fn affine_rows(x: &Matrix, a: &Matrix, b: &[f64]) -> Matrix {
    let mut out = x.matmul_transpose(a).unwrap();
    for i in 0..out.rows() {
        for (v, s) in out.row_mut(i).iter_mut().zip(b) {
            *v += s;
        }
    }
    out
}

pub fn scaled(x: &Matrix, s: f64) -> Matrix {
    let data = x.as_slice().iter().map(|v| v * s).collect();
    Matrix::from_vec(x.rows(), x.cols(), data).unwrap()
}

/// Textbook two-pass sample covariance, written independently of the crate.
pub fn two_pass_covariance(x: &Matrix) -> (Vec<f64>, Matrix) {
    let (n, d) = x.shape();
    let mut mu = vec![0.0; d];
    for i in 0..n {
        for j in 0..d {
            mu[j] += x[(i, j)];
        }
    }
    mu.iter_mut().for_each(|m| *m /= n as f64);
    let mut cov = Matrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            let mut s = 0.0;
            for i in 0..n {
                s += (x[(i, a)] - mu[a]) * (x[(i, b)] - mu[b]);
            }
            cov[(a, b)] = s / (n - 1) as f64;
        }
    }
    (mu, cov)
}
