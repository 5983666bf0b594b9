//! Numerical core of the Fréchet audio distance toolkit.
//!
//! Everything in this crate is pure computation over in-memory buffers and is
//! `no_std` (with `alloc`). File IO, manifests and the command-line front end
//! live in the `fadkit` crate.
//!
//! The pieces, bottom-up:
//!
//! * [`linalg`]: a small row-major [`Matrix`] and a symmetric eigensolver.
//! * [`embedding`]: the `.emb` interchange codec and framing arithmetic.
//! * [`moments`]: mean/covariance fits of embedding frames, batch or streaming.
//! * [`frechet`]: the Fréchet distance between two Gaussian fits.
//! * [`pca`]: projection onto the leading principal components.
//! * [`rank`]: Spearman correlation of inverse FAD against perceptual ratings,
//!   with the noise-injection uncertainty estimate.
//! * [`mds`]: classical MDS of inter-category distances plus meta-categories.
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod embedding;
mod error;
pub mod frechet;
pub mod linalg;
pub mod mds;
pub mod moments;
mod normal;
pub mod pca;
pub mod rank;

pub use embedding::{expected_frame_count, EmbeddingHeader, EmbeddingMatrix};
pub use error::{Error, ErrorClass, Result};
pub use frechet::{
    fad_inverse, frechet_distance, pairwise_fad, trace_sqrt_product, FadResult, FrechetDistance,
    FrechetReference,
};
pub use linalg::{Matrix, SymmetricEigen};
pub use mds::{
    classical_mds, CategoryMap, MdsEmbedding, MetaCategory, MetaCategoryScheme, VoronoiGrid,
};
pub use moments::{stats_from_matrix, GaussianStats, MomentAccumulator};
pub use normal::inverse_normal_cdf;
pub use pca::{fit_pca, PcaProjection};
pub use rank::{
    bootstrap_uncertainty, correlate, spearman, BootstrapConfig, Correlation, CorrelationReport,
    Criterion, FadEntry, RatingRow, RatingsTable, Scope, Uncertainty,
};

/// Relative tolerance below which negative eigenvalues are treated as rounding
/// dust and clamped to zero.
pub const EIGEN_NEGATIVE_TOL: f64 = 1e-8;

/// FAD values in `[-FAD_CLAMP_EPS, 0)` are clamped to zero.
pub const FAD_CLAMP_EPS: f64 = 1e-6;
