//! Classical (Torgerson) MDS of an inter-category FAD matrix, meta-category
//! labels, and grid-sampled nearest-point regions for Voronoi-style plots.
//!
//! FAD values are used directly as dissimilarities. Coordinates are only
//! defined up to rotation and reflection; each axis is oriented so its
//! largest-magnitude entry is positive.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::linalg::SymmetricEigen;
use crate::pca::fix_sign;
use crate::{Error, Matrix, Result};

const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct MdsEmbedding {
    /// `k × out_dims`, column-centered.
    pub coords: Matrix,
    /// Eigenvalues of the double-centered matrix used for each axis.
    pub eigenvalues: Vec<f64>,
    /// `√(Σ (d̂ᵢⱼ − Dᵢⱼ)² / Σ Dᵢⱼ²)` over `i < j`.
    pub stress: f64,
    /// Summed magnitude of the negative eigenvalues that were discarded.
    pub truncated_negative_mass: f64,
}

fn validate_distances(d: &Matrix) -> Result<()> {
    let (k, cols) = d.shape();
    if k != cols {
        return Err(Error::InvalidDistances("matrix is not square"));
    }
    if k < 2 {
        return Err(Error::InsufficientData { needed: 2, found: k });
    }
    d.check_finite()?;
    if d.as_slice().iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidDistances("negative entry"));
    }
    let tol = SYMMETRY_TOL * d.max_abs();
    if (0..k).any(|i| d[(i, i)] > tol) {
        return Err(Error::InvalidDistances("nonzero diagonal"));
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if (d[(i, j)] - d[(j, i)]).abs() > tol {
                return Err(Error::InvalidDistances("matrix is not symmetric"));
            }
        }
    }
    Ok(())
}

/// Embeds `k` objects with pairwise dissimilarities `d` into `out_dims`
/// dimensions via eigendecomposition of `B = −½ J D⁽²⁾ J`.
pub fn classical_mds(d: &Matrix, out_dims: usize) -> Result<MdsEmbedding> {
    validate_distances(d)?;
    if out_dims == 0 {
        return Err(Error::InvalidArgument("MDS needs at least one output dimension".into()));
    }
    let k = d.rows();

    let mut b = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let v = 0.5 * (d[(i, j)] + d[(j, i)]);
            b[(i, j)] = v * v;
        }
    }
    let row_means: Vec<f64> = b.row_iter().map(|r| r.iter().sum::<f64>() / k as f64).collect();
    let grand = row_means.iter().sum::<f64>() / k as f64;
    for i in 0..k {
        for j in 0..k {
            b[(i, j)] = -0.5 * (b[(i, j)] - row_means[i] - row_means[j] + grand);
        }
    }

    let eig = SymmetricEigen::new(&b)?;
    let largest = eig.largest().max(0.0);
    let rank_floor = k as f64 * f64::EPSILON * largest;
    let truncated_negative_mass = eig
        .values
        .iter()
        .filter(|&&v| v < 0.0)
        .map(|v| -v)
        .sum();

    let mut coords = Matrix::zeros(k, out_dims);
    let mut eigenvalues = Vec::with_capacity(out_dims);
    for (axis, src) in (0..k).rev().take(out_dims).enumerate() {
        let lambda = eig.values[src];
        eigenvalues.push(lambda);
        if lambda <= rank_floor {
            continue;
        }
        let scale = libm::sqrt(lambda);
        let mut column: Vec<f64> = eig.vectors.row(src).iter().map(|v| v * scale).collect();
        fix_sign(&mut column);
        for (i, v) in column.into_iter().enumerate() {
            coords[(i, axis)] = v;
        }
    }
    // fewer objects than requested axes
    eigenvalues.resize(out_dims, 0.0);

    let stress = stress(d, &coords);
    Ok(MdsEmbedding {
        coords,
        eigenvalues,
        stress,
        truncated_negative_mass,
    })
}

/// Euclidean distances between the rows of `coords`.
pub fn coordinate_distances(coords: &Matrix) -> Matrix {
    let k = coords.rows();
    let mut out = Matrix::zeros(k, k);
    for i in 0..k {
        for j in (i + 1)..k {
            let sq: f64 = coords
                .row(i)
                .iter()
                .zip(coords.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let v = libm::sqrt(sq);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

fn stress(d: &Matrix, coords: &Matrix) -> f64 {
    let fitted = coordinate_distances(coords);
    let k = d.rows();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..k {
        for j in (i + 1)..k {
            let r = fitted[(i, j)] - d[(i, j)];
            num += r * r;
            den += d[(i, j)] * d[(i, j)];
        }
    }
    if den == 0.0 {
        libm::sqrt(num)
    } else {
        libm::sqrt(num / den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MetaCategory {
    Impact,
    Living,
    Texture,
}

impl MetaCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            MetaCategory::Impact => "Impact",
            MetaCategory::Living => "Living",
            MetaCategory::Texture => "Texture",
        }
    }
}

/// Assignment of sound categories to meta-categories.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaCategoryScheme {
    assignments: Vec<(String, MetaCategory)>,
}

/// The seven DCASE 2023 Task 7 categories.
pub const DCASE_CATEGORIES: [&str; 7] = [
    "dog_bark",
    "footstep",
    "gunshot",
    "keyboard",
    "moving_motor_vehicle",
    "rain",
    "sneeze_cough",
];

impl MetaCategoryScheme {
    pub fn new(assignments: Vec<(String, MetaCategory)>) -> Self {
        MetaCategoryScheme { assignments }
    }

    /// Impact: footstep, gunshot, keyboard. Living: dog bark, sneeze/cough.
    /// Texture: moving motor vehicle, rain.
    pub fn dcase() -> Self {
        use MetaCategory::*;
        let groups = [
            ("dog_bark", Living),
            ("footstep", Impact),
            ("gunshot", Impact),
            ("keyboard", Impact),
            ("moving_motor_vehicle", Texture),
            ("rain", Texture),
            ("sneeze_cough", Living),
        ];
        MetaCategoryScheme::new(groups.iter().map(|&(c, m)| (c.into(), m)).collect())
    }

    pub fn assignments(&self) -> &[(String, MetaCategory)] {
        &self.assignments
    }

    /// Looks up a label, ignoring case and treating spaces, dashes and
    /// slashes as underscores (`"Sneeze/Cough"` matches `sneeze_cough`).
    pub fn get(&self, label: &str) -> Option<MetaCategory> {
        let key = normalize_label(label);
        self.assignments
            .iter()
            .find(|(c, _)| normalize_label(c) == key)
            .map(|&(_, m)| m)
    }
}

impl Default for MetaCategoryScheme {
    fn default() -> Self {
        Self::dcase()
    }
}

fn normalize_label(label: &str) -> String {
    label
        .chars()
        .map(|c| match c {
            ' ' | '-' | '/' => '_',
            c => c.to_ascii_lowercase(),
        })
        .collect()
}

/// Nearest-point region label for each cell centre of a regular grid over a
/// bounding box. `cells[row * nx + col]` is the index of the closest point;
/// ties go to the lowest index. Row 0 is at `y_min`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoronoiGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<usize>,
}

impl VoronoiGrid {
    /// Grid over the points' bounding box padded by 10 % of its larger side
    /// (or by 1 when all points coincide).
    pub fn around(points: &Matrix, nx: usize, ny: usize) -> Result<Self> {
        if points.cols() < 2 || points.rows() == 0 {
            return Err(Error::InvalidArgument("need at least one 2D point".into()));
        }
        let xs = points.column(0);
        let ys = points.column(1);
        let (x0, x1) = bounds(&xs);
        let (y0, y1) = bounds(&ys);
        let span = (x1 - x0).max(y1 - y0);
        let pad = if span > 0.0 { 0.1 * span } else { 1.0 };
        Self::sample(points, (x0 - pad, x1 + pad), (y0 - pad, y1 + pad), nx, ny)
    }

    pub fn sample(
        points: &Matrix,
        (x_min, x_max): (f64, f64),
        (y_min, y_max): (f64, f64),
        nx: usize,
        ny: usize,
    ) -> Result<Self> {
        if nx == 0 || ny == 0 || !(x_max > x_min) || !(y_max > y_min) {
            return Err(Error::InvalidArgument("empty grid".into()));
        }
        let dx = (x_max - x_min) / nx as f64;
        let dy = (y_max - y_min) / ny as f64;
        let mut cells = vec![0; nx * ny];
        for row in 0..ny {
            let y = y_min + (row as f64 + 0.5) * dy;
            for col in 0..nx {
                let x = x_min + (col as f64 + 0.5) * dx;
                let mut best = (f64::INFINITY, 0);
                for (i, p) in points.row_iter().enumerate() {
                    let dist = (p[0] - x) * (p[0] - x) + (p[1] - y) * (p[1] - y);
                    if dist < best.0 {
                        best = (dist, i);
                    }
                }
                cells[row * nx + col] = best.1;
            }
        }
        Ok(VoronoiGrid {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
            cells,
        })
    }
}

fn bounds(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// 2D map of categories from their pairwise FAD.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryMap {
    pub labels: Vec<String>,
    pub distances: Matrix,
    pub embedding: MdsEmbedding,
    /// Meta-category per label, `None` for labels outside the scheme.
    pub meta: Vec<Option<MetaCategory>>,
    pub regions: VoronoiGrid,
}

impl CategoryMap {
    pub fn build(
        labels: Vec<String>,
        distances: Matrix,
        scheme: &MetaCategoryScheme,
        grid_size: usize,
    ) -> Result<Self> {
        if labels.len() != distances.rows() {
            return Err(Error::DimensionMismatch {
                expected: distances.rows(),
                found: labels.len(),
            });
        }
        let embedding = classical_mds(&distances, 2)?;
        let regions = VoronoiGrid::around(&embedding.coords, grid_size, grid_size)?;
        let meta = labels.iter().map(|l| scheme.get(l)).collect();
        Ok(CategoryMap {
            labels,
            distances,
            embedding,
            meta,
            regions,
        })
    }

    /// Distinct meta-categories among the labels, sorted.
    pub fn meta_groups(&self) -> Vec<MetaCategory> {
        let mut groups: Vec<MetaCategory> = self.meta.iter().flatten().copied().collect();
        groups.sort();
        groups.dedup();
        groups
    }
}
