//! Spearman correlation between inverse FAD and perceptual ratings.
//!
//! FAD falls as quality rises, so correlations are taken against `1 / FAD`,
//! which makes a good metric correlate positively with ratings. When a FAD in
//! scope is exactly zero the inverse is undefined; `-FAD` has the same ranks
//! as `1 / FAD` for positive values and is used instead.
//!
//! Uncertainty follows a noise-injection scheme: i.i.d. Gaussian noise is
//! added to every rating, Spearman's ρ is recomputed, and the mean and
//! population standard deviation over the repetitions are reported. Each
//! repetition draws from its own ChaCha8 stream (`seed`, stream = repetition
//! index), and normal deviates come from [`inverse_normal_cdf`] applied to
//! 53-bit uniforms on the open unit interval, so reports reproduce exactly.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Serialize, Serializer};

use crate::{inverse_normal_cdf, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    AudioQuality,
    CategoryFit,
}

impl Criterion {
    pub const ALL: [Criterion; 2] = [Criterion::AudioQuality, Criterion::CategoryFit];

    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::AudioQuality => "audio_quality",
            Criterion::CategoryFit => "category_fit",
        }
    }
}

/// Which `(system, category)` cells enter a correlation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    Overall,
    Category(String),
}

impl Scope {
    pub fn as_str(&self) -> &str {
        match self {
            Scope::Overall => "overall",
            Scope::Category(c) => c,
        }
    }

    fn contains(&self, category: &str) -> bool {
        match self {
            Scope::Overall => true,
            Scope::Category(c) => c == category,
        }
    }
}

impl Serialize for Scope {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FadEntry {
    pub system: String,
    pub category: String,
    pub fad: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatingRow {
    pub system: String,
    pub category: String,
    pub audio_quality: f64,
    pub category_fit: f64,
}

impl RatingRow {
    pub fn score(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::AudioQuality => self.audio_quality,
            Criterion::CategoryFit => self.category_fit,
        }
    }
}

/// Mean perceptual ratings, one row per `(system, category)` cell.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RatingsTable {
    rows: Vec<RatingRow>,
}

impl RatingsTable {
    pub fn new(rows: Vec<RatingRow>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            if !(row.audio_quality.is_finite() && row.category_fit.is_finite()) {
                return Err(Error::NonFinite { row: i, col: 0 });
            }
            if seen.insert((row.system.as_str(), row.category.as_str()), ()).is_some() {
                return Err(Error::DuplicatePair {
                    system: row.system.clone(),
                    category: row.category.clone(),
                });
            }
        }
        Ok(RatingsTable { rows })
    }

    pub fn rows(&self) -> &[RatingRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct categories in order of first appearance.
    pub fn categories(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for row in &self.rows {
            if !out.contains(&row.category.as_str()) {
                out.push(&row.category);
            }
        }
        out
    }
}

/// Average ranks (1-based); tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold 1-based ranks start+1 ..= end
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 {
        return Err(Error::UndefinedCorrelation("x"));
    }
    if syy == 0.0 {
        return Err(Error::UndefinedCorrelation("y"));
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Spearman's ρ: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: x.len(),
        });
    }
    if let Some(i) = x.iter().chain(y).position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: i % x.len(),
            col: i / x.len(),
        });
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correlation {
    pub rho: f64,
    pub n: usize,
    pub criterion: Criterion,
    pub scope: Scope,
    /// True when a zero FAD forced `-FAD` in place of `1 / FAD`.
    pub negated_fad: bool,
}

struct Paired {
    metric: Vec<f64>,
    ratings: Vec<f64>,
    negated_fad: bool,
}

fn pair_up(
    fad_values: &[FadEntry],
    ratings: &RatingsTable,
    criterion: Criterion,
    scope: &Scope,
) -> Result<Paired> {
    let mut by_cell = BTreeMap::new();
    for entry in fad_values.iter().filter(|e| scope.contains(&e.category)) {
        if by_cell
            .insert((entry.system.as_str(), entry.category.as_str()), entry.fad)
            .is_some()
        {
            return Err(Error::DuplicatePair {
                system: entry.system.clone(),
                category: entry.category.clone(),
            });
        }
    }

    let mut fads = Vec::new();
    let mut scores = Vec::new();
    for row in ratings.rows().iter().filter(|r| scope.contains(&r.category)) {
        let fad = by_cell
            .remove(&(row.system.as_str(), row.category.as_str()))
            .ok_or_else(|| Error::MissingFad {
                system: row.system.clone(),
                category: row.category.clone(),
            })?;
        if !(fad >= 0.0) || !fad.is_finite() {
            return Err(Error::NegativeDistance(fad));
        }
        fads.push(fad);
        scores.push(row.score(criterion));
    }
    if let Some(((system, category), _)) = by_cell.into_iter().next() {
        return Err(Error::MissingRating {
            system: system.into(),
            category: category.into(),
        });
    }
    if fads.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: fads.len(),
        });
    }

    let negated_fad = fads.contains(&0.0);
    let metric = if negated_fad {
        fads.iter().map(|f| -f).collect()
    } else {
        fads.iter().map(|f| 1.0 / f).collect()
    };
    Ok(Paired {
        metric,
        ratings: scores,
        negated_fad,
    })
}

/// Spearman ρ between inverse FAD and one rating criterion over `scope`.
///
/// Every in-scope cell must be present in both inputs.
pub fn correlate(
    fad_values: &[FadEntry],
    ratings: &RatingsTable,
    criterion: Criterion,
    scope: &Scope,
) -> Result<Correlation> {
    let paired = pair_up(fad_values, ratings, criterion, scope)?;
    Ok(Correlation {
        rho: spearman(&paired.metric, &paired.ratings)?,
        n: paired.metric.len(),
        criterion,
        scope: scope.clone(),
        negated_fad: paired.negated_fad,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapConfig {
    pub noise_std: f64,
    pub reps: usize,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            noise_std: 1.0,
            reps: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Uncertainty {
    pub mean_rho: f64,
    pub std_rho: f64,
    pub reps: usize,
    pub noise_std: f64,
    pub seed: u64,
}

/// Uniform on (0, 1) from the top 53 bits; never 0 or 1.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Deterministic standard-normal stream for one bootstrap repetition.
pub fn normal_stream(seed: u64, rep: u64) -> impl Iterator<Item = f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    core::iter::repeat_with(move || inverse_normal_cdf(open_unit(&mut rng)))
}

/// Spearman ρ under Gaussian noise on the ratings, repeated `config.reps`
/// times. Returns the mean and population standard deviation of ρ.
pub fn bootstrap_uncertainty(
    fad_values: &[FadEntry],
    ratings: &RatingsTable,
    criterion: Criterion,
    scope: &Scope,
    config: &BootstrapConfig,
) -> Result<Uncertainty> {
    if config.reps == 0 {
        return Err(Error::InvalidArgument("bootstrap needs at least one repetition".into()));
    }
    if !(config.noise_std.is_finite() && config.noise_std >= 0.0) {
        return Err(Error::InvalidArgument("noise std must be finite and >= 0".into()));
    }
    let paired = pair_up(fad_values, ratings, criterion, scope)?;
    let mut noisy = paired.ratings.clone();
    let mut rhos = Vec::with_capacity(config.reps);
    for rep in 0..config.reps {
        for ((dst, base), z) in noisy
            .iter_mut()
            .zip(&paired.ratings)
            .zip(normal_stream(config.seed, rep as u64))
        {
            *dst = base + config.noise_std * z;
        }
        rhos.push(spearman(&paired.metric, &noisy)?);
    }
    let (mean_rho, std_rho) = mean_and_population_std(&rhos);
    Ok(Uncertainty {
        mean_rho,
        std_rho,
        reps: config.reps,
        noise_std: config.noise_std,
        seed: config.seed,
    })
}

// Shifted by the first sample, so identical inputs give exactly their value
// and a zero spread.
fn mean_and_population_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let shift = xs[0];
    let mean_offset = xs.iter().map(|x| x - shift).sum::<f64>() / n;
    let var = xs
        .iter()
        .map(|x| {
            let d = x - shift - mean_offset;
            d * d
        })
        .sum::<f64>()
        / n;
    (shift + mean_offset, libm::sqrt(var))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub rho: f64,
    pub n: usize,
    pub criterion: Criterion,
    pub scope: Scope,
    pub negated_fad: bool,
    pub uncertainty: Uncertainty,
}

impl CorrelationReport {
    /// Noiseless correlation plus its bootstrap uncertainty.
    pub fn compute(
        fad_values: &[FadEntry],
        ratings: &RatingsTable,
        criterion: Criterion,
        scope: &Scope,
        config: &BootstrapConfig,
    ) -> Result<Self> {
        let c = correlate(fad_values, ratings, criterion, scope)?;
        let uncertainty = bootstrap_uncertainty(fad_values, ratings, criterion, scope, config)?;
        Ok(CorrelationReport {
            rho: c.rho,
            n: c.n,
            criterion,
            scope: c.scope,
            negated_fad: c.negated_fad,
            uncertainty,
        })
    }
}
