//! Set statistics, FAD tables, correlations and category maps over a
//! manifest.
//!
//! Each (system, category) cell is accumulated sequentially in manifest
//! order; cells run in parallel and are merged in a fixed order, so results
//! do not depend on the thread count.

use std::collections::HashSet;
use std::path::Path;

use fadkit_core::{
    fad_inverse, pairwise_fad, BootstrapConfig, CategoryMap, CorrelationReport, Criterion,
    EmbeddingMatrix, FadEntry, FadResult, FrechetReference, GaussianStats, Matrix,
    MetaCategoryScheme, MomentAccumulator, PcaProjection, RatingsTable, Scope,
};
use rayon::prelude::*;

use crate::io::write_embedding_matrix;
use crate::manifest::{accumulate_set, Manifest, SetFilter, REFERENCE_SYSTEM};
use crate::{Error, Result};

/// Per-category accumulators of one system, in the given category order.
fn system_cells(
    manifest: &Manifest,
    model: &str,
    system: &str,
    categories: &[String],
) -> Result<Vec<MomentAccumulator>> {
    categories
        .par_iter()
        .map(|c| accumulate_set(manifest, &SetFilter::new(system, Some(c), model)).map(|(acc, _)| acc))
        .collect()
}

fn merged(cells: &[MomentAccumulator], dim: usize) -> Result<MomentAccumulator> {
    let mut acc = MomentAccumulator::new(dim);
    for c in cells {
        acc.merge(c)?;
    }
    Ok(acc)
}

fn finalize(acc: &MomentAccumulator, projection: Option<&PcaProjection>, set_id: &str) -> Result<GaussianStats> {
    let stats = acc.finalize().map_err(Error::in_set(set_id))?;
    match projection {
        Some(p) => p.apply_stats(&stats).map_err(Error::in_set(set_id)),
        None => Ok(stats),
    }
}

/// Gaussian fit of one set, optionally projected.
pub fn set_stats(
    manifest: &Manifest,
    filter: &SetFilter,
    projection: Option<&PcaProjection>,
) -> Result<GaussianStats> {
    let (acc, _) = accumulate_set(manifest, filter)?;
    finalize(&acc, projection, &filter.set_id())
}

/// Moments of every frame of `model`, pooled over the reference and all
/// evaluation systems.
pub fn union_stats(manifest: &Manifest, model: &str) -> Result<GaussianStats> {
    let dim = manifest.model(model)?.dim;
    let parts: Vec<MomentAccumulator> = manifest
        .systems(model)
        .par_iter()
        .map(|s| accumulate_set(manifest, &SetFilter::new(s, None, model)).map(|(acc, _)| acc))
        .collect::<Result<_>>()?;
    merged(&parts, dim)?
        .finalize()
        .map_err(Error::in_set(&format!("{model} union")))
}

/// PCA fitted on the union population of `model`.
pub fn fit_union_projection(manifest: &Manifest, model: &str, k: usize) -> Result<PcaProjection> {
    let dim = manifest.model(model)?.dim;
    if k == 0 || k > dim {
        return Err(Error::Config(format!(
            "pca_k {k} must be between 1 and the embedding dim {dim} of model {model}"
        )));
    }
    let union = union_stats(manifest, model)?;
    PcaProjection::from_stats(&union, k).map_err(Error::in_set(&format!("{model} union")))
}

/// One row of the FAD table: overall (`category` is `None`) or per category.
#[derive(Debug, Clone, PartialEq)]
pub struct FadRow {
    pub system: String,
    pub category: Option<String>,
    pub result: FadResult,
    /// `None` when the FAD is exactly zero.
    pub fad_inverse: Option<f64>,
}

impl FadRow {
    fn new(system: &str, category: Option<&str>, result: FadResult) -> Self {
        FadRow {
            system: system.into(),
            category: category.map(Into::into),
            fad_inverse: fad_inverse(result.value).ok(),
            result,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FadOptions<'a> {
    /// Restrict evaluation to one system.
    pub system: Option<&'a str>,
    /// Restrict per-category rows to one category.
    pub category: Option<&'a str>,
    pub projection: Option<&'a PcaProjection>,
}

struct Prepared {
    set_id: String,
    reference: FrechetReference,
}

fn prepare(stats: &GaussianStats, set_id: String) -> Result<Prepared> {
    let reference = FrechetReference::new(stats).map_err(Error::in_set(&set_id))?;
    Ok(Prepared { set_id, reference })
}

/// Overall and per-category FAD of every evaluation system against the
/// reference. Rows are grouped by system in manifest order: the overall row
/// first, then one row per reference category.
pub fn fad_table(manifest: &Manifest, model: &str, opts: FadOptions<'_>) -> Result<Vec<FadRow>> {
    let spec = manifest.model(model)?;
    let dim = spec.dim;
    let out_dim = opts.projection.map_or(dim, PcaProjection::output_dim);
    if let Some(p) = opts.projection {
        if p.input_dim() != dim {
            return Err(Error::Config(format!(
                "projection expects dim {}, model {model} has {dim}",
                p.input_dim()
            )));
        }
    }

    let systems = manifest.systems(model);
    if !systems.iter().any(|s| s == REFERENCE_SYSTEM) {
        return Err(Error::Data(format!("no {REFERENCE_SYSTEM} clips for model {model}")));
    }
    let mut evals: Vec<String> = systems.into_iter().filter(|s| s != REFERENCE_SYSTEM).collect();
    if let Some(only) = opts.system {
        if !evals.iter().any(|s| s == only) {
            return Err(Error::Data(format!("system {only} has no clips for model {model}")));
        }
        evals.retain(|s| s == only);
    }
    if evals.is_empty() {
        return Err(Error::Data("no evaluation systems".into()));
    }

    let ref_all = manifest.categories_of(model, REFERENCE_SYSTEM);
    let selected: Vec<String> = match opts.category {
        Some(c) if ref_all.iter().any(|r| r == c) => vec![c.to_string()],
        Some(c) => {
            return Err(Error::Data(format!("{REFERENCE_SYSTEM} has no clips in category {c}")))
        }
        None => ref_all.clone(),
    };

    let ref_cells = system_cells(manifest, model, REFERENCE_SYSTEM, &ref_all)?;
    let ref_overall = prepare(
        &finalize(&merged(&ref_cells, dim)?, opts.projection, REFERENCE_SYSTEM)?,
        REFERENCE_SYSTEM.to_string(),
    )?;
    let ref_by_category: Vec<Prepared> = selected
        .par_iter()
        .map(|c| {
            let idx = ref_all.iter().position(|r| r == c).unwrap_or_default();
            let set_id = format!("{REFERENCE_SYSTEM}/{c}");
            prepare(&finalize(&ref_cells[idx], opts.projection, &set_id)?, set_id)
        })
        .collect::<Result<_>>()?;
    drop(ref_cells);

    let mut rows = Vec::with_capacity(evals.len() * (1 + selected.len()));
    for system in &evals {
        let categories = manifest.categories_of(model, system);
        if let Some(missing) = selected.iter().find(|c| !categories.contains(c)) {
            return Err(Error::Data(format!("set {system}/{missing} has no clips")));
        }
        let cells = system_cells(manifest, model, system, &categories)?;
        let distance = |prepared: &Prepared, acc: &MomentAccumulator, set_id: String| {
            let stats = finalize(acc, opts.projection, &set_id)?;
            let d = prepared.reference.distance(&stats).map_err(Error::in_set(&set_id))?;
            debug_assert_eq!(d.dim, out_dim);
            Ok::<_, Error>(FadResult::new(&prepared.set_id, &set_id, model, d))
        };

        let overall = distance(&ref_overall, &merged(&cells, dim)?, system.clone())?;
        rows.push(FadRow::new(system, None, overall));
        let per_category: Vec<FadRow> = selected
            .par_iter()
            .zip(&ref_by_category)
            .map(|(c, prepared)| {
                let idx = categories.iter().position(|x| x == c).unwrap_or_default();
                let result = distance(prepared, &cells[idx], format!("{system}/{c}"))?;
                Ok(FadRow::new(system, Some(c), result))
            })
            .collect::<Result<_>>()?;
        rows.extend(per_category);
    }
    Ok(rows)
}

/// Per-category FAD values in the shape correlation expects.
pub fn fad_entries(rows: &[FadRow]) -> Vec<FadEntry> {
    rows.iter()
        .filter_map(|r| {
            r.category.as_ref().map(|c| FadEntry {
                system: r.system.clone(),
                category: c.clone(),
                fad: r.result.value,
            })
        })
        .collect()
}

/// Reports for both criteria, each over the overall scope followed by every
/// rated category in order of first appearance. With `category`, only that
/// scope is reported.
pub fn correlation_reports(
    fad: &[FadEntry],
    ratings: &RatingsTable,
    config: &BootstrapConfig,
    category: Option<&str>,
) -> Result<Vec<CorrelationReport>> {
    let scopes: Vec<Scope> = match category {
        Some(c) => vec![Scope::Category(c.to_string())],
        None => std::iter::once(Scope::Overall)
            .chain(ratings.categories().into_iter().map(|c| Scope::Category(c.to_string())))
            .collect(),
    };
    let jobs: Vec<(Criterion, &Scope)> = Criterion::ALL
        .iter()
        .flat_map(|&c| scopes.iter().map(move |s| (c, s)))
        .collect();
    jobs.par_iter()
        .map(|&(criterion, scope)| {
            CorrelationReport::compute(fad, ratings, criterion, scope, config).map_err(Error::from)
        })
        .collect()
}

/// Inter-category FAD matrix of one system, labels in declared order.
pub fn category_distance_matrix(
    manifest: &Manifest,
    model: &str,
    system: &str,
    projection: Option<&PcaProjection>,
) -> Result<(Vec<String>, Matrix)> {
    let labels = manifest.categories_of(model, system);
    if labels.len() < 2 {
        return Err(Error::Data(format!(
            "system {system} has clips in {} categories for model {model}; a map needs at least 2",
            labels.len()
        )));
    }
    let cells = system_cells(manifest, model, system, &labels)?;
    let stats: Vec<GaussianStats> = cells
        .iter()
        .zip(&labels)
        .map(|(acc, c)| finalize(acc, projection, &format!("{system}/{c}")))
        .collect::<Result<_>>()?;
    let distances = pairwise_fad(&stats)?;
    Ok((labels, distances))
}

pub fn build_category_map(
    manifest: &Manifest,
    model: &str,
    system: &str,
    projection: Option<&PcaProjection>,
    grid_size: usize,
) -> Result<CategoryMap> {
    let (labels, distances) = category_distance_matrix(manifest, model, system, projection)?;
    Ok(CategoryMap::build(
        labels,
        distances,
        &MetaCategoryScheme::dcase(),
        grid_size,
    )?)
}

fn file_stem(clip_id: &str) -> String {
    clip_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect()
}

/// Projects every clip of `model` and writes `embeddings/<clip>.emb` under
/// `out_dir`. Returns the rewritten manifest, whose entries for `model` point
/// at the new files and whose other entries keep their resolved paths.
pub fn reduce_manifest(
    manifest: &Manifest,
    model: &str,
    projection: &PcaProjection,
    out_dir: &Path,
) -> Result<Manifest> {
    let spec = manifest.model(model)?.clone();
    let targets: Vec<_> = manifest.entries.iter().filter(|e| e.model == model).collect();
    let mut names = HashSet::new();
    for e in &targets {
        if !names.insert(file_stem(&e.clip_id)) {
            return Err(Error::Data(format!(
                "clip {} collides with another clip after file name sanitizing",
                e.clip_id
            )));
        }
    }
    targets.par_iter().try_for_each(|e| {
        let clip = manifest.read_clip(e)?;
        let z = projection.apply(&clip.to_matrix()).map_err(Error::in_clip(&e.clip_id))?;
        let out = EmbeddingMatrix::from_matrix(&z, clip.frame_rate_hz()).map_err(Error::in_clip(&e.clip_id))?;
        write_embedding_matrix(&out, &out_dir.join("embeddings").join(format!("{}.emb", file_stem(&e.clip_id))))
    })?;

    let mut reduced = manifest.clone();
    let new_spec = reduced.models.get_mut(model).expect("model checked above");
    new_spec.dim = projection.output_dim();
    new_spec.extra.insert("pca_input_dim".into(), spec.dim.into());
    new_spec.extra.insert("pca_projection".into(), "projection.fpca".into());
    for e in &mut reduced.entries {
        e.path = if e.model == model {
            format!("embeddings/{}.emb", file_stem(&e.clip_id))
        } else {
            let path = manifest.resolve(e);
            std::path::absolute(&path)
                .map_err(Error::io(&path))?
                .to_string_lossy()
                .into_owned()
        };
    }
    reduced.set_base_dir(out_dir);
    Ok(reduced)
}
