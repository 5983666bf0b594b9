//! The `fad`, `correlate`, `reduce`, `map` and `pipeline` commands.
//!
//! Outputs written under the configured output directory:
//!
//! | command     | files                                                    |
//! |-------------|----------------------------------------------------------|
//! | `fad`       | `fad.csv`, `fad.meta.json`, `projection.fpca` if reduced |
//! | `correlate` | `correlation.json`                                       |
//! | `reduce`    | `embeddings/*.emb`, `manifest.json`, `projection.fpca`, `reduce.meta.json` |
//! | `map`       | `category_map.json`                                      |
//! | `pipeline`  | everything `fad`, `correlate` and `map` write            |

use std::path::PathBuf;

use fadkit_core::{FadEntry, PcaProjection};
use serde::Serialize;

use crate::config::{RunConfig, DEFAULT_PCA_K};
use crate::io::write_projection;
use crate::manifest::{Manifest, REFERENCE_SYSTEM};
use crate::pipeline::{
    build_category_map, correlation_reports, fad_entries, fad_table, fit_union_projection,
    reduce_manifest, FadOptions, FadRow,
};
use crate::ratings::read_ratings;
use crate::report::{
    read_fad_entries, write_fad_csv, write_json, CorrelationDocument, FadMeta, MapDocument,
    ReportHeader,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Fad,
    Correlate,
    Reduce,
    Map,
    Pipeline,
}

pub fn run(command: Command, config: &RunConfig) -> Result<()> {
    match command {
        Command::Fad => cmd_fad(config).map(drop),
        Command::Correlate => cmd_correlate(config),
        Command::Reduce => cmd_reduce(config),
        Command::Map => cmd_map(config),
        Command::Pipeline => cmd_pipeline(config),
    }
}

fn load_manifest(config: &RunConfig) -> Result<Manifest> {
    let path = config
        .manifest
        .as_ref()
        .ok_or_else(|| Error::Config("--manifest is required".into()))?;
    Manifest::load(path)
}

/// The configured model, or the only one the manifest registers.
fn pick_model(config: &RunConfig, manifest: &Manifest) -> Result<String> {
    if let Some(m) = &config.model {
        manifest.model(m)?;
        return Ok(m.clone());
    }
    let mut names = manifest.models.keys();
    match (names.next(), names.next()) {
        (Some(only), None) => Ok(only.clone()),
        _ => Err(Error::Config(format!(
            "--model is required; the manifest registers {}",
            manifest.models.keys().cloned().collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn projection(config: &RunConfig, manifest: &Manifest, model: &str) -> Result<Option<PcaProjection>> {
    config
        .pca_k
        .map(|k| fit_union_projection(manifest, model, k))
        .transpose()
}

fn out_path(config: &RunConfig, name: &str) -> PathBuf {
    config.out.join(name)
}

struct FadRun {
    model: String,
    projection: Option<PcaProjection>,
    rows: Vec<FadRow>,
}

fn compute_fad(config: &RunConfig, manifest: &Manifest) -> Result<FadRun> {
    let model = pick_model(config, manifest)?;
    let projection = projection(config, manifest, &model)?;
    let rows = fad_table(
        manifest,
        &model,
        FadOptions {
            system: config.system.as_deref(),
            category: config.category.as_deref(),
            projection: projection.as_ref(),
        },
    )?;
    Ok(FadRun {
        model,
        projection,
        rows,
    })
}

fn write_fad(config: &RunConfig, run: &FadRun) -> Result<()> {
    let header = ReportHeader::new(config.hash(), Some(&run.model), config.pca_k);
    write_fad_csv(&run.rows, &out_path(config, "fad.csv"))?;
    write_json(
        &FadMeta {
            header: &header,
            columns: crate::report::FAD_COLUMNS,
            rows: run.rows.len(),
            reference: REFERENCE_SYSTEM,
        },
        &out_path(config, "fad.meta.json"),
    )?;
    if let Some(p) = &run.projection {
        write_projection(p, &out_path(config, "projection.fpca"))?;
    }
    Ok(())
}

pub fn cmd_fad(config: &RunConfig) -> Result<Vec<FadRow>> {
    let manifest = load_manifest(config)?;
    let run = compute_fad(config, &manifest)?;
    write_fad(config, &run)?;
    Ok(run.rows)
}

fn write_correlation(config: &RunConfig, model: Option<&str>, fad: &[FadEntry]) -> Result<()> {
    let path = config
        .ratings
        .as_ref()
        .ok_or_else(|| Error::Config("--ratings is required".into()))?;
    let ratings = read_ratings(path)?;
    let reports = correlation_reports(fad, &ratings, &config.bootstrap, config.category.as_deref())?;
    let header = ReportHeader::new(config.hash(), model, config.pca_k);
    write_json(
        &CorrelationDocument {
            header: &header,
            reports: &reports,
        },
        &out_path(config, "correlation.json"),
    )
}

/// Correlates FAD⁻¹ with ratings. FAD values come from `--fad-csv` when
/// given, otherwise they are computed from the manifest for all systems and
/// categories.
pub fn cmd_correlate(config: &RunConfig) -> Result<()> {
    if config.ratings.is_none() {
        return Err(Error::Config("--ratings is required".into()));
    }
    if let Some(csv) = &config.fad_csv {
        let entries = read_fad_entries(csv)?;
        return write_correlation(config, config.model.as_deref(), &entries);
    }
    let manifest = load_manifest(config)?;
    let all = RunConfig {
        system: None,
        category: None,
        ..config.clone()
    };
    let run = compute_fad(&all, &manifest)?;
    write_correlation(config, Some(&run.model), &fad_entries(&run.rows))
}

#[derive(Serialize)]
struct ReduceMeta<'a> {
    #[serde(flatten)]
    header: &'a ReportHeader,
    input_dim: usize,
    output_dim: usize,
    clips: usize,
    eigenvalues: &'a [f64],
}

pub fn cmd_reduce(config: &RunConfig) -> Result<()> {
    let manifest = load_manifest(config)?;
    let model = pick_model(config, &manifest)?;
    let k = config.pca_k.unwrap_or(DEFAULT_PCA_K);
    let projection = fit_union_projection(&manifest, &model, k)?;
    let reduced = reduce_manifest(&manifest, &model, &projection, &config.out)?;
    write_projection(&projection, &out_path(config, "projection.fpca"))?;
    reduced.save(&out_path(config, "manifest.json"))?;
    let header = ReportHeader::new(config.hash(), Some(&model), Some(k));
    write_json(
        &ReduceMeta {
            header: &header,
            input_dim: projection.input_dim(),
            output_dim: projection.output_dim(),
            clips: manifest.entries.iter().filter(|e| e.model == model).count(),
            eigenvalues: projection.eigenvalues(),
        },
        &out_path(config, "reduce.meta.json"),
    )
}

fn write_map(config: &RunConfig, manifest: &Manifest, model: &str, projection: Option<&PcaProjection>) -> Result<()> {
    let system = config.system.as_deref().unwrap_or(REFERENCE_SYSTEM);
    let map = build_category_map(manifest, model, system, projection, config.grid_size)?;
    let header = ReportHeader::new(config.hash(), Some(model), config.pca_k);
    write_json(
        &MapDocument::new(&header, system, &map),
        &out_path(config, "category_map.json"),
    )
}

/// 2D map of the categories of `--system` (default: the reference).
pub fn cmd_map(config: &RunConfig) -> Result<()> {
    let manifest = load_manifest(config)?;
    let model = pick_model(config, &manifest)?;
    let projection = projection(config, &manifest, &model)?;
    write_map(config, &manifest, &model, projection.as_ref())
}

/// `fad` over every system, then `correlate` on those values, then `map`.
pub fn cmd_pipeline(config: &RunConfig) -> Result<()> {
    if config.ratings.is_none() {
        return Err(Error::Config("--ratings is required".into()));
    }
    let manifest = load_manifest(config)?;
    let all = RunConfig {
        system: None,
        category: None,
        ..config.clone()
    };
    let run = compute_fad(&all, &manifest)?;
    write_fad(config, &run)?;
    write_correlation(config, Some(&run.model), &fad_entries(&run.rows))?;
    write_map(config, &manifest, &run.model, run.projection.as_ref())
}
