//! Machine-readable outputs: the FAD CSV and the JSON reports.

use std::collections::BTreeMap;
use std::path::Path;

use fadkit_core::{CategoryMap, CorrelationReport, FadEntry, MetaCategory, VoronoiGrid};
use serde::Serialize;

use crate::io::write_bytes;
use crate::pipeline::FadRow;
use crate::{Error, Result};

pub const TOOLKIT: &str = "fadkit";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const FAD_COLUMNS: [&str; 7] = ["ref_id", "eval_id", "model", "dim", "fad", "fad_inverse", "clamped"];

/// Fixed methodological choices, recorded in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub covariance_denominator: &'static str,
    pub frame_pooling: &'static str,
    pub fad_mean_term: &'static str,
    pub trace_sqrt_route: &'static str,
    pub pca_fit_population: &'static str,
    pub pca_k: Option<usize>,
    pub mds_variant: &'static str,
    pub rank_ties: &'static str,
    pub zero_fad_metric: &'static str,
    pub bootstrap_std: &'static str,
    pub bootstrap_noise: &'static str,
}

impl Provenance {
    pub fn new(pca_k: Option<usize>) -> Self {
        Provenance {
            covariance_denominator: "n-1",
            frame_pooling: "concatenated_frames",
            fad_mean_term: "squared_euclidean",
            trace_sqrt_route: "symmetric_similar_matrix",
            pca_fit_population: "union",
            pca_k,
            mds_variant: "classical",
            rank_ties: "average",
            zero_fad_metric: "negated_fad",
            bootstrap_std: "population",
            bootstrap_noise: "chacha8_stream_per_rep_as241_inverse_cdf",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportHeader {
    pub toolkit: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub model: Option<String>,
    pub provenance: Provenance,
}

impl ReportHeader {
    pub fn new(config_hash: impl Into<String>, model: Option<&str>, pca_k: Option<usize>) -> Self {
        ReportHeader {
            toolkit: TOOLKIT,
            version: VERSION,
            config_hash: config_hash.into(),
            model: model.map(Into::into),
            provenance: Provenance::new(pca_k),
        }
    }
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

pub fn fad_csv_bytes(rows: &[FadRow]) -> Vec<u8> {
    let mut out = FAD_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let inverse = r.fad_inverse.map(|v| v.to_string()).unwrap_or_default();
        let fields = [
            csv_field(&r.result.ref_id),
            csv_field(&r.result.eval_id),
            csv_field(&r.result.model),
            r.result.dim.to_string(),
            r.result.value.to_string(),
            inverse,
            r.result.clamped.to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_fad_csv(rows: &[FadRow], path: &Path) -> Result<()> {
    write_bytes(path, &fad_csv_bytes(rows))
}

/// Per-category entries of a FAD CSV. Overall rows (an `eval_id` without a
/// `/category` suffix) are skipped.
pub fn read_fad_entries(path: &Path) -> Result<Vec<FadEntry>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    if reader.headers().map_err(csv_err)?.iter().ne(FAD_COLUMNS) {
        return Err(Error::Data(format!(
            "{}: header must be {}",
            path.display(),
            FAD_COLUMNS.join(",")
        )));
    }
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let Some((system, category)) = record[1].rsplit_once('/') else {
            continue;
        };
        let fad: f64 = record[4].parse().map_err(|_| {
            Error::Data(format!("{}: bad fad value {:?}", path.display(), &record[4]))
        })?;
        entries.push(FadEntry {
            system: system.to_string(),
            category: category.to_string(),
            fad,
        });
    }
    Ok(entries)
}

#[derive(Debug, Serialize)]
pub struct FadMeta<'a> {
    #[serde(flatten)]
    pub header: &'a ReportHeader,
    pub columns: [&'static str; 7],
    pub rows: usize,
    pub reference: &'static str,
}

#[derive(Debug, Serialize)]
pub struct CorrelationDocument<'a> {
    #[serde(flatten)]
    pub header: &'a ReportHeader,
    pub reports: &'a [CorrelationReport],
}

#[derive(Debug, Serialize)]
pub struct MapDocument<'a> {
    #[serde(flatten)]
    pub header: &'a ReportHeader,
    pub system: &'a str,
    pub labels: &'a [String],
    /// Row-major `k × k`.
    pub distances: &'a [f64],
    pub coords: Vec<[f64; 2]>,
    pub meta: BTreeMap<&'a str, Option<MetaCategory>>,
    pub stress: f64,
    pub truncated_negative_mass: f64,
    pub eigenvalues: &'a [f64],
    pub regions: &'a VoronoiGrid,
}

impl<'a> MapDocument<'a> {
    pub fn new(header: &'a ReportHeader, system: &'a str, map: &'a CategoryMap) -> Self {
        let coords = map
            .embedding
            .coords
            .row_iter()
            .map(|r| [r[0], r.get(1).copied().unwrap_or(0.0)])
            .collect();
        MapDocument {
            header,
            system,
            labels: &map.labels,
            distances: map.distances.as_slice(),
            coords,
            meta: map.labels.iter().map(String::as_str).zip(map.meta.iter().copied()).collect(),
            stress: map.embedding.stress,
            truncated_negative_mass: map.embedding.truncated_negative_mass,
            eigenvalues: &map.embedding.eigenvalues,
            regions: &map.regions,
        }
    }
}
