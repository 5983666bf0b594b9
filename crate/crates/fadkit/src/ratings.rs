//! Ratings CSV: `system,category,audio_quality,category_fit`, one row per
//! (system, category) cell.

use std::path::Path;

use fadkit_core::{RatingRow, RatingsTable};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const RATINGS_HEADER: [&str; 4] = ["system", "category", "audio_quality", "category_fit"];

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    system: String,
    category: String,
    audio_quality: f64,
    category_fit: f64,
}

pub fn read_ratings(path: &Path) -> Result<RatingsTable> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let header = reader.headers().map_err(csv_err)?;
    if header.iter().ne(RATINGS_HEADER) {
        return Err(Error::Data(format!(
            "{}: header must be {}",
            path.display(),
            RATINGS_HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for record in reader.deserialize::<Row>() {
        let r = record.map_err(csv_err)?;
        rows.push(RatingRow {
            system: r.system,
            category: r.category,
            audio_quality: r.audio_quality,
            category_fit: r.category_fit,
        });
    }
    RatingsTable::new(rows).map_err(Error::in_file(path))
}

pub fn write_ratings(table: &RatingsTable, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for r in table.rows() {
        writer
            .serialize(Row {
                system: r.system.clone(),
                category: r.category.clone(),
                audio_quality: r.audio_quality,
                category_fit: r.category_fit,
            })
            .map_err(|source| Error::Csv {
                path: path.to_path_buf(),
                source,
            })?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::io(path)(e.into_error()))?;
    crate::io::write_bytes(path, &bytes)
}
