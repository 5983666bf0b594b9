//! File-level reading and writing of `.emb` frames, stats caches and
//! projection files.

use std::fs;
use std::io::Read;
use std::path::Path;

use fadkit_core::embedding::EMB_HEADER_LEN;
use fadkit_core::{EmbeddingHeader, EmbeddingMatrix, GaussianStats, Matrix, PcaProjection};

use crate::{Error, Result};

/// Writes `frames` (one row per frame) as a `.emb` file.
pub fn write_embeddings(frames: &Matrix, frame_rate_hz: f64, path: &Path) -> Result<()> {
    let m = EmbeddingMatrix::from_matrix(frames, frame_rate_hz).map_err(Error::in_file(path))?;
    write_embedding_matrix(&m, path)
}

pub fn write_embedding_matrix(m: &EmbeddingMatrix, path: &Path) -> Result<()> {
    write_bytes(path, &m.encode())
}

pub fn read_embeddings(path: &Path) -> Result<EmbeddingMatrix> {
    let bytes = fs::read(path).map_err(Error::io(path))?;
    EmbeddingMatrix::decode(&bytes).map_err(Error::in_file(path))
}

/// Reads and validates only the 24-byte header.
pub fn read_header(path: &Path) -> Result<EmbeddingHeader> {
    let mut buf = [0u8; EMB_HEADER_LEN];
    let mut file = fs::File::open(path).map_err(Error::io(path))?;
    let mut filled = 0;
    while filled < buf.len() {
        match file.read(&mut buf[filled..]).map_err(Error::io(path))? {
            0 => break,
            n => filled += n,
        }
    }
    EmbeddingHeader::decode(&buf[..filled]).map_err(Error::in_file(path))
}

pub fn write_stats(stats: &GaussianStats, path: &Path) -> Result<()> {
    write_bytes(path, &stats.encode())
}

pub fn read_stats(path: &Path) -> Result<GaussianStats> {
    let bytes = fs::read(path).map_err(Error::io(path))?;
    GaussianStats::decode(&bytes).map_err(Error::in_file(path))
}

pub fn write_projection(p: &PcaProjection, path: &Path) -> Result<()> {
    write_bytes(path, &p.encode())
}

pub fn read_projection(path: &Path) -> Result<PcaProjection> {
    let bytes = fs::read(path).map_err(Error::io(path))?;
    PcaProjection::decode(&bytes).map_err(Error::in_file(path))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(Error::io(parent))?;
    }
    fs::write(path, bytes).map_err(Error::io(path))
}
