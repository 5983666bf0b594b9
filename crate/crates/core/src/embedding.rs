//! The `.emb` embedding interchange format.
//!
//! Layout, all little-endian:
//!
//! | bytes   | field           |
//! |---------|-----------------|
//! | 0..4    | magic `FEMB`    |
//! | 4..8    | version (`u32`) |
//! | 8..12   | dim (`u32`)     |
//! | 12..16  | frame count (`u32`) |
//! | 16..24  | frame rate in Hz (`f64`) |
//! | 24..    | `frame_count × dim` `f32`, row-major |

use alloc::vec::Vec;

use crate::{Error, Matrix, Result};

pub const EMB_MAGIC: [u8; 4] = *b"FEMB";
pub const EMB_VERSION: u32 = 1;
pub const EMB_HEADER_LEN: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingHeader {
    pub version: u32,
    pub dim: u32,
    pub frame_count: u32,
    pub frame_rate_hz: f64,
}

impl EmbeddingHeader {
    pub fn new(dim: usize, frame_count: usize, frame_rate_hz: f64) -> Result<Self> {
        let header = EmbeddingHeader {
            version: EMB_VERSION,
            dim: u32::try_from(dim).map_err(|_| Error::InvalidHeader("dim exceeds u32"))?,
            frame_count: u32::try_from(frame_count)
                .map_err(|_| Error::InvalidHeader("frame count exceeds u32"))?,
            frame_rate_hz,
        };
        header.validate()?;
        Ok(header)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != EMB_VERSION {
            return Err(Error::UnsupportedVersion(self.version));
        }
        if self.dim == 0 {
            return Err(Error::InvalidHeader("dim must be at least 1"));
        }
        if self.frame_count == 0 {
            return Err(Error::InvalidHeader("frame count must be at least 1"));
        }
        if !(self.frame_rate_hz.is_finite() && self.frame_rate_hz > 0.0) {
            return Err(Error::InvalidHeader("frame rate must be positive"));
        }
        Ok(())
    }

    pub fn payload_len(&self) -> usize {
        self.dim as usize * self.frame_count as usize * 4
    }

    pub fn encode(&self) -> [u8; EMB_HEADER_LEN] {
        let mut out = [0u8; EMB_HEADER_LEN];
        out[0..4].copy_from_slice(&EMB_MAGIC);
        out[4..8].copy_from_slice(&self.version.to_le_bytes());
        out[8..12].copy_from_slice(&self.dim.to_le_bytes());
        out[12..16].copy_from_slice(&self.frame_count.to_le_bytes());
        out[16..24].copy_from_slice(&self.frame_rate_hz.to_le_bytes());
        out
    }

    /// Parses and validates the first 24 bytes of `bytes`.
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < EMB_HEADER_LEN {
            return Err(Error::Length {
                expected: EMB_HEADER_LEN,
                found: bytes.len(),
            });
        }
        let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
        if magic != EMB_MAGIC {
            return Err(Error::BadMagic {
                expected: EMB_MAGIC,
                found: magic,
            });
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let header = EmbeddingHeader {
            version: u32_at(4),
            dim: u32_at(8),
            frame_count: u32_at(12),
            frame_rate_hz: f64::from_le_bytes(bytes[16..24].try_into().unwrap()),
        };
        header.validate()?;
        Ok(header)
    }
}

/// An `n × d` block of `f32` embedding frames, one frame per row.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    header: EmbeddingHeader,
    frames: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(frames: Vec<f32>, dim: usize, frame_rate_hz: f64) -> Result<Self> {
        if dim == 0 || !frames.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: frames.len(),
            });
        }
        check_finite_f32(&frames, dim)?;
        let header = EmbeddingHeader::new(dim, frames.len() / dim, frame_rate_hz)?;
        Ok(EmbeddingMatrix { header, frames })
    }

    /// Narrows an `f64` matrix to `f32` frames.
    pub fn from_matrix(m: &Matrix, frame_rate_hz: f64) -> Result<Self> {
        m.check_finite()?;
        let frames: Vec<f32> = m.as_slice().iter().map(|&v| v as f32).collect();
        Self::new(frames, m.cols(), frame_rate_hz)
    }

    pub fn header(&self) -> &EmbeddingHeader {
        &self.header
    }

    pub fn dim(&self) -> usize {
        self.header.dim as usize
    }

    pub fn frame_count(&self) -> usize {
        self.header.frame_count as usize
    }

    pub fn frame_rate_hz(&self) -> f64 {
        self.header.frame_rate_hz
    }

    pub fn frames(&self) -> &[f32] {
        &self.frames
    }

    pub fn frame(&self, i: usize) -> &[f32] {
        let d = self.dim();
        &self.frames[i * d..(i + 1) * d]
    }

    pub fn to_matrix(&self) -> Matrix {
        let data = self.frames.iter().map(|&v| f64::from(v)).collect();
        Matrix::from_vec(self.frame_count(), self.dim(), data).expect("shape fixed by header")
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(EMB_HEADER_LEN + self.header.payload_len());
        out.extend_from_slice(&self.header.encode());
        for v in &self.frames {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let header = EmbeddingHeader::decode(bytes)?;
        let payload = &bytes[EMB_HEADER_LEN..];
        if payload.len() != header.payload_len() {
            return Err(Error::Length {
                expected: header.payload_len(),
                found: payload.len(),
            });
        }
        let frames: Vec<f32> = payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        check_finite_f32(&frames, header.dim as usize)?;
        Ok(EmbeddingMatrix { header, frames })
    }
}

fn check_finite_f32(frames: &[f32], dim: usize) -> Result<()> {
    match frames.iter().position(|v| !v.is_finite()) {
        Some(p) => Err(Error::NonFinite {
            row: p / dim,
            col: p % dim,
        }),
        None => Ok(()),
    }
}

// Float framing arithmetic: 3.0 / 0.5 style quotients land a hair under the
// integer they represent, so round up within this slack before flooring.
const FRAMING_SLACK: f64 = 1e-9;

/// Number of analysis windows of `window_seconds`, spaced `hop_seconds`
/// apart, that fit in a clip: `floor((clip - window) / hop) + 1`.
pub fn expected_frame_count(clip_seconds: f64, window_seconds: f64, hop_seconds: f64) -> Result<usize> {
    if !(window_seconds.is_finite() && window_seconds > 0.0) {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    if !(hop_seconds.is_finite() && hop_seconds > 0.0 && hop_seconds <= window_seconds) {
        return Err(Error::InvalidArgument(
            "hop must lie in (0, window]".into(),
        ));
    }
    if !clip_seconds.is_finite() || clip_seconds < window_seconds {
        return Err(Error::Unframeable {
            clip_seconds,
            window_seconds,
        });
    }
    let steps = libm::floor((clip_seconds - window_seconds) / hop_seconds + FRAMING_SLACK);
    Ok(steps as usize + 1)
}
