use fadkit_core::{EmbeddingHeader, EmbeddingMatrix, Error};
use proptest::prelude::*;

/// Independent little-endian writer for the frame file layout.
fn reference_bytes(dim: u32, rate: f64, frames: &[f32]) -> Vec<u8> {
    let mut out = b"FEMB".to_vec();
    out.extend(1u32.to_le_bytes());
    out.extend(dim.to_le_bytes());
    out.extend((frames.len() as u32 / dim).to_le_bytes());
    out.extend(rate.to_le_bytes());
    for f in frames {
        out.extend(f.to_le_bytes());
    }
    out
}

#[test]
fn seven_by_128_matches_reference_layout() {
    let frames: Vec<f32> = (0..7 * 128).map(|i| (i as f32 * 0.37).sin() * 3.0).collect();
    let m = EmbeddingMatrix::new(frames.clone(), 128, 1.0 / 0.96).unwrap();
    let bytes = m.encode();
    assert_eq!(bytes.len(), 24 + 7 * 128 * 4);
    assert_eq!(bytes, reference_bytes(128, 1.0 / 0.96, &frames));
    assert_eq!(EmbeddingMatrix::decode(&bytes).unwrap(), m);
}

#[test]
fn header_rejects_bad_version_and_zero_dim() {
    let mut bytes = reference_bytes(2, 10.0, &[0.0; 4]);
    bytes[4] = 2;
    assert!(matches!(EmbeddingMatrix::decode(&bytes), Err(Error::UnsupportedVersion(2))));
    assert!(EmbeddingHeader::new(0, 1, 10.0).is_err());
}

proptest! {
    #[test]
    fn bytes_round_trip(dim in 1usize..16, n in 1usize..12, rate in 0.1f64..1000.0, seed in any::<u32>()) {
        let frames: Vec<f32> = (0..dim * n)
            .map(|i| ((i as u32).wrapping_mul(2654435761) ^ seed) as f32 / 1e6 - 2000.0)
            .collect();
        let m = EmbeddingMatrix::new(frames.clone(), dim, rate).unwrap();
        let bytes = m.encode();
        prop_assert_eq!(&bytes, &reference_bytes(dim as u32, rate, &frames));
        let back = EmbeddingMatrix::decode(&bytes).unwrap();
        prop_assert_eq!(back.frames(), &frames[..]);
        prop_assert_eq!(back.frame_rate_hz().to_bits(), rate.to_bits());
        prop_assert_eq!(back.encode(), bytes);
    }
}
