mod common;

use std::fs;

use common::*;
use fadkit::io::*;
use fadkit_core::{fit_pca, stats_from_matrix, ErrorClass, Matrix};

#[test]
fn single_value_file_is_28_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.emb");
    write_embeddings(&Matrix::from_vec(1, 1, vec![0.0]).unwrap(), 1.0, &path).unwrap();
    assert_eq!(fs::metadata(&path).unwrap().len(), 28);
    let back = read_embeddings(&path).unwrap();
    assert_eq!(back.frames(), &[0.0]);
    let header = read_header(&path).unwrap();
    assert_eq!((header.dim, header.frame_count), (1, 1));
}

#[test]
fn seven_by_128_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vggish.emb");
    let frames = gaussian(&mut rng(1), 7, 128, &[0.0; 128], 2.0);
    write_embeddings(&frames, 1.0, &path).unwrap();
    let first = fs::read(&path).unwrap();
    let back = read_embeddings(&path).unwrap();
    assert_eq!(back.dim(), 128);
    assert_eq!(back.frame_rate_hz(), 1.0);
    for (a, b) in back.frames().iter().zip(frames.as_slice()) {
        assert_eq!(a.to_bits(), (*b as f32).to_bits());
    }
    write_embedding_matrix(&back, &path).unwrap();
    assert_eq!(fs::read(&path).unwrap(), first);
}

#[test]
fn format_errors_are_data_errors_naming_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.emb");
    write_embeddings(&Matrix::from_vec(10, 3, vec![1.0; 30]).unwrap(), 1.0, &path).unwrap();
    let mut bytes = fs::read(&path).unwrap();

    bytes.truncate(bytes.len() - 12);
    fs::write(&path, &bytes).unwrap();
    let err = read_embeddings(&path).unwrap_err();
    assert_eq!(err.class(), ErrorClass::Data);
    assert!(err.to_string().contains("bad.emb"));

    bytes[0] = b'X';
    fs::write(&path, &bytes).unwrap();
    assert!(read_header(&path).is_err());

    let missing = read_embeddings(&dir.path().join("missing.emb")).unwrap_err();
    assert_eq!(missing.exit_code(), 3);
}

#[test]
fn non_finite_frames_are_rejected_on_write() {
    let dir = tempfile::tempdir().unwrap();
    let m = Matrix::from_vec(2, 2, vec![0.0, 1.0, f64::INFINITY, 2.0]).unwrap();
    let err = write_embeddings(&m, 1.0, &dir.path().join("x.emb")).unwrap_err();
    assert!(matches!(
        err,
        fadkit::Error::File {
            source: fadkit_core::Error::NonFinite { row: 1, col: 0 },
            ..
        }
    ));
}

#[test]
fn stats_and_projection_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let x = gaussian(&mut rng(2), 40, 5, &[1.0, 2.0, 3.0, 4.0, 5.0], 1.5);
    let stats = stats_from_matrix(&x).unwrap();
    let p = fit_pca(&x, 3).unwrap();
    let sp = dir.path().join("set.fsta");
    let pp = dir.path().join("proj.fpca");
    write_stats(&stats, &sp).unwrap();
    write_projection(&p, &pp).unwrap();
    assert_eq!(read_stats(&sp).unwrap(), stats);
    assert_eq!(read_projection(&pp).unwrap(), p);
    assert_eq!(fs::metadata(&sp).unwrap().len(), 20 + 8 * (5 + 25));
    assert_eq!(fs::metadata(&pp).unwrap().len(), 16 + 8 * (5 + 3 + 15));
    assert_eq!(&fs::read(&pp).unwrap()[..4], b"FPCA");
    assert_eq!(&fs::read(&sp).unwrap()[..4], b"FSTA");
}
