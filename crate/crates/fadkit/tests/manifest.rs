mod common;

use std::fs;

use common::*;
use fadkit::manifest::{collect_set, Manifest, SetFilter};
use fadkit::Error;
use fadkit_core::Matrix;

fn frames(rows: usize, start: f64) -> Matrix {
    let data = (0..rows * 2).map(|i| start + i as f64).collect();
    Matrix::from_vec(rows, 2, data).unwrap()
}

#[test]
fn two_clips_concatenate_in_manifest_order() {
    let dir = tempfile::tempdir().unwrap();
    let clips = [
        Clip::new("reference", "rain", frames(3, 0.0)),
        Clip::new("reference", "dog_bark", frames(2, 500.0)),
        Clip::new("reference", "rain", frames(4, 100.0)),
    ];
    let path = write_manifest(dir.path(), 2, &clips, None);
    let manifest = Manifest::load(&path).unwrap();

    let set = collect_set(&manifest, &SetFilter::new("reference", Some("rain"), MODEL)).unwrap();
    assert_eq!(set.set_id, "reference/rain");
    assert_eq!(set.member_count, 2);
    assert_eq!(set.frames.rows(), 7);
    assert_eq!(set.frames.row(0), &[0.0, 1.0]);
    assert_eq!(set.frames.row(2), &[4.0, 5.0]);
    assert_eq!(set.frames.row(3), &[100.0, 101.0]);

    let single = collect_set(&manifest, &SetFilter::new("reference", Some("dog_bark"), MODEL)).unwrap();
    assert_eq!(single.frames, frames(2, 500.0));

    let all = collect_set(&manifest, &SetFilter::new("reference", None, MODEL)).unwrap();
    assert_eq!(all.frames.rows(), 9);
    assert_eq!(all, collect_set(&manifest, &SetFilter::new("reference", None, MODEL)).unwrap());

    let none = collect_set(&manifest, &SetFilter::new("sys1", None, MODEL)).unwrap_err();
    assert_eq!(none.exit_code(), 3);
}

#[test]
fn full_reference_set_has_700_members() {
    let dir = tempfile::tempdir().unwrap();
    let clips: Vec<Clip> = DCASE
        .iter()
        .flat_map(|c| (0..100).map(move |i| Clip::new("reference", c, frames(1, i as f64))))
        .collect();
    let manifest = Manifest::load(&write_manifest(dir.path(), 2, &clips, None)).unwrap();
    let set = collect_set(&manifest, &SetFilter::new("reference", None, MODEL)).unwrap();
    assert_eq!(set.member_count, 700);
    assert_eq!(manifest.categories_of(MODEL, "reference"), DCASE);
}

#[test]
fn structural_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_manifest(dir.path(), 2, &[Clip::new("reference", "rain", frames(2, 0.0))], None);
    let text = fs::read_to_string(&path).unwrap();

    let cases = [
        (text.replace("\"rain\"", "\"thunder\""), "not declared"),
        (text.replace("\"model\": \"toy\"", "\"model\": \"other\""), "not registered"),
        (text.replace("\"entries\": [", "\"entries\": [{\"clip_id\":\"reference-rain-0000\",\"path\":\"x\",\"category\":\"rain\",\"system\":\"reference\",\"model\":\"toy\"},"), "duplicate clip_id"),
    ];
    for (json, needle) in cases {
        fs::write(&path, json).unwrap();
        let err = Manifest::load(&path).unwrap_err();
        assert!(err.to_string().contains(needle), "{err}");
        assert_eq!(err.exit_code(), 3);
    }
    fs::write(&path, "{ not json").unwrap();
    assert!(matches!(Manifest::load(&path), Err(Error::Json { .. })));
}

#[test]
fn header_must_match_registry() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_manifest(dir.path(), 2, &[Clip::new("reference", "rain", frames(2, 0.0))], None);
    let text = fs::read_to_string(&path).unwrap().replace("\"dim\": 2", "\"dim\": 3");
    fs::write(&path, text).unwrap();
    let manifest = Manifest::load(&path).unwrap();
    let err = manifest.verify_headers().unwrap_err();
    assert!(matches!(&err, Error::Clip { clip_id, .. } if clip_id == "reference-rain-0000"));
    let err = collect_set(&manifest, &SetFilter::new("reference", None, MODEL)).unwrap_err();
    assert!(err.to_string().contains("reference-rain-0000"));
}

#[test]
fn custom_category_set_and_extra_fields_survive_a_save() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_manifest(
        dir.path(),
        2,
        &[Clip::new("reference", "speech", frames(2, 0.0))],
        Some(&["speech", "music"]),
    );
    let text = fs::read_to_string(&path).unwrap().replacen('{', "{\"notes\": {\"padding\": \"zero\"},", 1);
    fs::write(&path, &text).unwrap();
    let manifest = Manifest::load(&path).unwrap();
    assert_eq!(manifest.categories(), ["speech", "music"]);
    assert_eq!(manifest.extra["notes"]["padding"], "zero");

    let copy = dir.path().join("copy.json");
    manifest.save(&copy).unwrap();
    assert_eq!(Manifest::load(&copy).unwrap(), manifest);
}
