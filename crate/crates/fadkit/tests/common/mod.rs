#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use fadkit::io::write_embeddings;
use fadkit::manifest::{Manifest, ManifestEntry, ModelSpec};
use fadkit::ratings::write_ratings;
use fadkit_core::{Matrix, RatingRow, RatingsTable};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

pub const MODEL: &str = "toy";
pub const RATE_HZ: f64 = 2.0;

pub const DCASE: [&str; 7] = [
    "dog_bark",
    "footstep",
    "gunshot",
    "keyboard",
    "moving_motor_vehicle",
    "rain",
    "sneeze_cough",
];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut StdRng, rows: usize, cols: usize, mean: &[f64], scale: f64) -> Matrix {
    let data = (0..rows * cols)
        .map(|i| mean[i % cols] + scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}

pub struct Clip {
    pub system: String,
    pub category: String,
    pub frames: Matrix,
}

impl Clip {
    pub fn new(system: &str, category: &str, frames: Matrix) -> Self {
        Clip {
            system: system.into(),
            category: category.into(),
            frames,
        }
    }
}

/// Writes each clip as `emb/<system>/<category>/<n>.emb` and a manifest
/// listing them in order. Returns the manifest path.
pub fn write_manifest(dir: &Path, dim: usize, clips: &[Clip], categories: Option<&[&str]>) -> PathBuf {
    let mut entries = Vec::new();
    for (i, clip) in clips.iter().enumerate() {
        let rel = format!("emb/{}/{}/{i:04}.emb", clip.system, clip.category);
        write_embeddings(&clip.frames, RATE_HZ, &dir.join(&rel)).unwrap();
        entries.push(ManifestEntry {
            clip_id: format!("{}-{}-{i:04}", clip.system, clip.category),
            path: rel,
            category: clip.category.clone(),
            system: clip.system.clone(),
            model: MODEL.into(),
            extra: BTreeMap::new(),
        });
    }
    let models = BTreeMap::from([(
        MODEL.to_string(),
        ModelSpec {
            dim,
            rate_hz: RATE_HZ,
            extra: BTreeMap::new(),
        },
    )]);
    let categories = categories.map(|c| c.iter().map(|s| s.to_string()).collect());
    let manifest = Manifest::new(models, categories, entries, dir).unwrap();
    let path = dir.join("manifest.json");
    manifest.save(&path).unwrap();
    path
}

pub fn system_name(s: usize) -> String {
    format!("sys{s}")
}

/// Noise level of evaluation system `s` (1-based).
pub fn noise_level(s: usize) -> f64 {
    0.3 * s as f64
}

/// Reference clips per category drawn from category-specific Gaussians, and
/// `systems` evaluation systems whose clips are the reference clips plus
/// white noise of increasing level.
pub fn noised_grid(
    dir: &Path,
    systems: usize,
    categories: &[&str],
    clips_per_cell: usize,
    frames_per_clip: usize,
    dim: usize,
    seed: u64,
) -> PathBuf {
    let mut rng = rng(seed);
    let mut clips = Vec::new();
    let mut reference = Vec::new();
    for (ci, category) in categories.iter().enumerate() {
        let mean: Vec<f64> = (0..dim).map(|j| ((ci * dim + j) as f64 * 0.7).sin() * 3.0).collect();
        let scale = 0.5 + 0.25 * ci as f64;
        for _ in 0..clips_per_cell {
            let frames = gaussian(&mut rng, frames_per_clip, dim, &mean, scale);
            reference.push((category.to_string(), frames.clone()));
            clips.push(Clip::new("reference", category, frames));
        }
    }
    for s in 1..=systems {
        for (category, frames) in &reference {
            let noise = gaussian(&mut rng, frames.rows(), dim, &vec![0.0; dim], noise_level(s));
            let data = frames
                .as_slice()
                .iter()
                .zip(noise.as_slice())
                .map(|(a, b)| a + b)
                .collect();
            clips.push(Clip::new(
                &system_name(s),
                category,
                Matrix::from_vec(frames.rows(), dim, data).unwrap(),
            ));
        }
    }
    write_manifest(dir, dim, &clips, Some(categories))
}

/// Ratings where both criteria equal minus the system's noise level.
pub fn noise_ratings(path: &Path, systems: usize, categories: &[&str]) {
    let rows = (1..=systems)
        .flat_map(|s| {
            categories.iter().map(move |c| RatingRow {
                system: system_name(s),
                category: c.to_string(),
                audio_quality: -noise_level(s),
                category_fit: -noise_level(s),
            })
        })
        .collect();
    write_ratings(&RatingsTable::new(rows).unwrap(), path).unwrap();
}

/// Runs the `fadkit` binary with a fixed worker count.
pub fn fadkit(args: &[&str], threads: &str) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_fadkit"))
        .args(args)
        .env("FADKIT_THREADS", threads)
        .output()
        .expect("fadkit binary runs")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}
