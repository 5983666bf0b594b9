mod common;

use std::fs;
use std::path::Path;

use common::*;
use fadkit::io::read_header;
use fadkit::manifest::Manifest;
use fadkit_core::Matrix;
use serde_json::Value;

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn ok(out: &std::process::Output) {
    assert!(
        out.status.success(),
        "status {:?}: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
}

fn code(out: &std::process::Output) -> i32 {
    out.status.code().unwrap()
}

fn small_grid(dir: &Path) -> (String, String) {
    let manifest = noised_grid(dir, 3, &DCASE, 1, 6, 3, 11);
    let ratings = dir.join("ratings.csv");
    noise_ratings(&ratings, 3, &DCASE);
    (path_str(&manifest).into(), path_str(&ratings).into())
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let (manifest, _) = small_grid(dir.path());
    let out = path_str(dir.path()).to_string() + "/out";

    let missing = dir.path().join("nope.json");
    assert_eq!(code(&fadkit(&["fad", "--manifest", path_str(&missing)], "1")), 2);
    assert_eq!(code(&fadkit(&["fad", "--frobnicate"], "1")), 2);
    assert_eq!(code(&fadkit(&["fad", "--out", &out], "1")), 2);

    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"manifest": "x", "colour": "blue"}"#).unwrap();
    let res = fadkit(&["fad", "--config", path_str(&cfg)], "1");
    assert_eq!(code(&res), 2);
    assert!(String::from_utf8_lossy(&res.stderr).contains("colour"));

    // the default of 128 components exceeds the 3-dim model
    assert_eq!(code(&fadkit(&["fad", "--manifest", &manifest, "--reduce", "--out", &out], "1")), 2);
    assert_eq!(code(&fadkit(&["fad", "--manifest", &manifest, "--model", "other", "--out", &out], "1")), 2);
    assert_eq!(code(&fadkit(&["fad", "--manifest", &manifest, "--reps", "0", "--out", &out], "1")), 2);
    assert_eq!(code(&fadkit(&["correlate", "--manifest", &manifest, "--out", &out], "1")), 2);
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_str(dir.path()).to_string() + "/out";
    let only_ref = noised_grid(&dir.path().join("a"), 0, &["rain"], 2, 4, 2, 1);
    let res = fadkit(&["fad", "--manifest", path_str(&only_ref), "--out", &out], "1");
    assert_eq!(code(&res), 3);

    // ratings lack the sys3 rows the FAD table has
    let (manifest, _) = small_grid(&dir.path().join("b"));
    let ratings = dir.path().join("partial.csv");
    noise_ratings(&ratings, 2, &DCASE);
    let res = fadkit(
        &["correlate", "--manifest", &manifest, "--ratings", path_str(&ratings), "--out", &out],
        "1",
    );
    assert_eq!(code(&res), 3, "{}", String::from_utf8_lossy(&res.stderr));

    // a clip whose header disagrees with the registry
    let m = Manifest::load(Path::new(&manifest)).unwrap();
    let clip = m.resolve(&m.entries[0]);
    fadkit::io::write_embeddings(&Matrix::from_vec(2, 2, vec![0.0; 4]).unwrap(), RATE_HZ, &clip).unwrap();
    let res = fadkit(&["fad", "--manifest", &manifest, "--out", &out], "1");
    assert_eq!(code(&res), 3);
    assert!(String::from_utf8_lossy(&res.stderr).contains(&m.entries[0].clip_id));
}

#[test]
fn constant_ratings_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let (manifest, _) = small_grid(dir.path());
    let ratings = dir.path().join("flat.csv");
    let mut text = String::from("system,category,audio_quality,category_fit\n");
    for s in 1..=3 {
        for c in DCASE {
            text += &format!("{},{c},5,5\n", system_name(s));
        }
    }
    fs::write(&ratings, text).unwrap();
    let out = path_str(dir.path()).to_string() + "/out";
    let res = fadkit(
        &["correlate", "--manifest", &manifest, "--ratings", path_str(&ratings), "--out", &out],
        "1",
    );
    assert_eq!(code(&res), 4, "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn pipeline_outputs_are_byte_identical_across_reruns_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (manifest, ratings) = small_grid(dir.path());
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        ok(&fadkit(
            &[
                "pipeline", "--manifest", &manifest, "--ratings", &ratings, "--reps", "20",
                "--noise-std", "0.5", "--seed", "9", "--grid-size", "16", "--out", path_str(&out),
            ],
            threads,
        ));
        out
    };
    let a = run("a", "1");
    let b = run("b", "1");
    let c = run("c", "4");
    let d = run("d", "0");
    for file in ["fad.csv", "fad.meta.json", "correlation.json", "category_map.json"] {
        let first = fs::read(a.join(file)).unwrap();
        for other in [&b, &c, &d] {
            assert_eq!(first, fs::read(other.join(file)).unwrap(), "{file}");
        }
    }

    let csv = fs::read_to_string(a.join("fad.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("ref_id,eval_id,model,dim,fad,fad_inverse,clamped"));
    assert_eq!(lines.count(), 3 * (1 + 7));

    let corr = read_json(&a.join("correlation.json"));
    assert_eq!(corr["toolkit"], "fadkit");
    assert_eq!(corr["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(corr["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(corr["provenance"]["covariance_denominator"], "n-1");
    assert_eq!(corr["reports"].as_array().unwrap().len(), 16);
    assert_eq!(corr["reports"][1]["n"], 3);

    let map = read_json(&a.join("category_map.json"));
    assert_eq!(map["labels"].as_array().unwrap().len(), 7);
    assert_eq!(map["distances"].as_array().unwrap().len(), 49);
    assert_eq!(map["coords"].as_array().unwrap().len(), 7);
    assert!(map["stress"].as_f64().unwrap() >= 0.0);
    assert!(map["truncated_negative_mass"].as_f64().unwrap() >= 0.0);
    let mut groups: Vec<&str> = map["meta"].as_object().unwrap().values().map(|v| v.as_str().unwrap()).collect();
    groups.sort();
    groups.dedup();
    assert_eq!(groups.len(), 3);

    // a different seed changes only the bootstrap uncertainty
    let e = dir.path().join("e");
    ok(&fadkit(
        &[
            "correlate", "--manifest", &manifest, "--ratings", &ratings, "--reps", "20",
            "--noise-std", "0.5", "--seed", "10", "--out", path_str(&e),
        ],
        "2",
    ));
    let other = read_json(&e.join("correlation.json"));
    assert_ne!(other["config_hash"], corr["config_hash"]);
    assert_eq!(other["reports"][0]["rho"], corr["reports"][0]["rho"]);
}

#[test]
fn correlate_reads_a_precomputed_fad_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (manifest, ratings) = small_grid(dir.path());
    let a = dir.path().join("a");
    ok(&fadkit(&["fad", "--manifest", &manifest, "--out", path_str(&a)], "1"));
    let csv = a.join("fad.csv");
    ok(&fadkit(
        &["correlate", "--fad-csv", path_str(&csv), "--ratings", &ratings, "--out", path_str(&a)],
        "1",
    ));
    let b = dir.path().join("b");
    ok(&fadkit(&["correlate", "--manifest", &manifest, "--ratings", &ratings, "--out", path_str(&b)], "1"));
    let from_csv = read_json(&a.join("correlation.json"));
    let direct = read_json(&b.join("correlation.json"));
    assert_eq!(from_csv["reports"], direct["reports"]);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let (manifest, ratings) = small_grid(dir.path());
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        serde_json::json!({"manifest": manifest, "ratings": ratings, "seed": 5, "reps": 7, "category": "rain"})
            .to_string(),
    )
    .unwrap();
    let by_config = dir.path().join("a");
    ok(&fadkit(&["correlate", "--config", path_str(&cfg), "--out", path_str(&by_config)], "1"));
    let by_flags = dir.path().join("b");
    ok(&fadkit(
        &[
            "correlate", "--manifest", &manifest, "--ratings", &ratings, "--seed", "5", "--reps", "7",
            "--category", "rain", "--out", path_str(&by_flags),
        ],
        "1",
    ));
    let overridden = dir.path().join("c");
    ok(&fadkit(
        &["correlate", "--config", path_str(&cfg), "--seed", "6", "--out", path_str(&overridden)],
        "1",
    ));
    let a = fs::read(by_config.join("correlation.json")).unwrap();
    assert_eq!(a, fs::read(by_flags.join("correlation.json")).unwrap());
    let c = read_json(&overridden.join("correlation.json"));
    assert_ne!(c["config_hash"], read_json(&by_config.join("correlation.json"))["config_hash"]);
    assert_eq!(c["reports"].as_array().unwrap().len(), 2);
}

#[test]
fn map_of_two_categories_lies_on_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = noised_grid(dir.path(), 1, &["rain", "sneeze_cough"], 2, 6, 3, 12);
    let out = dir.path().join("out");
    ok(&fadkit(&["map", "--manifest", path_str(&manifest), "--out", path_str(&out)], "1"));
    let map = read_json(&out.join("category_map.json"));
    let d = map["distances"][1].as_f64().unwrap();
    let p = &map["coords"];
    let gap = p[0][0].as_f64().unwrap() - p[1][0].as_f64().unwrap();
    assert!((gap.abs() - d).abs() <= 1e-9 * (1.0 + d));
    for i in 0..2 {
        assert!(p[i][1].as_f64().unwrap().abs() <= 1e-9);
    }
    assert_eq!(map["meta"]["rain"], "Texture");

    // fewer than two categories
    let single = noised_grid(&dir.path().join("s"), 1, &["rain"], 2, 6, 3, 12);
    assert_eq!(code(&fadkit(&["map", "--manifest", path_str(&single), "--out", path_str(&out)], "1")), 3);
}

#[test]
fn reduce_writes_a_usable_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = noised_grid(dir.path(), 1, &["rain", "gunshot"], 2, 8, 10, 13);
    let out = dir.path().join("reduced");
    ok(&fadkit(&["reduce", "--manifest", path_str(&manifest), "--reduce", "4", "--out", path_str(&out)], "1"));
    let reduced = Manifest::load(&out.join("manifest.json")).unwrap();
    assert_eq!(reduced.models[MODEL].dim, 4);
    assert_eq!(reduced.entries.len(), 8);
    for e in &reduced.entries {
        assert_eq!(read_header(&reduced.resolve(e)).unwrap().dim, 4);
    }
    let meta = read_json(&out.join("reduce.meta.json"));
    assert_eq!((meta["input_dim"].as_u64(), meta["output_dim"].as_u64()), (Some(10), Some(4)));

    // FAD on the reduced manifest equals FAD with on-the-fly reduction
    let fly = dir.path().join("fly");
    ok(&fadkit(&["fad", "--manifest", path_str(&manifest), "--reduce", "4", "--out", path_str(&fly)], "1"));
    let stored = dir.path().join("stored");
    ok(&fadkit(&["fad", "--manifest", path_str(&out.join("manifest.json")), "--out", path_str(&stored)], "1"));
    let values = |p: &Path| -> Vec<f64> {
        fs::read_to_string(p.join("fad.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
            .collect()
    };
    for (a, b) in values(&fly).iter().zip(values(&stored)) {
        // stored clips are rounded to f32
        assert!((a - b).abs() <= 1e-4 * (1.0 + a), "{a} vs {b}");
    }
    assert_eq!(fs::read(fly.join("projection.fpca")).unwrap(), fs::read(out.join("projection.fpca")).unwrap());

    assert_eq!(
        code(&fadkit(&["reduce", "--manifest", path_str(&manifest), "--reduce", "11", "--out", path_str(&out)], "1")),
        2
    );
}
