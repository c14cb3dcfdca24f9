use std::fs;
use std::path::Path;

use mhfc::dataio::{
    generate_synthetic, load_manifest, read_results, save_dataset, write_csv_head, write_features,
    write_fvec, write_labels, write_results, FeatureDataset, SynthConfig,
};
use mhfc::numerics::Matrix;
use mhfc::protocols::{
    aggregate, episode_rng, fused_features, sample_episode, EpisodeConfig, EpisodeShape,
};
use mhfc::Error;

fn write_manifest(dir: &Path, heads: &[(&str, &str)]) -> std::path::PathBuf {
    let heads: Vec<String> = heads
        .iter()
        .map(|(name, path)| format!(r#"{{"name":"{name}","path":"{path}"}}"#))
        .collect();
    let path = dir.join("manifest.json");
    fs::write(
        &path,
        format!(
            r#"{{"version":1,"labels":"labels.txt","heads":[{}]}}"#,
            heads.join(",")
        ),
    )
    .unwrap();
    path
}

fn ramp(n: usize, dim: usize, offset: f64) -> Matrix {
    Matrix::from_fn(n, dim, |i, j| offset + i as f64 * 0.25 - j as f64 * 0.125)
}

#[test]
fn two_head_manifest_loads() {
    let dir = tempfile::tempdir().unwrap();
    write_labels(
        &dir.path().join("labels.txt"),
        &(0..100).map(|i| i % 4).collect::<Vec<i64>>(),
    )
    .unwrap();
    write_fvec(&dir.path().join("a.fvec"), &ramp(100, 64, 0.0)).unwrap();
    write_fvec(&dir.path().join("b.fvec"), &ramp(100, 64, 1.0)).unwrap();
    let path = write_manifest(dir.path(), &[("ss-r", "a.fvec"), ("ss-s", "b.fvec")]);
    let ds = load_manifest(&path).unwrap();
    assert_eq!((ds.n_heads(), ds.n_samples(), ds.dim()), (2, 100, 64));
    assert_eq!(ds.head_names(), &["ss-r".to_string(), "ss-s".to_string()]);
    assert_eq!(ds.n_classes(), 4);
    // loading twice gives the same dataset and leaves the files alone
    let before = fs::read(dir.path().join("a.fvec")).unwrap();
    assert_eq!(load_manifest(&path).unwrap(), ds);
    assert_eq!(fs::read(dir.path().join("a.fvec")).unwrap(), before);
}

#[test]
fn manifest_errors() {
    let dir = tempfile::tempdir().unwrap();
    write_labels(&dir.path().join("labels.txt"), &vec![0; 100]).unwrap();
    write_fvec(&dir.path().join("a.fvec"), &ramp(100, 8, 0.0)).unwrap();
    write_fvec(&dir.path().join("short.fvec"), &ramp(99, 8, 0.0)).unwrap();
    write_fvec(&dir.path().join("wide.fvec"), &ramp(100, 9, 0.0)).unwrap();

    let path = write_manifest(dir.path(), &[("a", "a.fvec"), ("b", "short.fvec")]);
    assert!(matches!(
        load_manifest(&path),
        Err(Error::SampleCountMismatch(_))
    ));
    let path = write_manifest(dir.path(), &[("a", "a.fvec"), ("b", "wide.fvec")]);
    assert!(matches!(
        load_manifest(&path),
        Err(Error::HeadDimMismatch(_))
    ));
    let path = write_manifest(dir.path(), &[("a", "a.fvec"), ("b", "gone.fvec")]);
    assert!(matches!(
        load_manifest(&path),
        Err(Error::HeadFileMissing(_))
    ));

    fs::write(
        dir.path().join("bad.json"),
        r#"{"version":1,"labels":"labels.txt","heads":[],"extra":1}"#,
    )
    .unwrap();
    assert!(matches!(
        load_manifest(&dir.path().join("bad.json")),
        Err(Error::ManifestParse { .. })
    ));
    fs::write(
        dir.path().join("fake.fvec"),
        b"NOPE\x01\0\0\0\x01\0\0\0\x01\0\0\0\0\0\0\0",
    )
    .unwrap();
    let path = write_manifest(dir.path(), &[("a", "fake.fvec")]);
    assert!(matches!(load_manifest(&path), Err(Error::BadMagic(_))));
}

#[test]
fn csv_and_binary_heads_agree() {
    let dir = tempfile::tempdir().unwrap();
    let x = Matrix::from_fn(30, 5, |i, j| ((i * 7 + j * 3) % 11) as f64 / 3.0 - 1.7);
    write_labels(&dir.path().join("labels.txt"), &vec![1; 30]).unwrap();
    write_fvec(&dir.path().join("h.fvec"), &x).unwrap();
    write_csv_head(&dir.path().join("h.csv"), &x).unwrap();
    let path = write_manifest(dir.path(), &[("bin", "h.fvec"), ("text", "h.csv")]);
    let ds = load_manifest(&path).unwrap();
    for (a, b) in ds.head(0).as_slice().iter().zip(ds.head(1).as_slice()) {
        assert_eq!(*a, f64::from(*b as f32));
        assert!((a - b).abs() <= 1e-6 * b.abs().max(1.0));
    }
    for (a, b) in ds.head(0).as_slice().iter().zip(x.as_slice()) {
        assert_eq!(*a, f64::from(*b as f32));
    }
}

#[test]
fn saved_synthetic_dataset_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SynthConfig {
        n_classes: 4,
        samples_per_class: 6,
        raw_dim: 5,
        n_heads: 3,
        ..SynthConfig::default()
    };
    let ds = generate_synthetic(&cfg).unwrap();
    let path = save_dataset(&ds, dir.path()).unwrap();
    let loaded = load_manifest(&path).unwrap();
    assert_eq!(loaded.n_heads(), 3);
    assert_eq!(loaded.labels(), ds.labels());
    let narrowed: Vec<Matrix> = (0..3)
        .map(|h| Matrix::from_fn(24, 5, |i, j| f64::from(ds.head(h)[(i, j)] as f32)))
        .collect();
    let expected =
        FeatureDataset::new(narrowed, ds.labels().to_vec(), ds.head_names().to_vec()).unwrap();
    assert_eq!(loaded, expected);
}

#[test]
fn results_and_features_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut summary = aggregate(&[0.4, 0.6, 1.0]).unwrap();
    summary.config = serde_json::json!({"setting": "inductive", "eta": 1.4});
    summary.elapsed_seconds = 0.5;
    let path = dir.path().join("r.json");
    write_results(&summary, &path).unwrap();
    assert_eq!(read_results(&path).unwrap(), summary);
    let value: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    for key in [
        "config",
        "per_episode",
        "mean_accuracy",
        "ci95",
        "n_episodes",
        "elapsed_seconds",
    ] {
        assert!(value.get(key).is_some(), "{key}");
    }
    summary.per_episode.clear();
    assert!(matches!(
        write_results(&summary, &path),
        Err(Error::EmptyList)
    ));

    let ds = generate_synthetic(&SynthConfig {
        n_classes: 6,
        samples_per_class: 10,
        raw_dim: 8,
        ..SynthConfig::default()
    })
    .unwrap();
    let shape = EpisodeShape {
        query: 3,
        ..Default::default()
    };
    let ep = sample_episode(&ds, &shape, &mut episode_rng(1, 0)).unwrap();
    let (z, samples) = fused_features(&ds, &ep, &EpisodeConfig::default()).unwrap();
    let labels: Vec<i64> = samples.iter().map(|&i| ds.labels()[i]).collect();
    let csv = dir.path().join("z.csv");
    write_features(&z, &labels, &csv).unwrap();
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header, "label,f0,f1,f2,f3,f4,f5,f6,f7,f8,f9");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r.split(',').count() == 11));
}
