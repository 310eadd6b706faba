use std::path::PathBuf;

use roman::bench::BenchDataset;
use roman::io::{load_dataset, load_tensor, load_ts, preprocess, save_tensor, write_ts, TensorHeader};
use roman::{route_batch, Error, RomanConfig};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn loads_archive_style_files() {
    let train = load_ts(fixture("Bumps_TRAIN.ts")).unwrap();
    assert_eq!(train.id, "Bumps");
    assert_eq!((train.n_instances(), train.channels(), train.series_len()), (4, 1, 16));
    assert_eq!(train.labels(), &[0, 0, 1, 1]);
    assert_eq!(train.provenance.nan_count, 1);
    let multi = load_dataset(fixture("Pair_TRAIN.ts")).unwrap();
    assert_eq!((multi.n_instances(), multi.channels(), multi.series_len()), (3, 2, 5));
    assert_eq!(multi.class_names(), &["1", "2", "3"]);
    assert_eq!(multi.provenance.nan_count, 5);
}

#[test]
fn preprocessing_imputes_and_normalizes() {
    let ds = preprocess(load_ts(fixture("Pair_TRAIN.ts")).unwrap());
    assert!(ds.values().iter().all(|v| v.is_finite()));
    assert!(ds.provenance.z_normalized);
    assert!(ds.provenance.nan_policy.is_some());
    // all-missing and constant rows both end up as zeros
    assert_eq!(&ds.instance(1)[..10], &[0.0; 10]);
    assert_eq!(&ds.instance(2)[5..], &[0.0; 5]);
    for row in ds.values().chunks(5).filter(|r| r.iter().any(|&v| v != 0.0)) {
        let mean = row.iter().sum::<f64>() / 5.0;
        let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 5.0;
        assert!(mean.abs() < 1e-12 && (var.sqrt() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn test_split_labels_follow_training_class_order() {
    let train = load_ts(fixture("Bumps_TRAIN.ts")).unwrap();
    let test = load_ts(fixture("Bumps_TEST.ts")).unwrap();
    assert_eq!(test.labels(), &[0, 1]);
    let pair = BenchDataset::new("Bumps", train, test).unwrap();
    assert_eq!(pair.test.labels(), &[1, 0]);
    assert_eq!(pair.test.class_names(), pair.train.class_names());
}

#[test]
fn dataset_round_trips_through_ts() {
    let ds = load_ts(fixture("Pair_TRAIN.ts")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.ts");
    write_ts(&ds, &path).unwrap();
    let back = load_ts(&path).unwrap();
    assert_eq!(back.labels(), ds.labels());
    assert_eq!(back.class_names(), ds.class_names());
    for (a, b) in ds.values().iter().zip(back.values()) {
        assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
    }
}

#[test]
fn routed_tensor_round_trips_with_plan() {
    let ds = preprocess(load_ts(fixture("Bumps_TRAIN.ts")).unwrap());
    let cfg = RomanConfig::with_depth(2, 0.5).unwrap();
    let (batch, plan) = route_batch(ds.view(), &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.f64");
    let header = TensorHeader::new(vec![batch.n_instances(), batch.channels(), batch.series_len()]).with_routing(cfg, plan.clone());
    save_tensor(&path, header, batch.values()).unwrap();
    let (back, values) = load_tensor(&path).unwrap();
    assert_eq!(values, batch.values());
    assert_eq!(back.plan.as_ref(), Some(&plan));
    assert_eq!(back.dims, vec![4, plan.total_pseudochannels(), plan.base_length()]);
}

#[test]
fn truncated_payload_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.f64");
    save_tensor(&path, TensorHeader::new(vec![2, 3]), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..40]).unwrap();
    assert!(matches!(load_tensor(&path), Err(Error::ChecksumMismatch(_))));
}
