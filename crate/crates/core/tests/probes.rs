use roman::probes::{
    fit_flatten_probe, fit_pooled_probe, FlattenProbeConfig, PooledConvProbeConfig, ProbeConfig, ProbeModel,
    MODEL_FORMAT_VERSION,
};
use roman::synth::{generate, Family, FamilyParams, InvarianceParams, PositionParams, SynthTaskSpec};
use roman::{Batch, BatchView, Error};

fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

fn small_pooled(seed: u64) -> PooledConvProbeConfig {
    PooledConvProbeConfig {
        n_kernels: 200,
        seed,
        ..Default::default()
    }
}

fn toy_batch() -> (Batch, Vec<usize>) {
    let task = generate(&SynthTaskSpec::new(Family::Position, 4).with_sizes(60, 10)).unwrap();
    (task.train.dataset.view().to_owned(), task.train.labels().to_vec())
}

#[test]
fn empty_batch_gives_no_predictions() {
    let (train, labels) = toy_batch();
    for cfg in [ProbeConfig::Pooled(small_pooled(0)), ProbeConfig::flatten(0)] {
        let model = cfg.fit(train.view(), &labels).unwrap();
        let empty = BatchView::new(0, 1, 512, &[]).unwrap();
        assert!(model.predict(empty).unwrap().is_empty());
    }
}

#[test]
fn predictions_follow_batch_permutation() {
    let (train, labels) = toy_batch();
    let order: Vec<usize> = (0..train.n_instances()).rev().collect();
    let shuffled = train.select(&order);
    for cfg in [ProbeConfig::Pooled(small_pooled(1)), ProbeConfig::flatten(1)] {
        let model = cfg.fit(train.view(), &labels).unwrap();
        let direct = model.predict(train.view()).unwrap();
        let permuted = model.predict(shuffled.view()).unwrap();
        let expected: Vec<usize> = order.iter().map(|&i| direct[i]).collect();
        assert_eq!(permuted, expected);
    }
}

#[test]
fn wrong_shape_is_rejected() {
    let (train, labels) = toy_batch();
    let model = ProbeConfig::Pooled(small_pooled(2)).fit(train.view(), &labels).unwrap();
    let other = vec![0.0; 2 * 256];
    let err = model.predict(BatchView::new(2, 1, 256, &other).unwrap()).unwrap_err();
    assert!(matches!(err, Error::ShapeMismatch { .. }));
    let err = ProbeConfig::flatten(0).fit(train.view(), &labels[..10]).unwrap_err();
    assert!(matches!(err, Error::ShapeMismatch { .. }));
}

#[test]
fn one_example_per_class_is_interpolated() {
    let task = generate(&SynthTaskSpec::new(Family::Invariance, 0).with_sizes(2, 2)).unwrap();
    let train = task.train.dataset.view();
    for cfg in [ProbeConfig::pooled(0), ProbeConfig::flatten(0)] {
        let model = cfg.fit(train, task.train.labels()).unwrap();
        assert_eq!(model.predict(train).unwrap(), task.train.labels());
    }
}

#[test]
fn single_class_training_is_rejected() {
    let (train, _) = toy_batch();
    let labels = vec![1; train.n_instances()];
    assert!(matches!(ProbeConfig::flatten(0).fit(train.view(), &labels), Err(Error::InvalidConfig(_))));
}

#[test]
fn constant_inputs_are_degenerate() {
    let values = vec![0.0; 6 * 64];
    let batch = BatchView::new(6, 1, 64, &values).unwrap();
    let labels = [0, 1, 0, 1, 0, 1];
    assert!(matches!(fit_pooled_probe(batch, &labels, &small_pooled(0)), Err(Error::DegenerateFeatures(_))));
    assert!(matches!(
        fit_flatten_probe(batch, &labels, &FlattenProbeConfig::linear(0)),
        Err(Error::DegenerateFeatures(_))
    ));
}

#[test]
fn non_finite_inputs_are_rejected() {
    let mut values = vec![0.5; 4 * 16];
    values[17] = f64::NAN;
    let batch = BatchView::new(4, 1, 16, &values).unwrap();
    assert!(matches!(
        ProbeConfig::flatten(0).fit(batch, &[0, 1, 0, 1]),
        Err(Error::NonFinite { channel: 0, t: 1 })
    ));
}

#[test]
fn pooled_probe_fits_separable_motif_task() {
    let mut spec = SynthTaskSpec::new(Family::Invariance, 0).with_sizes(200, 10);
    spec.params = FamilyParams::Invariance(InvarianceParams { noise_std: 0.0, ..Default::default() });
    let task = generate(&spec).unwrap();
    let model = fit_pooled_probe(task.train.dataset.view(), task.train.labels(), &PooledConvProbeConfig::default()).unwrap();
    let pred = model.predict(task.train.dataset.view()).unwrap();
    assert!(accuracy(&pred, task.train.labels()) >= 0.99);
}

#[test]
fn flatten_probe_solves_noiseless_position_task() {
    let mut spec = SynthTaskSpec::new(Family::Position, 0);
    spec.params = FamilyParams::Position(PositionParams { noise_std: 0.0, ..Default::default() });
    let task = generate(&spec).unwrap();
    let model = fit_flatten_probe(task.train.dataset.view(), task.train.labels(), &FlattenProbeConfig::default()).unwrap();
    let pred = model.predict(task.test.dataset.view()).unwrap();
    let acc = accuracy(&pred, task.test.labels());
    assert!(acc >= 0.95, "accuracy {acc}");
}

#[test]
fn pooled_probe_tolerates_circular_shifts() {
    let task = generate(&SynthTaskSpec::new(Family::Invariance, 0)).unwrap();
    let model = fit_pooled_probe(task.train.dataset.view(), task.train.labels(), &PooledConvProbeConfig::default()).unwrap();
    let test = task.test.dataset.view();
    let mut shifted = Vec::with_capacity(test.values().len());
    for i in 0..test.n_instances() {
        let row = test.instance(i);
        shifted.extend_from_slice(&row[512 - 8..]);
        shifted.extend_from_slice(&row[..512 - 8]);
    }
    let shifted = BatchView::new(test.n_instances(), 1, 512, &shifted).unwrap();
    let a = accuracy(&model.predict(test).unwrap(), task.test.labels());
    let b = accuracy(&model.predict(shifted).unwrap(), task.test.labels());
    assert!((a - b).abs() < 0.02, "{a} vs {b}");
}

#[test]
fn same_seed_gives_identical_model_bytes() {
    let (train, labels) = toy_batch();
    for cfg in [ProbeConfig::Pooled(small_pooled(3)), ProbeConfig::flatten(3)] {
        let a = cfg.fit(train.view(), &labels).unwrap().to_bytes().unwrap();
        let b = cfg.fit(train.view(), &labels).unwrap().to_bytes().unwrap();
        assert_eq!(a, b);
        let c = cfg.with_seed(4).fit(train.view(), &labels).unwrap().to_bytes().unwrap();
        assert_ne!(a, c);
    }
}

#[test]
fn fitting_is_independent_of_thread_count() {
    let (train, labels) = toy_batch();
    let cfg = ProbeConfig::Pooled(small_pooled(5));
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| cfg.fit(train.view(), &labels).unwrap());
    let b = four.install(|| cfg.fit(train.view(), &labels).unwrap());
    assert_eq!(a, b);
}

#[test]
fn model_blob_round_trips_exactly() {
    let (train, labels) = toy_batch();
    let dir = tempfile::tempdir().unwrap();
    for cfg in [ProbeConfig::Pooled(small_pooled(6)), ProbeConfig::flatten(6)] {
        let model = cfg.fit(train.view(), &labels).unwrap();
        let path = dir.path().join("model.bin");
        model.save(&path).unwrap();
        let loaded = ProbeModel::load(&path).unwrap();
        assert_eq!(loaded, model);
        assert_eq!(loaded.config(), cfg);
        assert_eq!(loaded.predict(train.view()).unwrap(), model.predict(train.view()).unwrap());
    }
}

#[test]
fn model_blob_is_validated() {
    let (train, labels) = toy_batch();
    let bytes = ProbeConfig::Pooled(small_pooled(7)).fit(train.view(), &labels).unwrap().to_bytes().unwrap();
    let mut versioned = bytes.clone();
    versioned[8..12].copy_from_slice(&(MODEL_FORMAT_VERSION + 1).to_le_bytes());
    assert!(matches!(ProbeModel::from_bytes(&versioned), Err(Error::VersionMismatch { .. })));
    let mut corrupted = bytes.clone();
    *corrupted.last_mut().unwrap() ^= 1;
    assert!(matches!(ProbeModel::from_bytes(&corrupted), Err(Error::ChecksumMismatch(_))));
    assert!(matches!(ProbeModel::from_bytes(b"not a model"), Err(Error::InvalidBlob(_))));
}
