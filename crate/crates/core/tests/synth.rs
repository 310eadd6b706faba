mod common;

use roman::synth::{
    generate, Family, FamilyParams, InstanceMeta, InvarianceParams, LongRangeParams, MultiscaleParams, PositionParams,
    SynthTaskSpec, TaskMeta,
};
use roman::Error;

fn noiseless(family: Family, seed: u64, n_train: usize, n_test: usize) -> roman::synth::SynthTask {
    let mut spec = SynthTaskSpec::new(family, seed).with_sizes(n_train, n_test);
    spec.params = match family {
        Family::Position => FamilyParams::Position(PositionParams {
            noise_std: 0.0,
            amplitude_range: (4.0, 4.0),
            ..Default::default()
        }),
        Family::LongRange => FamilyParams::LongRange(LongRangeParams { noise_std: 0.0, ..Default::default() }),
        Family::Multiscale => FamilyParams::Multiscale(MultiscaleParams { noise_std: 0.0, ..Default::default() }),
        Family::Invariance => FamilyParams::Invariance(InvarianceParams { noise_std: 0.0, ..Default::default() }),
    };
    generate(&spec).unwrap()
}

#[test]
fn default_splits_have_reference_shapes() {
    for family in Family::ALL {
        let task = generate(&SynthTaskSpec::new(family, 0)).unwrap();
        assert_eq!(task.train.dataset.n_instances(), 500);
        assert_eq!(task.test.dataset.n_instances(), 250);
        assert_eq!(task.train.dataset.channels(), 1);
        assert_eq!(task.train.dataset.series_len(), 512);
        assert_eq!(task.train.dataset.class_counts(), vec![250, 250]);
        assert_eq!(task.test.dataset.class_counts(), vec![125, 125]);
    }
}

#[test]
fn regeneration_is_bit_identical_and_seed_dependent() {
    for family in Family::ALL {
        let spec = SynthTaskSpec::new(family, 7).with_sizes(40, 20);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a, b);
        let bits = |t: &roman::synth::SynthTask| t.train.dataset.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        let c = generate(&SynthTaskSpec::new(family, 8).with_sizes(40, 20)).unwrap();
        assert_ne!(a.train.dataset.values(), c.train.dataset.values());
    }
}

#[test]
fn generation_is_independent_of_thread_count() {
    let spec = SynthTaskSpec::new(Family::Invariance, 3).with_sizes(64, 16);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| generate(&spec).unwrap());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let parallel = pool.install(|| generate(&spec).unwrap());
    assert_eq!(serial, parallel);
}

#[test]
fn series_are_z_normalized() {
    for family in Family::ALL {
        let task = generate(&SynthTaskSpec::new(family, 1).with_sizes(100, 50)).unwrap();
        for set in [&task.train, &task.test] {
            assert!(common::normalization_error(set.dataset.values(), 512) < 1e-9, "{family}");
            assert!(set.dataset.provenance.z_normalized);
        }
    }
}

#[test]
fn geometry_holds_on_every_instance() {
    for family in Family::ALL {
        for seed in 0..3 {
            let task = generate(&SynthTaskSpec::new(family, seed)).unwrap();
            common::check_geometry(&task).unwrap();
        }
    }
}

#[test]
fn position_class_ranges() {
    let ranges = PositionParams::default().class_ranges().unwrap();
    assert_eq!(ranges, [(32, 72), (88, 128)]);
    let tight = PositionParams {
        min_distance: 32,
        center_margin: 48,
        class_gap: 16,
        ..Default::default()
    };
    assert!(matches!(tight.class_ranges(), Err(Error::InfeasibleGeometry(_))));
}

#[test]
fn noiseless_position_spikes_sit_at_d_and_mirror() {
    let task = noiseless(Family::Position, 0, 60, 20);
    for (i, meta) in task.train.meta.iter().enumerate() {
        let InstanceMeta::Position { distance, .. } = meta else { panic!() };
        let row = task.train.dataset.instance(i);
        let peak = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let peaks: Vec<usize> = (0..512).filter(|&t| row[t] == peak).collect();
        assert_eq!(peaks, vec![*distance, 511 - distance]);
        assert!(row.iter().filter(|&&v| v != peak).all(|&v| v == row[0].min(row[511])));
    }
}

#[test]
fn longrange_needs_two_patterns() {
    let mut spec = SynthTaskSpec::new(Family::LongRange, 0);
    spec.params = FamilyParams::LongRange(LongRangeParams { library_size: 1, ..Default::default() });
    assert!(matches!(generate(&spec), Err(Error::InfeasibleGeometry(_))));
}

#[test]
fn longrange_bursts_centred_at_sixths() {
    let task = generate(&SynthTaskSpec::new(Family::LongRange, 0).with_sizes(4, 2)).unwrap();
    let TaskMeta::LongRange { burst_starts, .. } = task.task else { panic!() };
    assert_eq!(burst_starts.map(|s| s + 16), [512 / 6, 5 * 512 / 6]);
}

#[test]
fn noiseless_longrange_cross_correlation_separates_classes() {
    let task = noiseless(Family::LongRange, 2, 200, 20);
    let TaskMeta::LongRange { burst_starts, .. } = task.task else { panic!() };
    for (i, &label) in task.train.labels().iter().enumerate() {
        let row = task.train.dataset.instance(i);
        let floor = row.iter().cloned().fold(f64::INFINITY, f64::min);
        let window = |s: usize| row[s..s + 33].iter().map(|v| v - floor).collect::<Vec<_>>();
        let (a, b) = (window(burst_starts[0]), window(burst_starts[1]));
        let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
        let corr = dot(&a, &b) / (dot(&a, &a) * dot(&b, &b)).sqrt();
        assert_eq!(corr > 1.0 - 1e-9, label == 0, "instance {i}: corr {corr}");
    }
}

#[test]
fn noiseless_multiscale_phase_oracle_recovers_labels() {
    let params = MultiscaleParams::default();
    let task = noiseless(Family::Multiscale, 0, 200, 40);
    let TaskMeta::Multiscale { mask, burst } = task.task else { panic!() };
    // least-squares fit of scale and offset for each candidate template
    let best_phase = |samples: &[(usize, f64)], template: &dyn Fn(usize, usize) -> f64| {
        (0..params.phases)
            .map(|p| {
                let n = samples.len() as f64;
                let (mx, my) = samples.iter().fold((0.0, 0.0), |(a, b), &(t, y)| (a + template(t, p), b + y));
                let (mx, my) = (mx / n, my / n);
                let sxy: f64 = samples.iter().map(|&(t, y)| (template(t, p) - mx) * (y - my)).sum();
                let sxx: f64 = samples.iter().map(|&(t, _)| (template(t, p) - mx).powi(2)).sum();
                let beta = sxy / sxx;
                let rss: f64 = samples
                    .iter()
                    .map(|&(t, y)| (y - my - beta * (template(t, p) - mx)).powi(2))
                    .sum();
                (p, if beta > 0.0 { rss } else { f64::INFINITY })
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0
    };
    for set in [&task.train, &task.test] {
        for (i, &label) in set.labels().iter().enumerate() {
            let row = set.dataset.instance(i);
            let outside: Vec<(usize, f64)> = (0..512).filter(|t| !(mask.0..mask.1).contains(t)).map(|t| (t, row[t])).collect();
            let inside: Vec<(usize, f64)> = (burst.0..burst.1).map(|t| (t, row[t])).collect();
            let coarse = best_phase(&outside, &|t, p| params.coarse(t, 512, p));
            let fine = best_phase(&inside, &|t, p| params.fine(t - burst.0, p));
            let InstanceMeta::Multiscale { coarse_phase, fine_phase } = set.meta[i] else { panic!() };
            assert_eq!((coarse, fine), (coarse_phase, fine_phase));
            assert_eq!(usize::from(coarse != fine), label);
        }
    }
}

#[test]
fn noiseless_invariance_matched_filter_finds_target() {
    let task = noiseless(Family::Invariance, 1, 200, 20);
    let TaskMeta::Invariance { target, .. } = &task.task else { panic!() };
    for (i, &label) in task.train.labels().iter().enumerate() {
        if label == 0 {
            continue;
        }
        let row = task.train.dataset.instance(i);
        let score = |s: usize| target.iter().map(|&o| row[s + o]).sum::<f64>();
        let best = (0..=512 - 33).max_by(|&a, &b| score(a).total_cmp(&score(b))).unwrap();
        let InstanceMeta::Invariance { instances } = &task.train.meta[i] else { panic!() };
        let planted = instances.iter().find(|(_, id)| *id == 0).unwrap().0;
        assert_eq!(best, planted, "instance {i}");
    }
}

#[test]
fn invariance_separation_over_ten_thousand_series() {
    let task = generate(&SynthTaskSpec::new(Family::Invariance, 11).with_sizes(10_000, 1)).unwrap();
    for meta in &task.train.meta {
        let InstanceMeta::Invariance { instances } = meta else { panic!() };
        assert_eq!(instances.len(), 2);
        assert!(instances[0].0.abs_diff(instances[1].0) >= 16);
    }
}

#[test]
fn infeasible_invariance_placement() {
    let mut spec = SynthTaskSpec::new(Family::Invariance, 0);
    spec.length = 80;
    spec.params = FamilyParams::Invariance(InvarianceParams::default());
    assert!(matches!(generate(&spec), Err(Error::InfeasibleGeometry(_))));
}

#[test]
fn multiscale_mask_must_contain_burst() {
    let mut spec = SynthTaskSpec::new(Family::Multiscale, 0);
    spec.params = FamilyParams::Multiscale(MultiscaleParams { mask_length: 16, ..Default::default() });
    assert!(matches!(generate(&spec), Err(Error::InfeasibleGeometry(_))));
}
