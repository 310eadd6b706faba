#![allow(dead_code)]

use roman::synth::{InstanceMeta, SynthTask, TaskMeta};

/// Checks every instance of both splits against its family's geometry.
pub fn check_geometry(task: &SynthTask) -> Result<(), String> {
    let length = task.spec.length;
    for set in [&task.train, &task.test] {
        for (i, (meta, &label)) in set.meta.iter().zip(set.labels()).enumerate() {
            let fail = |what: &str| Err(format!("{} instance {i}: {what}", set.dataset.id));
            match (&task.task, meta) {
                (TaskMeta::Position { class_ranges }, InstanceMeta::Position { distance, amplitude }) => {
                    let (lo, hi) = class_ranges[label];
                    if !(lo..hi).contains(distance) {
                        return fail("distance outside its class range");
                    }
                    if class_ranges[0].1 + 16 > class_ranges[1].0 {
                        return fail("class ranges closer than the gap");
                    }
                    if !(4.0..=4.5).contains(amplitude) {
                        return fail("amplitude outside [4, 4.5]");
                    }
                    if length - 1 - distance <= *distance {
                        return fail("spikes not on opposite halves");
                    }
                }
                (TaskMeta::LongRange { burst_starts, library }, InstanceMeta::LongRange { first, second }) => {
                    if (first == second) != (label == 0) {
                        return fail("pattern agreement disagrees with the label");
                    }
                    if *first >= library.len() || *second >= library.len() {
                        return fail("pattern index outside the library");
                    }
                    if *burst_starts != [length / 6 - 16, 5 * length / 6 - 16] {
                        return fail("bursts not centred at L/6 and 5L/6");
                    }
                    for p in library {
                        if p.len() != 4 || p.windows(2).any(|w| w[1] - w[0] < 6) || p[3] >= 33 {
                            return fail("library pattern violates spike constraints");
                        }
                    }
                }
                (TaskMeta::Multiscale { mask, burst }, InstanceMeta::Multiscale { coarse_phase, fine_phase }) => {
                    if (coarse_phase == fine_phase) != (label == 0) {
                        return fail("phase agreement disagrees with the label");
                    }
                    if *coarse_phase >= 4 || *fine_phase >= 4 {
                        return fail("phase index out of range");
                    }
                    if !(mask.0 <= burst.0 && burst.1 <= mask.1 && mask.1 - mask.0 == 96 && burst.1 - burst.0 == 32) {
                        return fail("burst not contained in the mask");
                    }
                }
                (TaskMeta::Invariance { target, distractors }, InstanceMeta::Invariance { instances }) => {
                    if instances.len() != 2 {
                        return fail("expected exactly two motif instances");
                    }
                    let targets = instances.iter().filter(|(_, id)| *id == 0).count();
                    if targets != label {
                        return fail("target count disagrees with the label");
                    }
                    if instances.iter().any(|&(s, id)| s + 33 > length || id > distractors.len()) {
                        return fail("instance outside the series or unknown pattern");
                    }
                    let (a, b) = (instances[0].0, instances[1].0);
                    if a.abs_diff(b) < 33 + 16 {
                        return fail("instances closer than the separation");
                    }
                    if target.len() != 4 || target.windows(2).any(|w| w[1] - w[0] < 3) {
                        return fail("target violates spike constraints");
                    }
                }
                _ => return fail("metadata of the wrong family"),
            }
        }
        let counts = set.dataset.class_counts();
        if counts[0].abs_diff(counts[1]) > 1 {
            return Err(format!("{} unbalanced: {counts:?}", set.dataset.id));
        }
    }
    Ok(())
}

/// Largest per-series |mean| and |std - 1| over a split.
pub fn normalization_error(values: &[f64], len: usize) -> f64 {
    values
        .chunks(len)
        .map(|row| {
            let n = row.len() as f64;
            let mean = row.iter().sum::<f64>() / n;
            let std = (row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            mean.abs().max((std - 1.0).abs())
        })
        .fold(0.0, f64::max)
}

/// Pyramid levels by direct evaluation of the recursion, one channel.
pub fn brute_pyramid(row: &[f64], depth: usize) -> Vec<Vec<f64>> {
    let mut levels = vec![row.to_vec()];
    for _ in 1..depth {
        let x = levels.last().unwrap();
        let n = x.len();
        let at = |i: isize| -> f64 {
            // a single sample mirrors onto itself
            if n == 1 {
                return x[0];
            }
            let j = if i < 0 { -i } else if i >= n as isize { 2 * (n as isize - 1) - i } else { i };
            x[j as usize]
        };
        let smooth: Vec<f64> = (0..n as isize)
            .map(|i| 0.25 * at(i - 1) + 0.5 * at(i) + 0.25 * at(i + 1))
            .collect();
        levels.push(smooth.into_iter().step_by(2).collect());
    }
    levels
}

/// `W_s` from its definition, by searching for the smallest count whose
/// uniform spacing keeps the overlap at least `alpha`.
pub fn brute_window_count(len: usize, base: usize, alpha: f64) -> usize {
    if len == base {
        return 1;
    }
    // smallest W with (len - base) / (W - 1) <= (1 - alpha) * base
    (2..).find(|&w| ((len - base) as f64) <= (1.0 - alpha) * base as f64 * (w - 1) as f64).unwrap()
}
