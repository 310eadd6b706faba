use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};

/// Sorted spike offsets inside a motif window.
pub type Pattern = Vec<usize>;

const MAX_ATTEMPTS: usize = 10_000;

/// Draws `spikes` offsets in `0..window` with consecutive gaps of at least
/// `min_spacing`, uniformly over all admissible configurations.
pub fn sample_pattern<R: Rng + ?Sized>(window: usize, spikes: usize, min_spacing: usize, rng: &mut R) -> Result<Pattern> {
    let span = spikes.saturating_sub(1) * min_spacing;
    if spikes == 0 || span >= window {
        return Err(Error::InfeasibleGeometry(format!(
            "{spikes} spikes with spacing {min_spacing} do not fit in {window} samples"
        )));
    }
    // stars and bars: a sorted multiset y_1 <= .. <= y_k from 0..=slack maps
    // to offsets y_j + j * spacing
    let slack = window - 1 - span;
    let mut picks = index::sample(rng, slack + spikes, spikes).into_vec();
    picks.sort_unstable();
    Ok(picks
        .into_iter()
        .enumerate()
        .map(|(j, c)| c - j + j * min_spacing)
        .collect())
}

/// L1 distance between two equal-size patterns after the best integer shift,
/// so a pattern and a translated copy of it are at distance 0.
pub fn pattern_distance(a: &[usize], b: &[usize]) -> usize {
    assert_eq!(a.len(), b.len(), "patterns must have the same spike count");
    let diffs: Vec<i64> = a.iter().zip(b).map(|(&x, &y)| x as i64 - y as i64).collect();
    diffs
        .iter()
        .map(|&shift| diffs.iter().map(|d| (d - shift).unsigned_abs() as usize).sum())
        .min()
        .unwrap_or(0)
}

/// A library of `size` patterns, pairwise at distance at least `min_distance`.
pub(crate) fn sample_library<R: Rng + ?Sized>(
    size: usize,
    window: usize,
    spikes: usize,
    min_spacing: usize,
    min_distance: usize,
    rng: &mut R,
) -> Result<Vec<Pattern>> {
    let mut library: Vec<Pattern> = Vec::with_capacity(size);
    let mut attempts = 0;
    while library.len() < size {
        attempts += 1;
        if attempts > MAX_ATTEMPTS {
            return Err(Error::InfeasibleGeometry(format!(
                "could not find {size} patterns at distance >= {min_distance}"
            )));
        }
        let candidate = sample_pattern(window, spikes, min_spacing, rng)?;
        if library.iter().all(|p| pattern_distance(p, &candidate) >= min_distance) {
            library.push(candidate);
        }
    }
    Ok(library)
}

/// Non-overlapping placement of `count` windows of `width` samples with at
/// least `gap` samples between consecutive windows. Starts are drawn i.i.d.
/// uniform over `0..=length - width` and the draw is repeated until the
/// constraint holds.
pub(crate) fn place_instances<R: Rng + ?Sized>(
    count: usize,
    width: usize,
    gap: usize,
    length: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_placement(count, width, gap, length)?;
    let max_start = length - width;
    for _ in 0..MAX_ATTEMPTS {
        let starts: Vec<usize> = (0..count).map(|_| rng.random_range(0..=max_start)).collect();
        let ok = starts.iter().enumerate().all(|(i, &a)| {
            starts[i + 1..].iter().all(|&b| a.abs_diff(b) >= width + gap)
        });
        if ok {
            return Ok(starts);
        }
    }
    Err(Error::InfeasibleGeometry(format!(
        "rejection sampling failed to place {count} windows of {width} with gap {gap} in {length}"
    )))
}

pub(crate) fn check_placement(count: usize, width: usize, gap: usize, length: usize) -> Result<()> {
    let needed = count * width + count.saturating_sub(1) * gap;
    if count == 0 || width == 0 || needed > length {
        return Err(Error::InfeasibleGeometry(format!(
            "{count} windows of {width} with gap {gap} need {needed} samples, series has {length}"
        )));
    }
    Ok(())
}
