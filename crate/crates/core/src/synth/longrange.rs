use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{sample_library, Pattern};
use super::{InstanceMeta, SynthTaskSpec, TaskMeta};
use crate::error::{Error, Result};
use crate::rng::{stream, StreamRng};

/// Two sparse bursts at fixed far-apart positions; class 0 when both use the
/// same library pattern, class 1 otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRangeParams {
    pub burst_length: usize,
    pub spikes: usize,
    pub min_spacing: usize,
    pub min_pattern_distance: usize,
    pub library_size: usize,
    pub amplitude: f64,
    pub noise_std: f64,
}

impl Default for LongRangeParams {
    fn default() -> Self {
        Self {
            burst_length: 33,
            spikes: 4,
            min_spacing: 6,
            min_pattern_distance: 6,
            library_size: 3,
            amplitude: 4.0,
            noise_std: 1.0,
        }
    }
}

/// Burst windows are centred at `floor(L/6)` and `floor(5L/6)`.
pub fn burst_starts(length: usize, burst_length: usize) -> Result<[usize; 2]> {
    let half = burst_length / 2;
    let centers = [length / 6, 5 * length / 6];
    let first = centers[0].checked_sub(half);
    let second = centers[1].checked_sub(half);
    match (first, second) {
        (Some(a), Some(b)) if a + burst_length <= b && b + burst_length <= length => Ok([a, b]),
        _ => Err(Error::InfeasibleGeometry(format!(
            "bursts of {burst_length} around {centers:?} do not fit a series of length {length}"
        ))),
    }
}

pub(super) struct Generator {
    params: LongRangeParams,
    length: usize,
    starts: [usize; 2],
    library: Vec<Pattern>,
}

impl Generator {
    pub(super) fn new(params: &LongRangeParams, spec: &SynthTaskSpec) -> Result<Self> {
        if params.library_size < 2 {
            return Err(Error::InfeasibleGeometry(format!(
                "a library of {} pattern(s) cannot produce two different bursts",
                params.library_size
            )));
        }
        let starts = burst_starts(spec.length, params.burst_length)?;
        let mut rng = stream("synth/longrange/library", spec.seed, 0);
        let library = sample_library(
            params.library_size,
            params.burst_length,
            params.spikes,
            params.min_spacing,
            params.min_pattern_distance,
            &mut rng,
        )?;
        Ok(Self {
            params: params.clone(),
            length: spec.length,
            starts,
            library,
        })
    }
}

impl super::Generator for Generator {
    fn task_meta(&self) -> TaskMeta {
        TaskMeta::LongRange {
            burst_starts: self.starts,
            library: self.library.clone(),
        }
    }

    fn render(&self, label: usize, rng: &mut StreamRng) -> (Vec<f64>, InstanceMeta) {
        let n = self.library.len();
        let first = rng.random_range(0..n);
        let second = if label == 0 {
            first
        } else {
            // uniform over the other n - 1 patterns
            let k = rng.random_range(0..n - 1);
            if k >= first {
                k + 1
            } else {
                k
            }
        };
        let mut values = vec![0.0; self.length];
        for (start, pattern) in self.starts.iter().zip([first, second]) {
            for &o in &self.library[pattern] {
                values[start + o] += self.params.amplitude;
            }
        }
        (values, InstanceMeta::LongRange { first, second })
    }

    fn noise_std(&self) -> f64 {
        self.params.noise_std
    }
}
