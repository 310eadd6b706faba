use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{InstanceMeta, SynthTaskSpec, TaskMeta};
use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Two identical spikes mirrored about the centre; the label is the coarse
/// distance regime of the spikes from the borders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionParams {
    pub min_distance: usize,
    /// Exclusive upper bound on the border distance.
    pub center_margin: usize,
    pub class_gap: usize,
    pub amplitude_range: (f64, f64),
    pub noise_std: f64,
}

impl Default for PositionParams {
    fn default() -> Self {
        Self {
            min_distance: 32,
            center_margin: 128,
            class_gap: 16,
            amplitude_range: (4.0, 4.5),
            noise_std: 1.0,
        }
    }
}

impl PositionParams {
    /// Half-open distance ranges `[lo, hi)` for class 0 (near the borders)
    /// and class 1. The admissible interval is split at its midpoint and
    /// half the gap is removed on each side.
    pub fn class_ranges(&self) -> Result<[(usize, usize); 2]> {
        let (lo, hi) = (self.min_distance, self.center_margin);
        let mid = (lo + hi) / 2;
        let near_end = mid.saturating_sub(self.class_gap / 2);
        let far_start = mid + (self.class_gap - self.class_gap / 2);
        if hi <= lo || near_end <= lo || far_start >= hi {
            return Err(Error::InfeasibleGeometry(format!(
                "distance interval [{lo}, {hi}) with gap {} leaves an empty class range",
                self.class_gap
            )));
        }
        Ok([(lo, near_end), (far_start, hi)])
    }
}

pub(super) struct Generator {
    params: PositionParams,
    length: usize,
    ranges: [(usize, usize); 2],
}

impl Generator {
    pub(super) fn new(params: &PositionParams, spec: &SynthTaskSpec) -> Result<Self> {
        let ranges = params.class_ranges()?;
        // spikes at d and L-1-d must stay distinct
        if 2 * params.center_margin > spec.length {
            return Err(Error::InfeasibleGeometry(format!(
                "border distance up to {} does not fit a series of length {}",
                params.center_margin, spec.length
            )));
        }
        let (a, b) = params.amplitude_range;
        if !(a.is_finite() && b.is_finite() && a <= b) || params.noise_std < 0.0 {
            return Err(Error::InvalidConfig("invalid amplitude range or noise level".into()));
        }
        Ok(Self {
            params: params.clone(),
            length: spec.length,
            ranges,
        })
    }
}

/// Noise-free position series before normalization.
pub(super) fn render_spikes(length: usize, distance: usize, amplitude: f64) -> Vec<f64> {
    let mut values = vec![0.0; length];
    values[distance] = amplitude;
    values[length - 1 - distance] = amplitude;
    values
}

impl super::Generator for Generator {
    fn task_meta(&self) -> TaskMeta {
        TaskMeta::Position {
            class_ranges: self.ranges,
        }
    }

    fn render(&self, label: usize, rng: &mut StreamRng) -> (Vec<f64>, InstanceMeta) {
        let (lo, hi) = self.ranges[label];
        let distance = rng.random_range(lo..hi);
        let (a, b) = self.params.amplitude_range;
        let amplitude = if a == b { a } else { rng.random_range(a..=b) };
        (
            render_spikes(self.length, distance, amplitude),
            InstanceMeta::Position { distance, amplitude },
        )
    }

    fn noise_std(&self) -> f64 {
        self.params.noise_std
    }
}
