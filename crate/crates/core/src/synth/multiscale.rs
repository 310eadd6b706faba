use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{InstanceMeta, SynthTaskSpec, TaskMeta};
use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// A full-length coarse cosine, hidden inside a central mask, plus a short
/// fine burst at the centre of the mask. Class 0 when the burst phase equals
/// the coarse phase, class 1 otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiscaleParams {
    pub coarse_cycles: f64,
    pub burst_length: usize,
    pub fine_cycles: f64,
    pub mask_length: usize,
    pub phases: usize,
    pub fine_amplitude: f64,
    pub coarse_amplitude: f64,
    pub noise_std: f64,
}

impl Default for MultiscaleParams {
    fn default() -> Self {
        Self {
            coarse_cycles: 1.0,
            burst_length: 32,
            fine_cycles: 4.0,
            mask_length: 96,
            phases: 4,
            fine_amplitude: 4.0,
            coarse_amplitude: 2.0,
            noise_std: 0.75,
        }
    }
}

impl MultiscaleParams {
    /// Half-open mask and burst ranges, both centred in the series.
    pub fn layout(&self, length: usize) -> Result<((usize, usize), (usize, usize))> {
        if self.mask_length > length || self.burst_length == 0 || self.burst_length > self.mask_length {
            return Err(Error::InfeasibleGeometry(format!(
                "burst of {} is not contained in a mask of {} within {length} samples",
                self.burst_length, self.mask_length
            )));
        }
        let mask_start = (length - self.mask_length) / 2;
        let burst_start = (length - self.burst_length) / 2;
        let mask = (mask_start, mask_start + self.mask_length);
        let burst = (burst_start, burst_start + self.burst_length);
        if burst.0 < mask.0 || burst.1 > mask.1 {
            return Err(Error::InfeasibleGeometry("burst is not inside the mask".into()));
        }
        Ok((mask, burst))
    }

    /// Coarse component at `t` with phase index `phase`, ignoring the mask.
    pub fn coarse(&self, t: usize, length: usize, phase: usize) -> f64 {
        let arg = TAU * (self.coarse_cycles * t as f64 / length as f64 + phase as f64 / self.phases as f64);
        self.coarse_amplitude * arg.cos()
    }

    /// Fine component at offset `k` into the burst with phase index `phase`.
    pub fn fine(&self, k: usize, phase: usize) -> f64 {
        let arg = TAU * (self.fine_cycles * k as f64 / self.burst_length as f64 + phase as f64 / self.phases as f64);
        self.fine_amplitude * arg.cos()
    }
}

pub(super) struct Generator {
    params: MultiscaleParams,
    length: usize,
    mask: (usize, usize),
    burst: (usize, usize),
}

impl Generator {
    pub(super) fn new(params: &MultiscaleParams, spec: &SynthTaskSpec) -> Result<Self> {
        if params.phases < 2 {
            return Err(Error::InfeasibleGeometry("need at least two phases for a disagreeing class".into()));
        }
        let (mask, burst) = params.layout(spec.length)?;
        Ok(Self {
            params: params.clone(),
            length: spec.length,
            mask,
            burst,
        })
    }
}

impl super::Generator for Generator {
    fn task_meta(&self) -> TaskMeta {
        TaskMeta::Multiscale {
            mask: self.mask,
            burst: self.burst,
        }
    }

    fn render(&self, label: usize, rng: &mut StreamRng) -> (Vec<f64>, InstanceMeta) {
        let p = &self.params;
        let coarse_phase = rng.random_range(0..p.phases);
        let fine_phase = if label == 0 {
            coarse_phase
        } else {
            (coarse_phase + rng.random_range(1..p.phases)) % p.phases
        };
        let values = (0..self.length)
            .map(|t| {
                let mut v = if (self.mask.0..self.mask.1).contains(&t) {
                    0.0
                } else {
                    p.coarse(t, self.length, coarse_phase)
                };
                if (self.burst.0..self.burst.1).contains(&t) {
                    v += p.fine(t - self.burst.0, fine_phase);
                }
                v
            })
            .collect();
        (values, InstanceMeta::Multiscale { coarse_phase, fine_phase })
    }

    fn noise_std(&self) -> f64 {
        self.params.noise_std
    }
}
