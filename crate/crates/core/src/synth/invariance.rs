use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{check_placement, pattern_distance, place_instances, sample_library, sample_pattern, Pattern};
use super::{InstanceMeta, SynthTaskSpec, TaskMeta};
use crate::error::{Error, Result};
use crate::rng::{stream, StreamRng};

/// Sparse motifs at random positions. Positives carry the target motif in
/// place of one distractor; negatives carry only distractors, so both
/// classes have the same number of motif instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceParams {
    pub motif_length: usize,
    pub spikes: usize,
    pub min_spacing: usize,
    pub distractor_patterns: usize,
    pub distractor_instances: usize,
    pub target_instances: usize,
    pub min_pattern_distance: usize,
    /// Minimum number of samples between the end of one motif and the start
    /// of the next.
    pub min_separation: usize,
    pub amplitude: f64,
    pub noise_std: f64,
}

impl Default for InvarianceParams {
    fn default() -> Self {
        Self {
            motif_length: 33,
            spikes: 4,
            min_spacing: 3,
            distractor_patterns: 2,
            distractor_instances: 1,
            target_instances: 1,
            min_pattern_distance: 6,
            min_separation: 16,
            amplitude: 6.0,
            noise_std: 1.0,
        }
    }
}

impl InvarianceParams {
    pub fn total_instances(&self) -> usize {
        self.distractor_instances + self.target_instances
    }
}

pub(super) struct Generator {
    params: InvarianceParams,
    length: usize,
    target: Pattern,
    distractors: Vec<Pattern>,
}

impl Generator {
    pub(super) fn new(params: &InvarianceParams, spec: &SynthTaskSpec) -> Result<Self> {
        if params.distractor_patterns == 0 || params.target_instances == 0 {
            return Err(Error::InfeasibleGeometry("need at least one distractor pattern and one target".into()));
        }
        check_placement(params.total_instances(), params.motif_length, params.min_separation, spec.length)?;
        let mut rng = stream("synth/invariance/library", spec.seed, 0);
        let target = sample_pattern(params.motif_length, params.spikes, params.min_spacing, &mut rng)?;
        let mut distractors = Vec::with_capacity(params.distractor_patterns);
        let mut attempts = 0;
        while distractors.len() < params.distractor_patterns {
            attempts += 1;
            if attempts > 10_000 {
                return Err(Error::InfeasibleGeometry(format!(
                    "no distractor at distance >= {} from the target",
                    params.min_pattern_distance
                )));
            }
            let candidate = sample_library(1, params.motif_length, params.spikes, params.min_spacing, 0, &mut rng)?
                .remove(0);
            if pattern_distance(&target, &candidate) >= params.min_pattern_distance {
                distractors.push(candidate);
            }
        }
        Ok(Self {
            params: params.clone(),
            length: spec.length,
            target,
            distractors,
        })
    }

    fn pattern(&self, id: usize) -> &Pattern {
        if id == 0 {
            &self.target
        } else {
            &self.distractors[id - 1]
        }
    }
}

impl super::Generator for Generator {
    fn task_meta(&self) -> TaskMeta {
        TaskMeta::Invariance {
            target: self.target.clone(),
            distractors: self.distractors.clone(),
        }
    }

    fn render(&self, label: usize, rng: &mut StreamRng) -> (Vec<f64>, InstanceMeta) {
        let p = &self.params;
        let total = p.total_instances();
        let targets = if label == 1 { p.target_instances } else { 0 };
        let starts = place_instances(total, p.motif_length, p.min_separation, self.length, rng)
            .expect("placement feasibility checked at construction");
        let instances: Vec<(usize, usize)> = starts
            .into_iter()
            .enumerate()
            .map(|(slot, start)| {
                let id = if slot < targets {
                    0
                } else {
                    1 + rng.random_range(0..self.distractors.len())
                };
                (start, id)
            })
            .collect();
        let mut values = vec![0.0; self.length];
        for &(start, id) in &instances {
            for &o in self.pattern(id) {
                values[start + o] += p.amplitude;
            }
        }
        (values, InstanceMeta::Invariance { instances })
    }

    fn noise_std(&self) -> f64 {
        self.params.noise_std
    }
}
