//! Five-member hard-voting ensembles over stored test predictions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::summary::Outcome;
use super::PredictionSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleMode {
    /// S=1, seeds 0..=4.
    BaselineOnly,
    /// S=1 seeds 0 and 1, plus seed 0 of S=2, 3 and 4.
    MixedScale,
}

impl EnsembleMode {
    /// `(scales, seed)` of the five members.
    pub fn members(self) -> [(usize, u64); 5] {
        match self {
            EnsembleMode::BaselineOnly => [(1, 0), (1, 1), (1, 2), (1, 3), (1, 4)],
            EnsembleMode::MixedScale => [(1, 0), (1, 1), (2, 0), (3, 0), (4, 0)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub mode: EnsembleMode,
    pub probe: String,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub dataset: String,
    pub accuracy: f64,
    pub predictions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleComparison {
    pub dataset: String,
    pub baseline_accuracy: f64,
    pub mixed_accuracy: f64,
    /// `mixed - baseline`.
    pub delta: f64,
    pub outcome: Outcome,
}

/// Per-dataset comparisons with win/tie/loss totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleOutcome {
    pub comparisons: Vec<EnsembleComparison>,
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
}

/// Majority vote per instance; ties go to the lowest class index.
pub fn hard_vote(members: &[&[usize]]) -> Result<Vec<usize>> {
    let Some(first) = members.first() else {
        return Ok(Vec::new());
    };
    if let Some(bad) = members.iter().find(|m| m.len() != first.len()) {
        return Err(Error::shape(format!("{} predictions", first.len()), bad.len()));
    }
    let n_classes = members.iter().flat_map(|m| m.iter()).max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; n_classes];
    Ok((0..first.len())
        .map(|i| {
            counts.iter_mut().for_each(|c| *c = 0);
            for m in members {
                counts[m[i]] += 1;
            }
            // first maximum wins, i.e. the lowest tied class
            counts
                .iter()
                .enumerate()
                .fold((0, 0), |(bk, bc), (k, &c)| if c > bc { (k, c) } else { (bk, bc) })
                .0
        })
        .collect())
}

/// Votes the spec's members on every dataset that has predictions for the
/// spec's probe.
pub fn run_ensemble(predictions: &[PredictionSet], spec: &EnsembleSpec) -> Result<Vec<EnsembleResult>> {
    let datasets: BTreeSet<&str> = predictions
        .iter()
        .filter(|p| p.probe == spec.probe)
        .map(|p| p.dataset.as_str())
        .collect();
    datasets
        .into_iter()
        .map(|dataset| {
            let members: Vec<&PredictionSet> = spec
                .mode
                .members()
                .iter()
                .map(|&(scales, seed)| {
                    predictions
                        .iter()
                        .find(|p| {
                            p.dataset == dataset
                                && p.probe == spec.probe
                                && p.scales == scales
                                && p.seed == seed
                                && (scales == 1 || p.alpha == spec.alpha)
                        })
                        .ok_or_else(|| Error::MissingMember {
                            dataset: dataset.to_string(),
                            member: format!("{} S={scales} seed {seed}", spec.probe),
                        })
                })
                .collect::<Result<_>>()?;
            let truth = &members[0].truth;
            if let Some(bad) = members.iter().find(|m| &m.truth != truth) {
                return Err(Error::shape(
                    format!("one test split for {dataset}"),
                    format!("differing ground truth in S={} seed {}", bad.scales, bad.seed),
                ));
            }
            let votes: Vec<&[usize]> = members.iter().map(|m| m.predictions.as_slice()).collect();
            let predictions = hard_vote(&votes)?;
            if predictions.len() != truth.len() {
                return Err(Error::shape(format!("{} predictions", truth.len()), predictions.len()));
            }
            let hits = predictions.iter().zip(truth).filter(|(p, t)| p == t).count();
            Ok(EnsembleResult {
                dataset: dataset.to_string(),
                accuracy: if truth.is_empty() { 0.0 } else { hits as f64 / truth.len() as f64 },
                predictions,
            })
        })
        .collect()
}

/// Mixed-scale against baseline-only ensembles, with the summary's tie
/// margin.
pub fn compare_ensembles(predictions: &[PredictionSet], probe: &str, alpha: f64) -> Result<EnsembleOutcome> {
    let spec = |mode| EnsembleSpec {
        mode,
        probe: probe.to_string(),
        alpha,
    };
    let baseline = run_ensemble(predictions, &spec(EnsembleMode::BaselineOnly))?;
    let mixed = run_ensemble(predictions, &spec(EnsembleMode::MixedScale))?;
    let comparisons: Vec<EnsembleComparison> = baseline
        .iter()
        .zip(&mixed)
        .map(|(b, m)| {
            let delta = m.accuracy - b.accuracy;
            EnsembleComparison {
                dataset: b.dataset.clone(),
                baseline_accuracy: b.accuracy,
                mixed_accuracy: m.accuracy,
                delta,
                outcome: Outcome::classify(delta),
            }
        })
        .collect();
    let count = |o| comparisons.iter().filter(|c| c.outcome == o).count();
    Ok(EnsembleOutcome {
        wins: count(Outcome::Win),
        ties: count(Outcome::Tie),
        losses: count(Outcome::Loss),
        comparisons,
    })
}
