//! Win/tie/loss and median[Q1,Q3] summaries against a baseline config.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{BenchmarkRecord, ConfigKey};
use crate::error::{Error, Result};
use crate::stats::{mean, quantile};

/// Mean accuracy differences within this margin (0.5 percentage points)
/// count as ties.
pub const TIE_MARGIN: f64 = 0.005;

/// Slack for the representation error of differences that sit exactly on
/// the margin, such as `0.905 - 0.9`.
const MARGIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Win,
    Tie,
    Loss,
}

impl Outcome {
    pub fn classify(delta: f64) -> Self {
        if delta.abs() <= TIE_MARGIN + MARGIN_SLACK {
            Outcome::Tie
        } else if delta > 0.0 {
            Outcome::Win
        } else {
            Outcome::Loss
        }
    }
}

/// One compared configuration. Accuracy differences are in percentage
/// points; ratios are medians over datasets of `config / baseline` phase
/// times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub probe: String,
    pub scales: usize,
    pub alpha: f64,
    pub baseline: String,
    pub datasets: usize,
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
    pub acc_diff_median: f64,
    pub acc_diff_q1: f64,
    pub acc_diff_q3: f64,
    pub abs_acc_diff_median: f64,
    pub abs_acc_diff_q1: f64,
    pub abs_acc_diff_q3: f64,
    pub train_ratio: f64,
    pub infer_ratio: f64,
    /// Datasets dropped because a cell of either config failed.
    pub excluded: usize,
}

type Cells<'a> = BTreeMap<(ConfigKey, &'a str, u64), &'a BenchmarkRecord>;

/// Compares every configuration sharing the baseline's probe against the
/// baseline, the baseline itself included. Datasets are compared on the
/// seeds the compared config has; each of those seeds needs a baseline
/// record.
pub fn summarize(records: &[BenchmarkRecord], baseline: &ConfigKey) -> Result<Vec<SummaryRow>> {
    let mut cells: Cells<'_> = BTreeMap::new();
    for r in records {
        if cells.insert((r.key(), r.dataset.as_str(), r.seed), r).is_some() {
            return Err(Error::InvalidConfig(format!(
                "duplicate record for {} {} seed {}",
                r.dataset,
                r.key(),
                r.seed
            )));
        }
    }
    let configs: BTreeSet<ConfigKey> = cells
        .keys()
        .filter(|(k, _, _)| k.probe == baseline.probe)
        .map(|(k, _, _)| k.clone())
        .collect();
    configs.iter().map(|c| summarize_one(&cells, c, baseline)).collect()
}

/// [`summarize`] for every probe present, each against its own baseline
/// at `scales` and `alpha`.
pub fn summarize_against_scales(records: &[BenchmarkRecord], scales: usize, alpha: f64) -> Result<Vec<SummaryRow>> {
    let probes: BTreeSet<&str> = records.iter().map(|r| r.probe.as_str()).collect();
    let mut rows = Vec::new();
    for probe in probes {
        rows.extend(summarize(records, &ConfigKey::new(scales, alpha, probe))?);
    }
    Ok(rows)
}

fn summarize_one(cells: &Cells<'_>, config: &ConfigKey, baseline: &ConfigKey) -> Result<SummaryRow> {
    let mut by_dataset: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
    for (k, d, s) in cells.keys() {
        if k == config {
            by_dataset.entry(d).or_default().push(*s);
        }
    }
    let mut deltas = Vec::new();
    let mut train_ratios = Vec::new();
    let mut infer_ratios = Vec::new();
    let mut excluded = 0;
    for (dataset, seeds) in by_dataset {
        let mut pairs = Vec::with_capacity(seeds.len());
        for seed in seeds {
            let ours = cells[&(config.clone(), dataset, seed)];
            let base = cells.get(&(baseline.clone(), dataset, seed)).ok_or_else(|| Error::MissingBaseline {
                dataset: dataset.to_string(),
                config: format!("{baseline} seed {seed}"),
            })?;
            pairs.push((ours, *base));
        }
        if pairs.iter().any(|(a, b)| !a.is_ok() || !b.is_ok()) {
            log::warn!("excluding {dataset} from {config} vs {baseline}: a compared cell failed");
            excluded += 1;
            continue;
        }
        let diffs: Vec<f64> = pairs
            .iter()
            .map(|(a, b)| a.accuracy.unwrap_or(0.0) - b.accuracy.unwrap_or(0.0))
            .collect();
        deltas.push(mean(&diffs));
        let phase = |f: fn(&BenchmarkRecord) -> f64, side: usize| {
            mean(&pairs.iter().map(|p| f(if side == 0 { p.0 } else { p.1 })).collect::<Vec<_>>())
        };
        train_ratios.push(ratio(phase(BenchmarkRecord::t_train, 0), phase(BenchmarkRecord::t_train, 1)));
        infer_ratios.push(ratio(phase(BenchmarkRecord::t_infer, 0), phase(BenchmarkRecord::t_infer, 1)));
    }
    let outcomes: Vec<Outcome> = deltas.iter().map(|&d| Outcome::classify(d)).collect();
    let count = |o: Outcome| outcomes.iter().filter(|&&x| x == o).count();
    let pp: Vec<f64> = deltas.iter().map(|d| d * 100.0).collect();
    let abs_pp: Vec<f64> = pp.iter().map(|d| d.abs()).collect();
    Ok(SummaryRow {
        probe: config.probe.clone(),
        scales: config.scales,
        alpha: config.alpha,
        baseline: baseline.to_string(),
        datasets: deltas.len(),
        wins: count(Outcome::Win),
        ties: count(Outcome::Tie),
        losses: count(Outcome::Loss),
        acc_diff_median: quantile(&pp, 0.5),
        acc_diff_q1: quantile(&pp, 0.25),
        acc_diff_q3: quantile(&pp, 0.75),
        abs_acc_diff_median: quantile(&abs_pp, 0.5),
        abs_acc_diff_q1: quantile(&abs_pp, 0.25),
        abs_acc_diff_q3: quantile(&abs_pp, 0.75),
        train_ratio: quantile(&train_ratios, 0.5),
        infer_ratio: quantile(&infer_ratios, 0.5),
        excluded,
    })
}

/// `num / den`, with `0 / 0` read as 1 so identical zero timings compare
/// as equal.
fn ratio(num: f64, den: f64) -> f64 {
    if num == den {
        1.0
    } else {
        num / den
    }
}
