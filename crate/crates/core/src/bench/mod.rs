//! Experiment grids, win/tie/loss summaries and hard-voting ensembles.
//!
//! Every cell of a grid preprocesses both splits, routes them (the S=1 cell
//! runs the identity form of the operator, so its routing time is real),
//! fits a probe and predicts the test split. `t_roman` covers the
//! preprocessing and routing of both splits; `T_train = t_roman + t_fit`
//! and `T_infer = t_roman + t_predict`.

mod ensemble;
mod records;
mod summary;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::TimeSeriesDataset;
use crate::error::{Error, Result};
use crate::io::preprocess;
use crate::probes::ProbeConfig;
use crate::routing::{route_batch, RomanConfig};

pub use ensemble::{
    compare_ensembles, hard_vote, run_ensemble, EnsembleComparison, EnsembleMode, EnsembleOutcome, EnsembleResult,
    EnsembleSpec,
};
pub use records::{
    read_predictions, read_records, read_records_csv, read_records_jsonl, write_ensemble_csv, write_jsonl_rows,
    write_predictions, write_records, write_summary_csv, RecordFormat, ENSEMBLE_CSV_HEADER, RECORD_CSV_HEADER,
    SUMMARY_CSV_HEADER,
};
pub use summary::{summarize, summarize_against_scales, Outcome, SummaryRow, TIE_MARGIN};

/// Operator settings plus probe kind: what a record was produced with.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigKey {
    pub scales: usize,
    pub alpha: f64,
    pub probe: String,
}

impl ConfigKey {
    pub fn new(scales: usize, alpha: f64, probe: impl Into<String>) -> Self {
        Self {
            scales,
            alpha,
            probe: probe.into(),
        }
    }

    fn sort_key(&self) -> (&str, usize, u64) {
        (&self.probe, self.scales, self.alpha.to_bits())
    }
}

impl PartialEq for ConfigKey {
    fn eq(&self, other: &Self) -> bool {
        self.sort_key() == other.sort_key()
    }
}

impl Eq for ConfigKey {}

impl Hash for ConfigKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.sort_key().hash(state)
    }
}

impl PartialOrd for ConfigKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ConfigKey {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.probe, self.scales)
            .cmp(&(&other.probe, other.scales))
            .then(self.alpha.total_cmp(&other.alpha))
    }
}

impl fmt::Display for ConfigKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} S={} alpha={}", self.probe, self.scales, self.alpha)
    }
}

/// One grid configuration: operator settings and a probe template whose
/// seed is replaced by the cell seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub scales: usize,
    pub alpha: f64,
    pub probe: ProbeConfig,
}

impl GridConfig {
    pub fn new(scales: usize, alpha: f64, probe: ProbeConfig) -> Self {
        Self { scales, alpha, probe }
    }

    pub fn key(&self) -> ConfigKey {
        ConfigKey::new(self.scales, self.alpha, self.probe.name())
    }
}

/// A dataset with its train and test splits, as loaded (not yet
/// preprocessed). Test labels are expressed in the training class names.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchDataset {
    pub id: String,
    pub train: TimeSeriesDataset,
    pub test: TimeSeriesDataset,
}

impl BenchDataset {
    pub fn new(id: impl Into<String>, train: TimeSeriesDataset, test: TimeSeriesDataset) -> Result<Self> {
        if train.channels() != test.channels() || train.series_len() != test.series_len() {
            return Err(Error::shape(
                format!("{}x{} (train)", train.channels(), train.series_len()),
                format!("{}x{} (test)", test.channels(), test.series_len()),
            ));
        }
        let test = if test.class_names() == train.class_names() {
            test
        } else {
            remap_labels(test, train.class_names())?
        };
        Ok(Self {
            id: id.into(),
            train,
            test,
        })
    }
}

fn remap_labels(ds: TimeSeriesDataset, names: &[String]) -> Result<TimeSeriesDataset> {
    let mapping: Vec<usize> = ds
        .class_names()
        .iter()
        .map(|n| {
            names.iter().position(|m| m == n).ok_or_else(|| {
                Error::InvalidConfig(format!("test class {n:?} does not occur among the training classes"))
            })
        })
        .collect::<Result<_>>()?;
    let labels = ds.labels().iter().map(|&l| mapping[l]).collect();
    let mut out = TimeSeriesDataset::new(
        ds.id.clone(),
        ds.channels(),
        ds.series_len(),
        ds.values().to_vec(),
        labels,
        names.to_vec(),
    )?;
    out.provenance = ds.provenance;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordStatus {
    Ok,
    Failed,
}

/// Outcome of one (dataset, config, seed) cell. Failed cells have no
/// accuracy and carry the error message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub dataset: String,
    pub scales: usize,
    pub alpha: f64,
    pub probe: String,
    pub seed: u64,
    pub status: RecordStatus,
    pub accuracy: Option<f64>,
    pub t_roman: f64,
    pub t_fit: f64,
    pub t_predict: f64,
    pub error: Option<String>,
}

impl BenchmarkRecord {
    pub fn key(&self) -> ConfigKey {
        ConfigKey::new(self.scales, self.alpha, self.probe.clone())
    }

    pub fn is_ok(&self) -> bool {
        self.status == RecordStatus::Ok && self.accuracy.is_some()
    }

    pub fn t_train(&self) -> f64 {
        self.t_roman + self.t_fit
    }

    pub fn t_infer(&self) -> f64 {
        self.t_roman + self.t_predict
    }
}

/// Test-set predictions of one successful cell, kept for ensembling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    pub dataset: String,
    pub scales: usize,
    pub alpha: f64,
    pub probe: String,
    pub seed: u64,
    pub predictions: Vec<usize>,
    pub truth: Vec<usize>,
}

impl PredictionSet {
    pub fn key(&self) -> ConfigKey {
        ConfigKey::new(self.scales, self.alpha, self.probe.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridOptions {
    /// Run cells one at a time with every timed section on a single worker
    /// thread. Disable for faster, untimed runs.
    pub pin_single_thread: bool,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { pin_single_thread: true }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GridOutput {
    pub records: Vec<BenchmarkRecord>,
    pub predictions: Vec<PredictionSet>,
}

/// Runs every (dataset, config, seed) cell. Failures are recorded and the
/// grid continues. Output order is dataset, then config, then seed.
pub fn run_grid(datasets: &[BenchDataset], configs: &[GridConfig], seeds: &[u64], options: GridOptions) -> Result<GridOutput> {
    if !configs.iter().any(|c| c.scales == 1) {
        return Err(Error::InvalidConfig("the grid must include an S=1 baseline configuration".into()));
    }
    let cells: Vec<(&BenchDataset, &GridConfig, u64)> = datasets
        .iter()
        .flat_map(|d| configs.iter().flat_map(move |c| seeds.iter().map(move |&s| (d, c, s))))
        .collect();
    let results: Vec<(BenchmarkRecord, Option<PredictionSet>)> = if options.pin_single_thread {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot build worker pool: {e}")))?;
        cells.iter().map(|&(d, c, s)| pool.install(|| run_cell(d, c, s))).collect()
    } else {
        cells.par_iter().map(|&(d, c, s)| run_cell(d, c, s)).collect()
    };
    let mut out = GridOutput::default();
    for (record, preds) in results {
        if let Some(err) = &record.error {
            log::error!("{} {} seed {} failed: {err}", record.dataset, record.key(), record.seed);
        }
        out.records.push(record);
        out.predictions.extend(preds);
    }
    Ok(out)
}

/// Runs a single cell on the current thread pool.
pub fn run_cell(dataset: &BenchDataset, config: &GridConfig, seed: u64) -> (BenchmarkRecord, Option<PredictionSet>) {
    let mut record = BenchmarkRecord {
        dataset: dataset.id.clone(),
        scales: config.scales,
        alpha: config.alpha,
        probe: config.probe.name().to_string(),
        seed,
        status: RecordStatus::Failed,
        accuracy: None,
        t_roman: 0.0,
        t_fit: 0.0,
        t_predict: 0.0,
        error: None,
    };
    match execute_cell(dataset, config, seed, &mut record) {
        Ok(predictions) => {
            let truth = dataset.test.labels();
            let hits = predictions.iter().zip(truth).filter(|(p, t)| p == t).count();
            record.accuracy = Some(if truth.is_empty() { 0.0 } else { hits as f64 / truth.len() as f64 });
            record.status = RecordStatus::Ok;
            let set = PredictionSet {
                dataset: record.dataset.clone(),
                scales: record.scales,
                alpha: record.alpha,
                probe: record.probe.clone(),
                seed,
                predictions,
                truth: truth.to_vec(),
            };
            (record, Some(set))
        }
        Err(e) => {
            record.error = Some(e.to_string());
            (record, None)
        }
    }
}

fn execute_cell(dataset: &BenchDataset, config: &GridConfig, seed: u64, record: &mut BenchmarkRecord) -> Result<Vec<usize>> {
    let roman = RomanConfig::with_depth(config.scales, config.alpha)?;
    let probe = config.probe.with_seed(seed);

    let started = Instant::now();
    let train = preprocess(dataset.train.clone());
    let test = preprocess(dataset.test.clone());
    let (train_z, _) = route_batch(train.view(), &roman)?;
    let (test_z, _) = route_batch(test.view(), &roman)?;
    record.t_roman = started.elapsed().as_secs_f64();

    let started = Instant::now();
    let model = probe.fit(train_z.view(), train.labels())?;
    record.t_fit = started.elapsed().as_secs_f64();

    let started = Instant::now();
    let predictions = model.predict(test_z.view())?;
    record.t_predict = started.elapsed().as_secs_f64();
    Ok(predictions)
}
