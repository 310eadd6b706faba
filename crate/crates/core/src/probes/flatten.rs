//! Flatten probe: position-preserving features into a ridge head.
//!
//! A bank of fixed random convolutional filters (all input channels, ReLU,
//! "same" zero padding) is applied and the feature maps are flattened
//! without any pooling, so every feature is tied to one time step. With
//! `n_filters = 0` the ridge head sees the raw flattened values directly.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pooled::convolve;
use super::ridge::{default_lambdas, RidgeClassifier};
use super::{check_shape, check_training, predict_chunked};
use crate::batch::BatchView;
use crate::error::{Error, Result};
use crate::rng::stream;

/// Rows computed together while filling the training design.
const FIT_CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlattenProbeConfig {
    pub n_filters: usize,
    /// Odd filter length.
    pub kernel_length: usize,
    /// Each filter draws its dilation uniformly from this set.
    pub dilations: Vec<usize>,
    pub seed: u64,
}

impl Default for FlattenProbeConfig {
    fn default() -> Self {
        Self {
            n_filters: 128,
            kernel_length: 9,
            dilations: vec![1, 2, 4],
            seed: 0,
        }
    }
}

impl FlattenProbeConfig {
    /// Ridge directly on the flattened input.
    pub fn linear(seed: u64) -> Self {
        Self {
            n_filters: 0,
            seed,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_filters > 0 {
            if self.kernel_length == 0 || self.kernel_length % 2 == 0 {
                return Err(Error::InvalidConfig(format!(
                    "kernel_length must be odd, got {}",
                    self.kernel_length
                )));
            }
            if self.dilations.is_empty() || self.dilations.contains(&0) {
                return Err(Error::InvalidConfig("dilations must be a non-empty set of positive integers".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvFilter {
    /// `channels x kernel_length`, channel-major.
    pub weights: Vec<f64>,
    pub dilation: usize,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlattenProbe {
    pub config: FlattenProbeConfig,
    pub channels: usize,
    pub len: usize,
    pub filters: Vec<ConvFilter>,
    pub ridge: RidgeClassifier,
}

fn sample_filters(config: &FlattenProbeConfig, channels: usize) -> Vec<ConvFilter> {
    let k = config.kernel_length;
    let scale = ((channels * k) as f64).sqrt();
    (0..config.n_filters)
        .map(|f| {
            let mut rng = stream("probes/flatten/filters", config.seed, f as u64);
            let weights = (0..channels * k)
                .map(|_| rng.sample::<f64, _>(StandardNormal) / scale)
                .collect();
            let dilation = config.dilations[rng.random_range(0..config.dilations.len())];
            let bias = rng.random_range(-1.0..1.0);
            ConvFilter { weights, dilation, bias }
        })
        .collect()
}

/// Flattened feature row of one instance.
fn feature_row(filters: &[ConvFilter], instance: &[f64], channels: usize, len: usize) -> Vec<f64> {
    if filters.is_empty() {
        return instance.to_vec();
    }
    let k = filters[0].weights.len() / channels;
    let mut row = Vec::with_capacity(filters.len() * len);
    for f in filters {
        let mut map = vec![f.bias; len];
        for c in 0..channels {
            let x = &instance[c * len..(c + 1) * len];
            let r = convolve(x, &f.weights[c * k..(c + 1) * k], f.dilation, true);
            map.iter_mut().zip(&r).for_each(|(m, v)| *m += v);
        }
        row.extend(map.into_iter().map(|v| v.max(0.0)));
    }
    row
}

pub fn fit_flatten_probe(train: BatchView<'_>, labels: &[usize], config: &FlattenProbeConfig) -> Result<FlattenProbe> {
    config.validate()?;
    let n_classes = check_training(train, labels)?;
    let (channels, len, n) = (train.channels(), train.series_len(), train.n_instances());
    let filters = sample_filters(config, channels);
    let p = if filters.is_empty() { channels * len } else { filters.len() * len };
    let mut features = DMatrix::<f64>::zeros(n, p);
    let mut start = 0;
    while start < n {
        let end = (start + FIT_CHUNK).min(n);
        let rows: Vec<Vec<f64>> = (start..end)
            .into_par_iter()
            .map(|i| feature_row(&filters, train.instance(i), channels, len))
            .collect();
        for (r, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                features[(start + r, j)] = v;
            }
        }
        start = end;
    }
    let ridge = RidgeClassifier::fit(features, labels, n_classes, &default_lambdas())?;
    Ok(FlattenProbe {
        config: config.clone(),
        channels,
        len,
        filters,
        ridge,
    })
}

impl FlattenProbe {
    pub fn features(&self, data: BatchView<'_>, start: usize, end: usize) -> DMatrix<f64> {
        let rows: Vec<Vec<f64>> = (start..end)
            .into_par_iter()
            .map(|i| feature_row(&self.filters, data.instance(i), self.channels, self.len))
            .collect();
        let p = self.ridge.n_features();
        DMatrix::from_fn(end - start, p, |i, j| rows[i][j])
    }

    pub fn predict(&self, data: BatchView<'_>) -> Result<Vec<usize>> {
        check_shape(data, self.channels, self.len)?;
        predict_chunked(data, &self.ridge, |s, e| self.features(data, s, e))
    }
}
