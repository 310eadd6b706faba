//! Pooled random-kernel probe.
//!
//! Each kernel mixes a random subset of channels with random weights,
//! convolves the mix with a dilated zero-mean filter and reports the
//! proportion of outputs above a bias (PPV). PPV is a global average, so the
//! features ignore where in the series a response occurs.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ridge::{default_lambdas, RidgeClassifier};
use super::{check_shape, check_training, predict_chunked};
use crate::batch::BatchView;
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::stats::quantile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PooledConvProbeConfig {
    pub n_kernels: usize,
    /// Odd filter length.
    pub kernel_length: usize,
    pub seed: u64,
}

impl Default for PooledConvProbeConfig {
    fn default() -> Self {
        Self {
            n_kernels: 2000,
            kernel_length: 9,
            seed: 0,
        }
    }
}

impl PooledConvProbeConfig {
    fn validate(&self) -> Result<()> {
        if self.n_kernels == 0 {
            return Err(Error::InvalidConfig("n_kernels must be at least 1".into()));
        }
        if self.kernel_length == 0 || self.kernel_length % 2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "kernel_length must be odd, got {}",
                self.kernel_length
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledKernel {
    /// Zero-mean filter taps.
    pub weights: Vec<f64>,
    pub dilation: usize,
    /// Zero padding to the input length, or a valid-only convolution.
    pub padded: bool,
    /// Zero-based input channels mixed by this kernel.
    pub channels: Vec<usize>,
    pub channel_weights: Vec<f64>,
    pub bias: f64,
}

impl PooledKernel {
    /// Convolution response of one instance (channel-major values of
    /// `len` samples per channel).
    fn response(&self, instance: &[f64], len: usize) -> Vec<f64> {
        let mut mixed = vec![0.0; len];
        for (&c, &w) in self.channels.iter().zip(&self.channel_weights) {
            let row = &instance[c * len..(c + 1) * len];
            mixed.iter_mut().zip(row).for_each(|(m, x)| *m += w * x);
        }
        convolve(&mixed, &self.weights, self.dilation, self.padded)
    }

    fn ppv(&self, instance: &[f64], len: usize) -> f64 {
        let r = self.response(instance, len);
        r.iter().filter(|&&v| v > self.bias).count() as f64 / r.len() as f64
    }
}

/// Dilated correlation of `x` with `w`. Padded output has the input length
/// (zeros outside); valid output has `len - (k - 1) d` samples.
pub(crate) fn convolve(x: &[f64], w: &[f64], dilation: usize, padded: bool) -> Vec<f64> {
    let len = x.len() as isize;
    let d = dilation as isize;
    let half = (w.len() / 2) as isize;
    let span = (w.len() as isize - 1) * d;
    let (out_len, shift) = if padded { (len, -half * d) } else { ((len - span).max(0), 0) };
    let mut out = vec![0.0; out_len as usize];
    for (j, &wj) in w.iter().enumerate() {
        let offset = shift + j as isize * d;
        // out[t] += wj * x[t + offset] for every t with the source in range
        let lo = (-offset).clamp(0, out_len);
        let hi = (len - offset).clamp(0, out_len);
        if lo >= hi {
            continue;
        }
        let src = &x[(lo + offset) as usize..(hi + offset) as usize];
        out[lo as usize..hi as usize]
            .iter_mut()
            .zip(src)
            .for_each(|(o, v)| *o += wj * v);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledProbe {
    pub config: PooledConvProbeConfig,
    pub channels: usize,
    pub len: usize,
    pub kernels: Vec<PooledKernel>,
    pub ridge: RidgeClassifier,
}

pub fn fit_pooled_probe(
    train: BatchView<'_>,
    labels: &[usize],
    config: &PooledConvProbeConfig,
) -> Result<PooledProbe> {
    config.validate()?;
    let n_classes = check_training(train, labels)?;
    let (channels, len, n) = (train.channels(), train.series_len(), train.n_instances());
    let k = config.kernel_length;
    let max_exponent = ((len.saturating_sub(1)) as f64 / (k - 1).max(1) as f64).max(1.0).log2();

    let fitted: Vec<(PooledKernel, Vec<f64>)> = (0..config.n_kernels)
        .into_par_iter()
        .map(|idx| {
            let mut rng = stream("probes/pooled/kernels", config.seed, idx as u64);
            let mut weights: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
            let centre = weights.iter().sum::<f64>() / k as f64;
            weights.iter_mut().for_each(|w| *w -= centre);
            let dilation = (2f64.powf(rng.random_range(0.0..=max_exponent)).floor() as usize).max(1);
            let n_mix = rng.random_range(1..=channels.min(9));
            let mut mixed: Vec<usize> = sample(&mut rng, channels, n_mix).into_vec();
            mixed.sort_unstable();
            let channel_weights: Vec<f64> = (0..n_mix).map(|_| rng.sample(StandardNormal)).collect();
            let padded = idx % 2 == 0 || (k - 1) * dilation >= len;
            let example = rng.random_range(0..n);
            let q: f64 = rng.random();
            let mut kernel = PooledKernel {
                weights,
                dilation,
                padded,
                channels: mixed,
                channel_weights,
                bias: 0.0,
            };
            kernel.bias = quantile(&kernel.response(train.instance(example), len), q);
            let column: Vec<f64> = (0..n).map(|i| kernel.ppv(train.instance(i), len)).collect();
            (kernel, column)
        })
        .collect();

    let mut values = Vec::with_capacity(n * config.n_kernels);
    let mut kernels = Vec::with_capacity(config.n_kernels);
    for (kernel, column) in fitted {
        values.extend(column);
        kernels.push(kernel);
    }
    let features = DMatrix::from_vec(n, config.n_kernels, values);
    let ridge = RidgeClassifier::fit(features, labels, n_classes, &default_lambdas())?;
    Ok(PooledProbe {
        config: config.clone(),
        channels,
        len,
        kernels,
        ridge,
    })
}

impl PooledProbe {
    /// PPV features, one row per instance in `start..end`.
    pub fn features(&self, data: BatchView<'_>, start: usize, end: usize) -> DMatrix<f64> {
        let rows: Vec<Vec<f64>> = (start..end)
            .into_par_iter()
            .map(|i| self.kernels.iter().map(|k| k.ppv(data.instance(i), self.len)).collect())
            .collect();
        DMatrix::from_fn(end - start, self.kernels.len(), |i, j| rows[i][j])
    }

    pub fn predict(&self, data: BatchView<'_>) -> Result<Vec<usize>> {
        check_shape(data, self.channels, self.len)?;
        predict_chunked(data, &self.ridge, |s, e| self.features(data, s, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padded_convolution_keeps_length() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let out = convolve(&x, &[1.0, 0.0, -1.0], 1, true);
        // out[t] = x[t-1] - x[t+1]
        assert_eq!(out, vec![-2.0, -2.0, -2.0, -2.0, 4.0]);
        let out = convolve(&x, &[1.0, 0.0, -1.0], 2, true);
        assert_eq!(out, vec![-3.0, -4.0, -4.0, 2.0, 3.0]);
    }

    #[test]
    fn valid_convolution_drops_edges() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(convolve(&x, &[1.0, 0.0, -1.0], 1, false), vec![-2.0, -2.0, -2.0]);
        assert_eq!(convolve(&x, &[1.0, 0.0, -1.0], 2, false), vec![-4.0]);
        assert!(convolve(&x, &[1.0, 0.0, -1.0], 3, false).is_empty());
    }

    #[test]
    fn kernels_respect_sampling_contract() {
        let mut values = Vec::new();
        for i in 0..6 {
            values.extend((0..3 * 40).map(|t| ((t * (i + 1)) as f64 * 0.37).sin()));
        }
        let train = BatchView::new(6, 3, 40, &values).unwrap();
        let cfg = PooledConvProbeConfig { n_kernels: 50, ..Default::default() };
        let m = fit_pooled_probe(train, &[0, 1, 0, 1, 0, 1], &cfg).unwrap();
        for (i, k) in m.kernels.iter().enumerate() {
            assert!(k.weights.iter().sum::<f64>().abs() < 1e-12);
            assert!(8 * k.dilation < 40);
            assert!((1..=3).contains(&k.channels.len()));
            assert_eq!(k.channels.len(), k.channel_weights.len());
            if i % 2 == 0 {
                assert!(k.padded);
            }
        }
    }
}
