//! Downstream probe classifiers.
//!
//! Two stand-ins for the backbones a routed representation is fed to: a
//! pooled random-kernel probe, whose features are global pooling statistics
//! and therefore blind to where a pattern occurs, and a flatten probe, which
//! keeps every time step as its own feature. Both end in the same ridge head.

mod flatten;
mod pooled;
pub mod ridge;

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::batch::BatchView;
use crate::error::{Error, Result};

pub use flatten::{fit_flatten_probe, ConvFilter, FlattenProbe, FlattenProbeConfig};
pub use pooled::{fit_pooled_probe, PooledConvProbeConfig, PooledKernel, PooledProbe};
pub use ridge::{default_lambdas, RidgeClassifier, Standardizer};

/// Instances whose features are materialised at once during prediction.
const PREDICT_CHUNK: usize = 256;

/// Which probe to fit, with its settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProbeConfig {
    Pooled(PooledConvProbeConfig),
    Flatten(FlattenProbeConfig),
}

impl ProbeConfig {
    pub fn pooled(seed: u64) -> Self {
        Self::Pooled(PooledConvProbeConfig { seed, ..Default::default() })
    }

    pub fn flatten(seed: u64) -> Self {
        Self::Flatten(FlattenProbeConfig { seed, ..Default::default() })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Pooled(_) => "pooled",
            Self::Flatten(_) => "flatten",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Self::Pooled(c) => c.seed,
            Self::Flatten(c) => c.seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut out = self.clone();
        match &mut out {
            Self::Pooled(c) => c.seed = seed,
            Self::Flatten(c) => c.seed = seed,
        }
        out
    }

    pub fn fit(&self, train: BatchView<'_>, labels: &[usize]) -> Result<ProbeModel> {
        Ok(match self {
            Self::Pooled(c) => ProbeModel::Pooled(fit_pooled_probe(train, labels, c)?),
            Self::Flatten(c) => ProbeModel::Flatten(fit_flatten_probe(train, labels, c)?),
        })
    }
}

/// A fitted probe of either kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProbeModel {
    Pooled(PooledProbe),
    Flatten(FlattenProbe),
}

impl ProbeModel {
    pub fn predict(&self, data: BatchView<'_>) -> Result<Vec<usize>> {
        match self {
            Self::Pooled(m) => m.predict(data),
            Self::Flatten(m) => m.predict(data),
        }
    }

    pub fn config(&self) -> ProbeConfig {
        match self {
            Self::Pooled(m) => ProbeConfig::Pooled(m.config.clone()),
            Self::Flatten(m) => ProbeConfig::Flatten(m.config.clone()),
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut body = Vec::new();
        ciborium::into_writer(self, &mut body).map_err(|e| Error::InvalidBlob(e.to_string()))?;
        let mut out = Vec::with_capacity(body.len() + 44);
        out.extend_from_slice(MODEL_MAGIC);
        out.extend_from_slice(&MODEL_FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&Sha256::digest(&body));
        out.extend_from_slice(&body);
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = MODEL_MAGIC.len() + 4 + 32;
        if bytes.len() < header || &bytes[..MODEL_MAGIC.len()] != MODEL_MAGIC {
            return Err(Error::InvalidBlob("missing probe model header".into()));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
        if version != MODEL_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                expected: MODEL_FORMAT_VERSION,
                found: version,
            });
        }
        let body = &bytes[header..];
        if Sha256::digest(body).as_slice() != &bytes[12..44] {
            return Err(Error::ChecksumMismatch("probe model body does not match its digest".into()));
        }
        ciborium::from_reader(body).map_err(|e| Error::InvalidBlob(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

pub const MODEL_MAGIC: &[u8; 8] = b"ROMANPRB";
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Checks a training batch and returns the number of classes
/// (`max label + 1`).
fn check_training(train: BatchView<'_>, labels: &[usize]) -> Result<usize> {
    if labels.len() != train.n_instances() {
        return Err(Error::shape(
            format!("{} labels", train.n_instances()),
            labels.len(),
        ));
    }
    check_finite(train)?;
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut seen = vec![false; n_classes];
    labels.iter().for_each(|&l| seen[l] = true);
    if seen.iter().filter(|&&s| s).count() < 2 {
        return Err(Error::InvalidConfig("training data must contain at least two classes".into()));
    }
    Ok(n_classes)
}

fn check_shape(data: BatchView<'_>, channels: usize, len: usize) -> Result<()> {
    if data.channels() != channels || data.series_len() != len {
        return Err(Error::shape(
            format!("{channels}x{len} per instance"),
            format!("{}x{}", data.channels(), data.series_len()),
        ));
    }
    check_finite(data)
}

fn check_finite(data: BatchView<'_>) -> Result<()> {
    match data.values().iter().position(|v| !v.is_finite()) {
        None => Ok(()),
        Some(pos) => {
            let per = data.series_len();
            Err(Error::NonFinite {
                channel: (pos / per) % data.channels(),
                t: pos % per,
            })
        }
    }
}

/// Features of `data` in chunks of rows, fed to the ridge head.
fn predict_chunked(
    data: BatchView<'_>,
    ridge: &RidgeClassifier,
    features: impl Fn(usize, usize) -> nalgebra::DMatrix<f64>,
) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(data.n_instances());
    let mut start = 0;
    while start < data.n_instances() {
        let end = (start + PREDICT_CHUNK).min(data.n_instances());
        out.extend(ridge.predict(features(start, end))?);
        start = end;
    }
    Ok(out)
}
