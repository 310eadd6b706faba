use serde::{Deserialize, Serialize};

use crate::batch::BatchView;
use crate::error::{Error, Result};
use crate::series::Series;

/// What has been done to the values since ingestion.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: Option<String>,
    /// Missing values seen at load time.
    pub nan_count: usize,
    /// Imputation rule applied to missing values, if any.
    pub nan_policy: Option<String>,
    pub z_normalized: bool,
    pub notes: Vec<String>,
}

/// `N` equal-length multivariate series with class labels.
///
/// Values are stored instance-major, then channel, then time. Unlike
/// [`Series`], a dataset may hold NaNs until it has been preprocessed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesDataset {
    pub id: String,
    n: usize,
    channels: usize,
    len: usize,
    values: Vec<f64>,
    labels: Vec<usize>,
    class_names: Vec<String>,
    pub provenance: Provenance,
}

impl TimeSeriesDataset {
    pub fn new(
        id: impl Into<String>,
        channels: usize,
        len: usize,
        values: Vec<f64>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let n = labels.len();
        if channels == 0 || len == 0 {
            return Err(Error::EmptySeries { channels, len });
        }
        if values.len() != n * channels * len {
            return Err(Error::BufferSize {
                expected: n * channels * len,
                got: values.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::InvalidConfig(format!(
                "label {bad} outside {} declared classes",
                class_names.len()
            )));
        }
        let nan_count = values.iter().filter(|v| v.is_nan()).count();
        Ok(Self {
            id: id.into(),
            n,
            channels,
            len,
            values,
            labels,
            class_names,
            provenance: Provenance {
                nan_count,
                ..Provenance::default()
            },
        })
    }

    /// Builds a dataset from finite series that all share one shape.
    pub fn from_series(
        id: impl Into<String>,
        series: &[Series],
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let first = series
            .first()
            .ok_or_else(|| Error::InvalidConfig("dataset needs at least one series".into()))?;
        if series.len() != labels.len() {
            return Err(Error::shape(format!("{} labels", series.len()), labels.len()));
        }
        let (channels, len) = (first.channels(), first.len());
        let mut values = Vec::with_capacity(series.len() * channels * len);
        for (i, s) in series.iter().enumerate() {
            if s.channels() != channels || s.len() != len {
                return Err(Error::UnequalLength {
                    index: i,
                    expected: len,
                    got: s.len(),
                });
            }
            values.extend_from_slice(s.values());
        }
        Self::new(id, channels, len, values, labels, class_names)
    }

    pub fn n_instances(&self) -> usize {
        self.n
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn series_len(&self) -> usize {
        self.len
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The values as a batch. Probes reject batches that still hold NaNs.
    pub fn view(&self) -> BatchView<'_> {
        BatchView::new(self.n, self.channels, self.len, &self.values).expect("shape checked at construction")
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Raw values of instance `i`, channel-major.
    pub fn instance(&self, i: usize) -> &[f64] {
        let stride = self.channels * self.len;
        &self.values[i * stride..(i + 1) * stride]
    }

    /// Instance `i` as a [`Series`]; fails if it still contains NaNs.
    pub fn series(&self, i: usize) -> Result<Series> {
        Series::new(self.channels, self.len, self.instance(i).to_vec())
    }

    pub fn to_series(&self) -> Result<Vec<Series>> {
        (0..self.n).map(|i| self.series(i)).collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_names.len()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}
