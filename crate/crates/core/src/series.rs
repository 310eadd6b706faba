use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite multivariate series stored channel-major (`C` rows of length `L`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    channels: usize,
    len: usize,
    values: Vec<f64>,
}

impl Series {
    pub fn new(channels: usize, len: usize, values: Vec<f64>) -> Result<Self> {
        if channels == 0 || len == 0 {
            return Err(Error::EmptySeries { channels, len });
        }
        if values.len() != channels * len {
            return Err(Error::BufferSize {
                expected: channels * len,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                channel: i / len,
                t: i % len,
            });
        }
        Ok(Self {
            channels,
            len,
            values,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let len = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * len);
        for row in rows {
            let row = row.as_ref();
            if row.len() != len {
                return Err(Error::BufferSize {
                    expected: len,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), len, values)
    }

    /// Builds a series from rows already known to be finite and equal length.
    pub(crate) fn from_parts_unchecked(channels: usize, len: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), channels * len);
        Self {
            channels,
            len,
            values,
        }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; a series has at least one sample.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn row(&self, channel: usize) -> &[f64] {
        &self.values[channel * self.len..(channel + 1) * self.len]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.values.chunks_exact(self.len)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn element_count(&self) -> usize {
        self.values.len()
    }
}
