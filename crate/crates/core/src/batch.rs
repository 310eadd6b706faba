//! Contiguous batches of equal-shape series.

use crate::error::{Error, Result};
use crate::series::Series;

/// Borrowed `N x C x L` block, instance-major then channel then time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchView<'a> {
    n: usize,
    channels: usize,
    len: usize,
    values: &'a [f64],
}

impl<'a> BatchView<'a> {
    pub fn new(n: usize, channels: usize, len: usize, values: &'a [f64]) -> Result<Self> {
        if n * channels * len != values.len() {
            return Err(Error::BufferSize {
                expected: n * channels * len,
                got: values.len(),
            });
        }
        Ok(Self { n, channels, len, values })
    }

    pub fn n_instances(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn series_len(&self) -> usize {
        self.len
    }

    pub fn values(&self) -> &'a [f64] {
        self.values
    }

    /// Values of instance `i`, channel-major.
    pub fn instance(&self, i: usize) -> &'a [f64] {
        let stride = self.channels * self.len;
        &self.values[i * stride..(i + 1) * stride]
    }

    pub fn row(&self, i: usize, channel: usize) -> &'a [f64] {
        let start = (i * self.channels + channel) * self.len;
        &self.values[start..start + self.len]
    }

    pub fn to_owned(&self) -> Batch {
        Batch {
            n: self.n,
            channels: self.channels,
            len: self.len,
            values: self.values.to_vec(),
        }
    }
}

/// Owned counterpart of [`BatchView`].
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    n: usize,
    channels: usize,
    len: usize,
    values: Vec<f64>,
}

impl Batch {
    pub fn new(n: usize, channels: usize, len: usize, values: Vec<f64>) -> Result<Self> {
        BatchView::new(n, channels, len, &values)?;
        Ok(Self { n, channels, len, values })
    }

    /// Stacks series of one shape. An empty slice gives an empty batch of
    /// shape `0 x channels x len`.
    pub fn from_series(xs: &[Series], channels: usize, len: usize) -> Result<Self> {
        let mut values = Vec::with_capacity(xs.len() * channels * len);
        for (i, x) in xs.iter().enumerate() {
            if x.channels() != channels || x.len() != len {
                return Err(Error::shape(
                    format!("{channels}x{len}"),
                    format!("{}x{} (instance {i})", x.channels(), x.len()),
                ));
            }
            values.extend_from_slice(x.values());
        }
        Ok(Self {
            n: xs.len(),
            channels,
            len,
            values,
        })
    }

    pub fn view(&self) -> BatchView<'_> {
        BatchView {
            n: self.n,
            channels: self.channels,
            len: self.len,
            values: &self.values,
        }
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

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Instances at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Batch {
        let v = self.view();
        let mut values = Vec::with_capacity(indices.len() * self.channels * self.len);
        for &i in indices {
            values.extend_from_slice(v.instance(i));
        }
        Batch {
            n: indices.len(),
            channels: self.channels,
            len: self.len,
            values,
        }
    }
}
