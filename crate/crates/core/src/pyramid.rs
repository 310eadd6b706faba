//! Anti-aliased dyadic pyramid.
//!
//! Each level is obtained from the previous one by smoothing every channel
//! with the binomial kernel `[1, 2, 1] / 4` and keeping the samples at even
//! indices, so `L_s = ceil(L_{s-1} / 2)`. The first level is the input itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Series;

/// Binomial low-pass taps applied before decimation.
pub const TAPS: [f64; 3] = [0.25, 0.5, 0.25];

/// Edge rule used by [`smooth`] to supply the missing neighbour of the first
/// and last sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// `x[-1] = x[1]`, `x[L] = x[L-2]` (no edge repetition).
    #[default]
    Reflect,
    /// `x[-1] = x[0]`, `x[L] = x[L-1]`.
    Replicate,
    /// Out-of-range samples are zero. Does not preserve constants.
    Zero,
}

/// Boundary rule used by the routing operator.
pub const DEFAULT_BOUNDARY: Boundary = Boundary::Reflect;

impl Boundary {
    #[inline]
    fn left(self, row: &[f64]) -> f64 {
        match self {
            Boundary::Reflect if row.len() > 1 => row[1],
            Boundary::Reflect | Boundary::Replicate => row[0],
            Boundary::Zero => 0.0,
        }
    }

    #[inline]
    fn right(self, row: &[f64]) -> f64 {
        let n = row.len();
        match self {
            Boundary::Reflect if n > 1 => row[n - 2],
            Boundary::Reflect | Boundary::Replicate => row[n - 1],
            Boundary::Zero => 0.0,
        }
    }
}

fn smooth_row_into(row: &[f64], boundary: Boundary, out: &mut Vec<f64>) {
    let n = row.len();
    let [a, b, c] = TAPS;
    if n == 1 {
        out.push(a * boundary.left(row) + b * row[0] + c * boundary.right(row));
        return;
    }
    out.push(a * boundary.left(row) + b * row[0] + c * row[1]);
    out.extend(row.windows(3).map(|w| a * w[0] + b * w[1] + c * w[2]));
    out.push(a * row[n - 2] + b * row[n - 1] + c * boundary.right(row));
}

/// Channelwise 3-tap binomial smoothing with the default boundary rule.
pub fn smooth(x: &Series) -> Series {
    smooth_with(x, DEFAULT_BOUNDARY)
}

pub fn smooth_with(x: &Series, boundary: Boundary) -> Series {
    let mut values = Vec::with_capacity(x.element_count());
    for row in x.rows() {
        smooth_row_into(row, boundary, &mut values);
    }
    Series::from_parts_unchecked(x.channels(), x.len(), values)
}

/// Keeps samples at even indices; output length is `ceil(L / 2)`.
pub fn decimate(x: &Series) -> Series {
    let len = decimated_len(x.len());
    let mut values = Vec::with_capacity(x.channels() * len);
    for row in x.rows() {
        values.extend(row.iter().step_by(2));
    }
    Series::from_parts_unchecked(x.channels(), len, values)
}

#[inline]
pub fn decimated_len(len: usize) -> usize {
    len.div_ceil(2)
}

/// Lengths `L_1..L_depth` produced by the smooth-then-decimate recursion.
pub fn level_lengths(len: usize, depth: usize) -> Vec<usize> {
    let mut lengths = Vec::with_capacity(depth);
    let mut current = len;
    for _ in 0..depth {
        lengths.push(current);
        current = decimated_len(current);
    }
    lengths
}

/// The levels `X^(1..S)` of one series, finest first.
#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid {
    levels: Vec<Series>,
}

impl Pyramid {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Level `scale`, 1-based (`level(1)` is the input).
    pub fn level(&self, scale: usize) -> &Series {
        &self.levels[scale - 1]
    }

    pub fn levels(&self) -> &[Series] {
        &self.levels
    }

    pub fn realized_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(Series::len).collect()
    }

    pub fn base_length(&self) -> usize {
        self.levels.last().map_or(0, Series::len)
    }
}

pub fn build_pyramid(x: &Series, depth: usize) -> Result<Pyramid> {
    build_pyramid_with(x, depth, DEFAULT_BOUNDARY)
}

pub fn build_pyramid_with(x: &Series, depth: usize, boundary: Boundary) -> Result<Pyramid> {
    if depth == 0 {
        return Err(Error::InvalidConfig("pyramid depth must be at least 1".into()));
    }
    if level_lengths(x.len(), depth).last() == Some(&0) {
        return Err(Error::DepthTooLarge {
            depth,
            len: x.len(),
        });
    }
    let mut levels = Vec::with_capacity(depth);
    levels.push(x.clone());
    for _ in 1..depth {
        let prev = levels.last().expect("at least one level");
        levels.push(decimate(&smooth_with(prev, boundary)));
    }
    Ok(Pyramid { levels })
}
