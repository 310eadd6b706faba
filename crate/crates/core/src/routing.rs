//! Window routing: turns a pyramid into a pseudochannel tensor.
//!
//! At scale `s` the operator extracts `W_s` windows of the common length
//! `L_base = L_S`, spread uniformly over the admissible start range, and
//! stacks them along the channel axis scale-major, then window, then
//! original channel. All window arithmetic is exact integer arithmetic; the
//! overlap is converted to an exact binary fraction first.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::batch::{Batch, BatchView};
use crate::error::{Error, Result};
use crate::pyramid::{build_pyramid, level_lengths};
use crate::series::Series;

/// Target fractional overlap between consecutive windows, in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Overlap(f64);

impl Overlap {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && (0.0..1.0).contains(&alpha) {
            // -0.0 would survive the range check; normalise it
            Ok(Self(alpha + 0.0))
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `alpha` as `num / den` with `den` a power of two. Every finite f64 is
    /// such a fraction, so this is exact.
    fn as_fraction(self) -> (BigUint, BigUint) {
        if self.0 == 0.0 {
            return (BigUint::zero(), BigUint::one());
        }
        let bits = self.0.to_bits();
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mantissa, exp) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        // alpha < 1 so exp is always negative here
        debug_assert!(exp < 0);
        (BigUint::from(mantissa), BigUint::one() << (-exp) as usize)
    }
}

impl TryFrom<f64> for Overlap {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<Overlap> for f64 {
    fn from(o: Overlap) -> f64 {
        o.0
    }
}

impl Default for Overlap {
    fn default() -> Self {
        Self(0.5)
    }
}

/// How the pyramid depth is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthMode {
    /// Fixed number of scales `S`.
    Scales(usize),
    /// Deepest pyramid whose coarsest level still has at least this length.
    MinBaseLength(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RomanConfig {
    pub depth: DepthMode,
    pub alpha: Overlap,
}

impl RomanConfig {
    pub fn new(depth: DepthMode, alpha: f64) -> Result<Self> {
        match depth {
            DepthMode::Scales(0) => {
                return Err(Error::InvalidConfig("number of scales must be at least 1".into()))
            }
            DepthMode::MinBaseLength(0) => {
                return Err(Error::InvalidConfig("minimum base length must be at least 1".into()))
            }
            _ => {}
        }
        Ok(Self {
            depth,
            alpha: Overlap::new(alpha)?,
        })
    }

    pub fn with_depth(scales: usize, alpha: f64) -> Result<Self> {
        Self::new(DepthMode::Scales(scales), alpha)
    }

    pub fn with_min_base(min_base: usize, alpha: f64) -> Result<Self> {
        Self::new(DepthMode::MinBaseLength(min_base), alpha)
    }

    /// The identity configuration `S = 1`.
    pub fn identity() -> Self {
        Self {
            depth: DepthMode::Scales(1),
            alpha: Overlap::default(),
        }
    }
}

/// Resolves the number of scales for a series of length `len`.
///
/// In min-base mode this walks the exact length recursion. Once a level has
/// length 1 every deeper level has length 1 too; the walk stops there rather
/// than returning an unbounded depth.
pub fn resolve_depth(len: usize, config: &RomanConfig) -> Result<usize> {
    match config.depth {
        DepthMode::Scales(0) => Err(Error::InvalidConfig("number of scales must be at least 1".into())),
        DepthMode::Scales(s) => {
            if len == 0 {
                return Err(Error::DepthTooLarge { depth: s, len });
            }
            Ok(s)
        }
        DepthMode::MinBaseLength(min_base) => {
            if min_base == 0 {
                return Err(Error::InvalidConfig("minimum base length must be at least 1".into()));
            }
            if len < min_base {
                return Err(Error::BaseLengthUnreachable { len, min_base });
            }
            let mut depth = 1;
            let mut current = len;
            loop {
                let next = current.div_ceil(2);
                if next < min_base || next == current {
                    return Ok(depth);
                }
                depth += 1;
                current = next;
            }
        }
    }
}

/// Provenance of one row of the routed tensor. All indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pseudochannel {
    pub scale: usize,
    pub window: usize,
    pub channel: usize,
}

/// Pure window bookkeeping for one input shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingPlan {
    alpha: f64,
    input_channels: usize,
    scale_lengths: Vec<usize>,
    base_length: usize,
    window_counts: Vec<usize>,
    /// 1-based window starts per scale.
    starts: Vec<Vec<usize>>,
    pseudochannels: Vec<Pseudochannel>,
}

impl RoutingPlan {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn depth(&self) -> usize {
        self.scale_lengths.len()
    }

    pub fn input_channels(&self) -> usize {
        self.input_channels
    }

    pub fn input_length(&self) -> usize {
        self.scale_lengths[0]
    }

    pub fn scale_lengths(&self) -> &[usize] {
        &self.scale_lengths
    }

    pub fn base_length(&self) -> usize {
        self.base_length
    }

    pub fn window_counts(&self) -> &[usize] {
        &self.window_counts
    }

    /// 1-based start indices `a_{s,1..W_s}` for `scale` (1-based).
    pub fn starts(&self, scale: usize) -> &[usize] {
        &self.starts[scale - 1]
    }

    pub fn all_starts(&self) -> &[Vec<usize>] {
        &self.starts
    }

    /// Distances between consecutive starts at `scale`; empty when `W_s = 1`.
    pub fn spacings(&self, scale: usize) -> Vec<usize> {
        self.starts(scale).windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn pseudochannels(&self) -> &[Pseudochannel] {
        &self.pseudochannels
    }

    /// `C' = C * sum_s W_s`.
    pub fn total_pseudochannels(&self) -> usize {
        self.pseudochannels.len()
    }

    /// 0-based sample range of a pseudochannel inside its pyramid level.
    pub fn source_range(&self, pc: &Pseudochannel) -> std::ops::Range<usize> {
        let offset = zero_based(self.starts[pc.scale - 1][pc.window - 1]);
        offset..offset + self.base_length
    }
}

/// The only place 1-based starts turn into buffer offsets.
#[inline]
fn zero_based(start: usize) -> usize {
    start - 1
}

fn window_count(scale_len: usize, base_len: usize, alpha: Overlap) -> usize {
    if scale_len == base_len {
        return 1;
    }
    // W = 1 + ceil((L_s - L_base) / ((1 - num/den) * L_base))
    //   = 1 + ceil((L_s - L_base) * den / ((den - num) * L_base))
    let (num, den) = alpha.as_fraction();
    let numer = BigUint::from(scale_len - base_len) * &den;
    let denom = (den - num) * BigUint::from(base_len);
    let extra = numer.div_ceil(&denom);
    1 + extra.to_usize().expect("window count fits in usize")
}

fn window_starts(scale_len: usize, base_len: usize, count: usize) -> Vec<usize> {
    if count == 1 {
        return vec![1];
    }
    let range = (scale_len - base_len) as u128;
    let gaps = (count - 1) as u128;
    (0..count as u128)
        .map(|w| 1 + (w * range / gaps) as usize)
        .collect()
}

/// Computes window counts, starts and pseudochannel order for the given
/// realized level lengths.
pub fn plan_routing(realized_lengths: &[usize], channels: usize, alpha: f64) -> Result<RoutingPlan> {
    let alpha = Overlap::new(alpha)?;
    if channels == 0 {
        return Err(Error::InvalidConfig("channel count must be at least 1".into()));
    }
    let Some(&base_length) = realized_lengths.last() else {
        return Err(Error::InvalidConfig("at least one level length is required".into()));
    };
    if base_length == 0 {
        return Err(Error::DepthTooLarge {
            depth: realized_lengths.len(),
            len: realized_lengths[0],
        });
    }
    if realized_lengths.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidConfig(format!(
            "level lengths must be non-increasing, got {realized_lengths:?}"
        )));
    }
    let window_counts: Vec<usize> = realized_lengths
        .iter()
        .map(|&len| window_count(len, base_length, alpha))
        .collect();
    let starts: Vec<Vec<usize>> = realized_lengths
        .iter()
        .zip(&window_counts)
        .map(|(&len, &count)| window_starts(len, base_length, count))
        .collect();
    let mut pseudochannels = Vec::with_capacity(channels * window_counts.iter().sum::<usize>());
    for (s, &count) in window_counts.iter().enumerate() {
        for w in 0..count {
            for c in 0..channels {
                pseudochannels.push(Pseudochannel {
                    scale: s + 1,
                    window: w + 1,
                    channel: c + 1,
                });
            }
        }
    }
    Ok(RoutingPlan {
        alpha: alpha.get(),
        input_channels: channels,
        scale_lengths: realized_lengths.to_vec(),
        base_length,
        window_counts,
        starts,
        pseudochannels,
    })
}

/// Plan for an input shape without touching any data.
pub fn plan_for_shape(channels: usize, len: usize, config: &RomanConfig) -> Result<RoutingPlan> {
    let depth = resolve_depth(len, config)?;
    plan_routing(&level_lengths(len, depth), channels, config.alpha.get())
}

/// `|Z| = C' * L_base`.
pub fn representation_size(plan: &RoutingPlan) -> usize {
    plan.total_pseudochannels() * plan.base_length()
}

/// Routed tensor `Z` (`C'` rows of length `L_base`) with its plan.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutedRepresentation {
    tensor: Series,
    plan: RoutingPlan,
}

impl RoutedRepresentation {
    pub fn tensor(&self) -> &Series {
        &self.tensor
    }

    pub fn plan(&self) -> &RoutingPlan {
        &self.plan
    }

    pub fn into_parts(self) -> (Series, RoutingPlan) {
        (self.tensor, self.plan)
    }
}

pub fn apply_roman(x: &Series, config: &RomanConfig) -> Result<RoutedRepresentation> {
    let depth = resolve_depth(x.len(), config)?;
    let pyramid = build_pyramid(x, depth)?;
    let plan = plan_routing(&pyramid.realized_lengths(), x.channels(), config.alpha.get())?;
    let mut values = Vec::with_capacity(representation_size(&plan));
    for pc in plan.pseudochannels() {
        let row = pyramid.level(pc.scale).row(pc.channel - 1);
        values.extend_from_slice(&row[plan.source_range(pc)]);
    }
    let tensor = Series::from_parts_unchecked(plan.total_pseudochannels(), plan.base_length(), values);
    Ok(RoutedRepresentation { tensor, plan })
}

/// Applies the operator to every series. All inputs must share one shape, so
/// a single plan describes the whole batch.
pub fn apply_roman_batch(xs: &[Series], config: &RomanConfig) -> Result<(Vec<Series>, Option<RoutingPlan>)> {
    if let Some(first) = xs.first() {
        if let Some((i, x)) = xs
            .iter()
            .enumerate()
            .find(|(_, x)| x.len() != first.len() || x.channels() != first.channels())
        {
            return Err(Error::shape(
                format!("{}x{} (instance 0)", first.channels(), first.len()),
                format!("{}x{} (instance {i})", x.channels(), x.len()),
            ));
        }
    }
    let routed: Vec<RoutedRepresentation> = xs
        .par_iter()
        .map(|x| apply_roman(x, config))
        .collect::<Result<_>>()?;
    let plan = routed.first().map(|r| r.plan.clone());
    Ok((routed.into_iter().map(|r| r.tensor).collect(), plan))
}

/// Routes every instance of a batch into one contiguous `N x C' x L_base`
/// block. The plan depends only on the input shape, so it is shared.
pub fn route_batch(x: BatchView<'_>, config: &RomanConfig) -> Result<(Batch, RoutingPlan)> {
    let plan = plan_for_shape(x.channels(), x.series_len(), config)?;
    let stride = representation_size(&plan);
    let mut out = vec![0.0; x.n_instances() * stride];
    out.par_chunks_mut(stride.max(1))
        .enumerate()
        .try_for_each(|(i, dst)| -> Result<()> {
            let series = Series::new(x.channels(), x.series_len(), x.instance(i).to_vec())?;
            let pyramid = build_pyramid(&series, plan.depth())?;
            for (pc, chunk) in plan.pseudochannels().iter().zip(dst.chunks_mut(plan.base_length())) {
                let row = pyramid.level(pc.scale).row(pc.channel - 1);
                chunk.copy_from_slice(&row[plan.source_range(pc)]);
            }
            Ok(())
        })?;
    let batch = Batch::new(x.n_instances(), plan.total_pseudochannels(), plan.base_length(), out)?;
    Ok((batch, plan))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_depth_examples() {
        let cfg = |m| RomanConfig::with_min_base(m, 0.5).unwrap();
        assert_eq!(resolve_depth(512, &cfg(64)).unwrap(), 4);
        assert_eq!(resolve_depth(100, &cfg(100)).unwrap(), 1);
        assert_eq!(resolve_depth(512, &cfg(60)).unwrap(), 4);
        assert_eq!(resolve_depth(7, &RomanConfig::with_depth(3, 0.0).unwrap()).unwrap(), 3);
    }

    #[test]
    fn resolve_depth_unreachable() {
        let cfg = RomanConfig::with_min_base(65, 0.5).unwrap();
        assert!(matches!(
            resolve_depth(64, &cfg),
            Err(Error::BaseLengthUnreachable { len: 64, min_base: 65 })
        ));
    }

    #[test]
    fn resolve_depth_min_base_one_stops_at_unit_length() {
        let cfg = RomanConfig::with_min_base(1, 0.5).unwrap();
        // 8 -> 4 -> 2 -> 1
        assert_eq!(resolve_depth(8, &cfg).unwrap(), 4);
        assert_eq!(resolve_depth(1, &cfg).unwrap(), 1);
    }

    #[test]
    fn resolve_depth_exact_recursion_beats_log_approximation() {
        // L=100: 100, 50, 25, 13, 7. With L_min=13 the recursion gives S=4,
        // while 1 + floor(log2(100/13)) = 3.
        let cfg = RomanConfig::with_min_base(13, 0.5).unwrap();
        assert_eq!(resolve_depth(100, &cfg).unwrap(), 4);
    }

    #[test]
    fn plan_512_depth4() {
        let plan = plan_routing(&[512, 256, 128, 64], 1, 0.5).unwrap();
        assert_eq!(plan.window_counts(), &[15, 7, 3, 1]);
        assert_eq!(plan.total_pseudochannels(), 26);
        assert_eq!(plan.base_length(), 64);
        assert_eq!(plan.starts(3), &[1, 33, 65]);
        assert_eq!(plan.starts(4), &[1]);
        assert_eq!(*plan.starts(1).last().unwrap(), 1 + 448);
        assert_eq!(representation_size(&plan), 1664);
    }

    #[test]
    fn plan_scales_with_channels() {
        let plan = plan_routing(&[512, 256, 128, 64], 3, 0.5).unwrap();
        assert_eq!(representation_size(&plan), 4992);
        assert_eq!(
            &plan.pseudochannels()[..4],
            &[
                Pseudochannel { scale: 1, window: 1, channel: 1 },
                Pseudochannel { scale: 1, window: 1, channel: 2 },
                Pseudochannel { scale: 1, window: 1, channel: 3 },
                Pseudochannel { scale: 1, window: 2, channel: 1 },
            ]
        );
    }

    #[test]
    fn plan_two_scales() {
        let plan = plan_routing(&[128, 64], 2, 0.5).unwrap();
        assert_eq!(plan.starts(1), &[1, 33, 65]);
        assert_eq!(plan.total_pseudochannels(), 2 * 4);
    }

    #[test]
    fn plan_identity() {
        for alpha in [0.0, 0.3, 0.99] {
            let plan = plan_routing(&[37], 4, alpha).unwrap();
            assert_eq!(plan.window_counts(), &[1]);
            assert_eq!(plan.all_starts(), &[vec![1]]);
            assert_eq!(plan.total_pseudochannels(), 4);
            assert_eq!(representation_size(&plan), 4 * 37);
        }
    }

    #[test]
    fn plan_rejects_bad_alpha() {
        for alpha in [-0.1, 1.0, 1.5, f64::NAN] {
            assert!(matches!(plan_routing(&[8, 4], 1, alpha), Err(Error::InvalidAlpha(_))));
        }
    }

    #[test]
    fn plan_rejects_increasing_lengths() {
        assert!(plan_routing(&[4, 8], 1, 0.5).is_err());
        assert!(plan_routing(&[], 1, 0.5).is_err());
    }

    #[test]
    fn non_dyadic_alpha_is_exact() {
        // (1 - 0.1) in binary is not 0.9; the window count must follow the
        // exact fraction. L_s - L_base = 9, L_base = 10: 9 / 9.000000000000000x
        // rounds up to 2 only if (1 - alpha) * 10 < 9 exactly.
        let alpha = 0.1f64;
        let (num, den) = Overlap::new(alpha).unwrap().as_fraction();
        let lhs = BigUint::from(9u32) * &den;
        let rhs = (&den - &num) * BigUint::from(10u32);
        let expected = if lhs > rhs { 3 } else { 2 };
        assert_eq!(window_count(19, 10, Overlap::new(alpha).unwrap()), expected);
    }

    #[test]
    fn apply_roman_shapes() {
        let x = Series::new(1, 512, (0..512).map(|t| t as f64).collect()).unwrap();
        let z = apply_roman(&x, &RomanConfig::with_depth(4, 0.5).unwrap()).unwrap();
        assert_eq!((z.tensor().channels(), z.tensor().len()), (26, 64));
        // row 1 is scale 1, window 2 which starts at sample 33 (1-based)
        assert_eq!(z.tensor().row(1)[0], 32.0);
    }

    #[test]
    fn min_base_matches_explicit_depth() {
        let x = Series::new(2, 512, (0..1024).map(|t| (t as f64).sin()).collect()).unwrap();
        let a = apply_roman(&x, &RomanConfig::with_depth(4, 0.5).unwrap()).unwrap();
        let b = apply_roman(&x, &RomanConfig::with_min_base(64, 0.5).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn constant_input_constant_rows() {
        let x = Series::new(3, 100, vec![-2.5; 300]).unwrap();
        for s in 1..=5 {
            let z = apply_roman(&x, &RomanConfig::with_depth(s, 0.25).unwrap()).unwrap();
            assert!(z.tensor().values().iter().all(|&v| v == -2.5));
        }
    }

    #[test]
    fn batch_rejects_mixed_shapes() {
        let a = Series::new(1, 10, vec![0.0; 10]).unwrap();
        let b = Series::new(1, 11, vec![0.0; 11]).unwrap();
        assert!(matches!(
            apply_roman_batch(&[a, b], &RomanConfig::identity()),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
