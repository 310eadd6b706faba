//! Multiscale routing for time series.
//!
//! The central operator builds an anti-aliased dyadic pyramid of a
//! multivariate series and routes fixed-length windows of every level into
//! pseudochannels, trading temporal length for channel width. Around it the
//! crate provides seeded synthetic mechanism tasks, two lightweight probe
//! classifiers, archive-format IO and a benchmark/ensemble harness.
//!
//! ```
//! use roman::{apply_roman, RomanConfig, Series};
//!
//! let x = Series::from_rows(&[(0..512).map(|t| (t as f64 * 0.05).sin()).collect::<Vec<_>>()]).unwrap();
//! let z = apply_roman(&x, &RomanConfig::with_depth(4, 0.5).unwrap()).unwrap();
//! assert_eq!(z.tensor().channels(), 26);
//! assert_eq!(z.tensor().len(), 64);
//! ```

pub mod batch;
pub mod bench;
pub mod dataset;
mod error;
pub mod io;
pub mod probes;
pub mod pyramid;
pub mod rng;
pub mod routing;
mod series;
pub mod stats;
pub mod synth;

pub use batch::{Batch, BatchView};
pub use dataset::TimeSeriesDataset;
pub use error::{Error, Result};
pub use pyramid::{build_pyramid, decimate, smooth, Boundary, Pyramid};
pub use routing::{
    apply_roman, plan_for_shape, plan_routing, representation_size, resolve_depth, route_batch, DepthMode, Overlap,
    Pseudochannel, RomanConfig, RoutedRepresentation, RoutingPlan,
};
pub use series::Series;

/// Crate version, embedded in every serialized artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
