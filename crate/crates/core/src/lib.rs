//! Segment-duration benchmarking for EEG biometric identification.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`signal`] loads or synthesizes multi-channel recordings, applies a
//!    first-order Butterworth band-pass and cuts fixed-duration segments.
//! 2. [`features`] turns every segment channel into 19 scalar features
//!    (statistics, band powers, entropies, fractal dimensions, DFA).
//! 3. [`classify`] trains KNN, MLP and gradient-boosted-tree identifiers
//!    under a repeated stratified hold-out protocol.
//! 4. [`analysis`] sweeps a grid of durations and locates the knee of the
//!    resulting accuracy curves.
//! 5. [`report`] holds the run configuration, CSV/SVG writers and the
//!    command implementations used by the `seglen` binary.
//!
//! Numeric kernels are generic over [`Scalar`] (`f32` or `f64`). The
//! aliases below fix the scalar to `f64`, which is what the loaders and
//! classifiers use.

pub mod analysis;
pub mod classify;
pub mod error;
pub mod features;
pub mod numeric;
pub mod report;
pub mod scalar;
pub mod seed;
pub mod signal;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Recording = signal::Recording<f64>;
pub type Dataset = signal::Dataset<f64>;
pub type Segment = signal::Segment<f64>;
pub type FeatureVector = features::FeatureVector<f64>;
pub type AccuracyCurve = analysis::AccuracyCurve<f64>;

pub type Recording32 = signal::Recording<f32>;
pub type Segment32 = signal::Segment<f32>;
pub type FeatureVector32 = features::FeatureVector<f32>;

/// Toolkit version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
