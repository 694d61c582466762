//! Duration sweep and accuracy-curve analysis: min-max normalization,
//! finite-difference derivatives, Kneedle knee detection and Pearson
//! comparison against reference curves.

mod correlation;
mod curve;
mod knee;
mod sweep;

pub use correlation::{
    average_ranks, compare_to_reference, interpolate_linear, pearson_correlation, pearson_r, spearman, Correlation,
};
pub use curve::{derivative, derivative_curve, min_max_normalize, normalize_curve, pooled_mean_curve, AccuracyCurve};
pub use knee::{detect_knee, detect_knee_curve, difference_curve, KneeOutcome, KneeResult};
pub use sweep::{
    preprocess_dataset, run_sweep, run_sweep_with, segment_features, validate_grid, ConditionMode, Preprocess,
    SweepConfig, GRID_BOUNDS_S,
};
