//! The 19 per-channel features, in five families:
//!
//! | index | feature |
//! |-------|---------|
//! | 0-5   | mean, std, variance, peak-to-peak, skewness, kurtosis |
//! | 6-10  | delta, theta, alpha, beta, gamma band power |
//! | 11-14 | permutation, SVD, approximate and sample entropy |
//! | 15-17 | Petrosian, Katz and Higuchi fractal dimension |
//! | 18    | DFA scaling exponent |
//!
//! A feature that is mathematically undefined on a given input returns a
//! [`FeatureError`]; [`extract_vector`] records it as missing.

mod dfa;
mod entropy;
mod fractal;
mod spectral;
mod stats;
mod vector;

use thiserror::Error;

pub use dfa::{dfa_alpha, dfa_scales, DfaParams};
pub use entropy::{
    approximate_entropy, permutation_entropy, sample_entropy, svd_entropy, EntropyParams,
};
pub use fractal::{higuchi_fd, katz_fd, petrosian_fd};
pub use spectral::{band_powers, welch_psd, PsdParams, Psd, Window, BAND_NAMES};
pub use stats::{statistical_features, StatisticalFeatures};
pub use vector::{
    channel_features, extract_vector, extract_vectors, FeatureParams, FeatureVector,
    FEATURE_NAMES, N_FEATURES,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeatureError {
    #[error("input too short: need {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("undefined: {0}")]
    Undefined(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type FeatureResult<T> = std::result::Result<T, FeatureError>;

pub(crate) fn require_len<T>(x: &[T], needed: usize) -> FeatureResult<()> {
    if x.len() < needed {
        Err(FeatureError::TooShort {
            needed,
            got: x.len(),
        })
    } else {
        Ok(())
    }
}
