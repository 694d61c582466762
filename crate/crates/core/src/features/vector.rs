use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    approximate_entropy, band_powers, dfa_alpha, higuchi_fd, katz_fd, permutation_entropy,
    petrosian_fd, sample_entropy, statistical_features, svd_entropy, DfaParams, EntropyParams,
    PsdParams,
};
use crate::numeric::std_dev;
use crate::signal::Segment;
use crate::Scalar;

pub const N_FEATURES: usize = 19;

/// Per-channel feature order inside a [`FeatureVector`].
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "mean",
    "std",
    "variance",
    "peak_to_peak",
    "skewness",
    "kurtosis",
    "power_delta",
    "power_theta",
    "power_alpha",
    "power_beta",
    "power_gamma",
    "permutation_entropy",
    "svd_entropy",
    "approximate_entropy",
    "sample_entropy",
    "petrosian_fd",
    "katz_fd",
    "higuchi_fd",
    "dfa_alpha",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureParams {
    pub psd: PsdParams,
    pub entropy: EntropyParams,
    pub higuchi_kmax: usize,
    pub dfa: DfaParams,
}

impl Default for FeatureParams {
    fn default() -> Self {
        Self {
            psd: PsdParams::default(),
            entropy: EntropyParams::default(),
            higuchi_kmax: 10,
            dfa: DfaParams::default(),
        }
    }
}

impl FeatureParams {
    pub fn validate(&self) -> crate::Result<()> {
        let e = &self.entropy;
        let bad = |m: &str| Err(crate::Error::Config(format!("features: {m}")));
        if e.m < 1 {
            return bad("entropy.m must be >= 1");
        }
        if !(e.r_factor > 0.0) {
            return bad("entropy.r_factor must be > 0");
        }
        if e.pe_order < 2 || e.pe_delay < 1 {
            return bad("entropy.pe_order must be >= 2 and pe_delay >= 1");
        }
        if e.svd_order < 2 || e.svd_delay < 1 {
            return bad("entropy.svd_order must be >= 2 and svd_delay >= 1");
        }
        if self.higuchi_kmax < 2 {
            return bad("higuchi_kmax must be >= 2");
        }
        if !(0.0..1.0).contains(&self.psd.overlap) {
            return bad("psd.overlap must be in [0, 1)");
        }
        if !(self.dfa.max_box_fraction > 0.0 && self.dfa.max_box_fraction <= 1.0) {
            return bad("dfa.max_box_fraction must be in (0, 1]");
        }
        Ok(())
    }
}

/// Features of one segment, channel-major: the 19 features of channel 0,
/// then channel 1, and so on. `None` marks an undefined value.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T> {
    pub subject_id: String,
    pub condition: String,
    pub duration_s: f64,
    pub values: Vec<Option<T>>,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn n_channels(&self) -> usize {
        self.values.len() / N_FEATURES
    }

    pub fn get(&self, channel: usize, feature: usize) -> Option<T> {
        self.values[channel * N_FEATURES + feature]
    }

    pub fn n_missing(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

/// The 19 features of one channel. Undefined or non-finite values are `None`.
pub fn channel_features<T: Scalar>(x: &[T], fs: f64, params: &FeatureParams) -> [Option<T>; N_FEATURES] {
    let mut out = [None; N_FEATURES];
    if let Ok(s) = statistical_features(x) {
        for (o, v) in out[0..6].iter_mut().zip(s.to_array()) {
            *o = Some(v);
        }
    }
    if let Ok(p) = band_powers(x, fs, &params.psd) {
        for (o, v) in out[6..11].iter_mut().zip(p) {
            *o = Some(v);
        }
    }
    let e = &params.entropy;
    let r = T::lit(e.r_factor) * std_dev(x);
    out[11] = permutation_entropy(x, e.pe_order, e.pe_delay).ok();
    out[12] = svd_entropy(x, e.svd_order, e.svd_delay).ok();
    out[13] = approximate_entropy(x, e.m, r).ok();
    out[14] = sample_entropy(x, e.m, r).ok();
    out[15] = petrosian_fd(x).ok();
    out[16] = katz_fd(x).ok();
    out[17] = higuchi_fd(x, params.higuchi_kmax).ok();
    out[18] = dfa_alpha(x, &params.dfa).ok();
    for v in out.iter_mut() {
        if matches!(v, Some(f) if !f.is_finite()) {
            *v = None;
        }
    }
    out
}

pub fn extract_vector<T: Scalar>(segment: &Segment<T>, params: &FeatureParams) -> FeatureVector<T> {
    let values = segment
        .data
        .iter()
        .flat_map(|ch| channel_features(ch, segment.fs, params))
        .collect();
    FeatureVector {
        subject_id: segment.subject_id.clone(),
        condition: segment.condition.clone(),
        duration_s: segment.duration_s,
        values,
    }
}

/// [`extract_vector`] over many segments on the rayon pool, in input order.
pub fn extract_vectors<T: Scalar>(segments: &[Segment<T>], params: &FeatureParams) -> Vec<FeatureVector<T>> {
    segments.par_iter().map(|s| extract_vector(s, params)).collect()
}
