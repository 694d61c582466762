//! Detrended fluctuation analysis (first-order detrending).

use serde::{Deserialize, Serialize};

use super::{require_len, FeatureError, FeatureResult};
use crate::numeric::{linear_detrend_sse, linear_fit};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DfaParams {
    pub min_box: usize,
    /// Largest box is `floor(len * max_box_fraction)`.
    pub max_box_fraction: f64,
    /// Upper bound on the number of log-spaced box sizes.
    pub n_scales: usize,
}

impl Default for DfaParams {
    fn default() -> Self {
        Self {
            min_box: 4,
            max_box_fraction: 0.25,
            n_scales: 10,
        }
    }
}

pub const DFA_MIN_LEN: usize = 20;

/// Distinct, increasing, log-spaced box sizes for a series of length `len`.
pub fn dfa_scales(len: usize, params: &DfaParams) -> Vec<usize> {
    let lo = params.min_box.max(2);
    let hi = (len as f64 * params.max_box_fraction).floor() as usize;
    if hi < lo || params.n_scales == 0 {
        return Vec::new();
    }
    if params.n_scales == 1 || hi == lo {
        return vec![lo];
    }
    let (llo, lhi) = ((lo as f64).ln(), (hi as f64).ln());
    let steps = (params.n_scales - 1) as f64;
    let mut scales: Vec<usize> = (0..params.n_scales)
        .map(|i| (llo + (lhi - llo) * i as f64 / steps).exp().round() as usize)
        .map(|s| s.clamp(lo, hi))
        .collect();
    scales.dedup();
    scales
}

/// Scaling exponent: least-squares slope of `ln F(s)` against `ln s`,
/// where `F(s)` is the RMS residual of per-box linear fits to the
/// integrated, mean-removed series over non-overlapping boxes of size `s`.
pub fn dfa_alpha<T: Scalar>(x: &[T], params: &DfaParams) -> FeatureResult<T> {
    require_len(x, DFA_MIN_LEN)?;
    let scales = dfa_scales(x.len(), params);
    if scales.len() < 2 {
        return Err(FeatureError::Undefined("fewer than two feasible box sizes"));
    }
    let mean = x.iter().copied().sum::<T>() / T::of_usize(x.len());
    let mut acc = T::zero();
    let profile: Vec<T> = x
        .iter()
        .map(|&v| {
            acc = acc + (v - mean);
            acc
        })
        .collect();

    let mut log_s = Vec::with_capacity(scales.len());
    let mut log_f = Vec::with_capacity(scales.len());
    for &s in &scales {
        let n_boxes = profile.len() / s;
        let sse: T = profile
            .chunks_exact(s)
            .take(n_boxes)
            .map(linear_detrend_sse)
            .sum();
        let f = (sse / T::of_usize(n_boxes * s)).sqrt();
        if !(f > T::zero()) {
            return Err(FeatureError::Undefined("zero fluctuation"));
        }
        log_s.push(T::of_usize(s).ln());
        log_f.push(f.ln());
    }
    linear_fit(&log_s, &log_f)
        .map(|(slope, _)| slope)
        .ok_or(FeatureError::Undefined("degenerate scale fit"))
}
