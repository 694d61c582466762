//! Waveform fractal dimensions.

use super::{require_len, FeatureError, FeatureResult};
use crate::numeric::linear_fit;
use crate::Scalar;

/// `log10(n) / (log10(n) + log10(n / (n + 0.4 * n_delta)))`, where
/// `n_delta` counts strict sign changes of the first difference.
pub fn petrosian_fd<T: Scalar>(x: &[T]) -> FeatureResult<T> {
    require_len(x, 3)?;
    let mut n_delta = 0usize;
    let mut prev = x[1] - x[0];
    for w in x[1..].windows(2) {
        let d = w[1] - w[0];
        if d * prev < T::zero() {
            n_delta += 1;
        }
        prev = d;
    }
    let n = T::of_usize(x.len());
    let log_n = n.log10();
    Ok(log_n / (log_n + (n / (n + T::lit(0.4) * T::of_usize(n_delta))).log10()))
}

/// `log10(s) / (log10(s) + log10(d / L))` with `s` steps, `L` the summed
/// absolute amplitude steps and `d` the largest excursion from the first
/// sample. Undefined when `d = 0` or when `d` is below the mean step (the
/// denominator would be non-positive).
pub fn katz_fd<T: Scalar>(x: &[T]) -> FeatureResult<T> {
    require_len(x, 3)?;
    let path: T = x.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    let first = x[0];
    let extent = x.iter().map(|&v| (v - first).abs()).fold(T::zero(), T::max);
    if extent <= T::zero() {
        return Err(FeatureError::Undefined("no excursion from the first sample"));
    }
    let steps = T::of_usize(x.len() - 1);
    let log_steps = steps.log10();
    let denom = log_steps + (extent / path).log10();
    if denom <= T::zero() {
        return Err(FeatureError::Undefined("excursion below mean step length"));
    }
    Ok(log_steps / denom)
}

/// Higuchi dimension: slope of `ln L(k)` against `ln(1/k)` for
/// `k = 1..=max(2, min(kmax, n/4))`.
pub fn higuchi_fd<T: Scalar>(x: &[T], kmax: usize) -> FeatureResult<T> {
    require_len(x, 3)?;
    if kmax < 2 {
        return Err(FeatureError::InvalidParameter("kmax must be >= 2".into()));
    }
    let n = x.len();
    let kmax = kmax.min(n / 4).max(2);
    let mut log_inv_k = Vec::with_capacity(kmax);
    let mut log_len = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let mut sum = T::zero();
        let mut used = 0usize;
        for start in 0..k {
            let steps = (n - 1 - start) / k;
            if steps == 0 {
                continue;
            }
            let mut len = T::zero();
            for i in 1..=steps {
                len = len + (x[start + i * k] - x[start + (i - 1) * k]).abs();
            }
            let norm = T::of_usize(n - 1) / T::of_usize(steps * k);
            sum = sum + len * norm / T::of_usize(k);
            used += 1;
        }
        if used == 0 {
            continue;
        }
        let mean_len = sum / T::of_usize(used);
        if mean_len <= T::zero() {
            return Err(FeatureError::Undefined("zero curve length"));
        }
        log_inv_k.push((T::one() / T::of_usize(k)).ln());
        log_len.push(mean_len.ln());
    }
    linear_fit(&log_inv_k, &log_len)
        .map(|(slope, _)| slope)
        .ok_or(FeatureError::Undefined("fewer than two usable scales"))
}
