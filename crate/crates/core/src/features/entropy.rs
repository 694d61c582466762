//! Permutation, SVD, approximate and sample entropy.

use serde::{Deserialize, Serialize};

use super::{require_len, FeatureError, FeatureResult};
use crate::numeric::singular_values;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntropyParams {
    /// Template length for approximate and sample entropy.
    pub m: usize,
    /// Tolerance as a multiple of the input's standard deviation.
    pub r_factor: f64,
    pub pe_order: usize,
    pub pe_delay: usize,
    pub svd_order: usize,
    pub svd_delay: usize,
}

impl Default for EntropyParams {
    fn default() -> Self {
        Self {
            m: 2,
            r_factor: 0.2,
            pe_order: 3,
            pe_delay: 1,
            svd_order: 10,
            svd_delay: 1,
        }
    }
}

const MAX_PE_ORDER: usize = 10;

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Index of the permutation that stably sorts `window`, in `0..order!`.
fn ordinal_pattern<T: Scalar>(window: &[T], idx: &mut [usize]) -> usize {
    for (i, v) in idx.iter_mut().enumerate() {
        *v = i;
    }
    // insertion sort: stable, tiny inputs
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && window[idx[j - 1]] > window[idx[j]] {
            idx.swap(j - 1, j);
            j -= 1;
        }
    }
    // Lehmer code of the permutation
    let n = idx.len();
    let mut code = 0;
    for i in 0..n {
        let smaller = idx[i + 1..].iter().filter(|&&v| v < idx[i]).count();
        code = code * (n - i) + smaller;
    }
    code
}

/// Shannon entropy of the ordinal-pattern distribution divided by
/// `ln(order!)`. Ties are ranked by position.
pub fn permutation_entropy<T: Scalar>(x: &[T], order: usize, delay: usize) -> FeatureResult<T> {
    if !(2..=MAX_PE_ORDER).contains(&order) || delay == 0 {
        return Err(FeatureError::InvalidParameter(format!(
            "permutation entropy needs 2 <= order <= {MAX_PE_ORDER} and delay >= 1"
        )));
    }
    require_len(x, order * delay + 1)?;
    let span = (order - 1) * delay;
    let n_patterns = x.len() - span;
    let mut counts = vec![0usize; factorial(order)];
    let mut window = vec![T::zero(); order];
    let mut idx = vec![0usize; order];
    for start in 0..n_patterns {
        for (k, w) in window.iter_mut().enumerate() {
            *w = x[start + k * delay];
        }
        counts[ordinal_pattern(&window, &mut idx)] += 1;
    }
    Ok(shannon::<T>(&counts, n_patterns) / T::lit((factorial(order) as f64).ln()))
}

fn shannon<T: Scalar>(counts: &[usize], total: usize) -> T {
    let total = T::of_usize(total);
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = T::of_usize(c) / total;
            -p * p.ln()
        })
        .sum()
}

/// Entropy of the normalized singular spectrum of the delay embedding,
/// divided by `ln(order)`.
pub fn svd_entropy<T: Scalar>(x: &[T], order: usize, delay: usize) -> FeatureResult<T> {
    if order < 2 || delay == 0 {
        return Err(FeatureError::InvalidParameter(
            "SVD entropy needs order >= 2 and delay >= 1".into(),
        ));
    }
    require_len(x, order * delay)?;
    let rows = x.len() - (order - 1) * delay;
    let cols: Vec<Vec<T>> = (0..order)
        .map(|k| x[k * delay..k * delay + rows].to_vec())
        .collect();
    let sv = singular_values(cols);
    let max = sv.iter().copied().fold(T::zero(), T::max);
    if max <= T::zero() {
        return Err(FeatureError::Undefined("embedding matrix is zero"));
    }
    let cutoff = max * T::epsilon() * T::of_usize(rows.max(order));
    let kept: Vec<T> = sv.into_iter().filter(|&s| s > cutoff).collect();
    let total: T = kept.iter().copied().sum();
    let h: T = kept
        .iter()
        .map(|&s| {
            let p = s / total;
            -p * p.ln()
        })
        .sum();
    Ok(h / T::lit((order as f64).ln()))
}

fn check_tolerance<T: Scalar>(r: T) -> FeatureResult<()> {
    if !(r >= T::zero()) || !r.is_finite() {
        return Err(FeatureError::InvalidParameter(format!("tolerance r must be >= 0, got {r}")));
    }
    Ok(())
}

/// Chebyshev distance between the length-`m` templates at `i` and `j`
/// is at most `r`.
#[inline]
fn templates_match<T: Scalar>(x: &[T], i: usize, j: usize, m: usize, r: T) -> bool {
    (0..m).all(|k| (x[i + k] - x[j + k]).abs() <= r)
}

/// Pincus approximate entropy `Phi(m) - Phi(m+1)`, self-matches included.
pub fn approximate_entropy<T: Scalar>(x: &[T], m: usize, r: T) -> FeatureResult<T> {
    if m == 0 {
        return Err(FeatureError::InvalidParameter("m must be >= 1".into()));
    }
    check_tolerance(r)?;
    require_len(x, m + 2)?;
    let n = x.len();
    let n_m = n - m + 1;
    let n_m1 = n - m;
    let mut c_m = vec![1usize; n_m];
    let mut c_m1 = vec![1usize; n_m1];
    for i in 0..n_m {
        for j in (i + 1)..n_m {
            if templates_match(x, i, j, m, r) {
                c_m[i] += 1;
                c_m[j] += 1;
                if j < n_m1 && (x[i + m] - x[j + m]).abs() <= r {
                    c_m1[i] += 1;
                    c_m1[j] += 1;
                }
            }
        }
    }
    let phi = |counts: &[usize]| {
        let total = T::of_usize(counts.len());
        counts
            .iter()
            .map(|&c| (T::of_usize(c) / total).ln())
            .sum::<T>()
            / total
    };
    Ok(phi(&c_m) - phi(&c_m1))
}

/// Richman-Moorman sample entropy `-ln(A/B)` over the first `n - m`
/// templates, self-matches excluded. Undefined when no template pair
/// matches at length `m` or `m + 1`.
pub fn sample_entropy<T: Scalar>(x: &[T], m: usize, r: T) -> FeatureResult<T> {
    if m == 0 {
        return Err(FeatureError::InvalidParameter("m must be >= 1".into()));
    }
    check_tolerance(r)?;
    require_len(x, m + 2)?;
    let n_templates = x.len() - m;
    let (mut a, mut b) = (0u64, 0u64);
    for i in 0..n_templates {
        for j in (i + 1)..n_templates {
            if templates_match(x, i, j, m, r) {
                b += 1;
                if (x[i + m] - x[j + m]).abs() <= r {
                    a += 1;
                }
            }
        }
    }
    if a == 0 || b == 0 {
        return Err(FeatureError::Undefined("no template matches"));
    }
    Ok(-(T::lit(a as f64) / T::lit(b as f64)).ln())
}
