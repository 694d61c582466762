use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::curve::check_increasing;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    /// Two-tailed p-value against Student's t with `n - 2` degrees of freedom.
    pub p_value: f64,
    pub n: usize,
}

/// Sample Pearson correlation from a single-pass co-moment update.
pub fn pearson_r<T: Scalar>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::invalid("correlation needs at least 2 points"));
    }
    let (mut ma, mut mb) = (0.0, 0.0);
    let (mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0);
    for (k, (&x, &y)) in a.iter().zip(b).enumerate() {
        let (x, y) = (x.as_f64(), y.as_f64());
        let n = (k + 1) as f64;
        let dx = x - ma;
        let dy = y - mb;
        ma += dx / n;
        mb += dy / n;
        saa += dx * (x - ma);
        sbb += dy * (y - mb);
        sab += dx * (y - mb);
    }
    if !(saa > 0.0) || !(sbb > 0.0) {
        return Err(Error::invalid("correlation of a constant series is undefined"));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson `r` with its two-tailed p-value from
/// `t = r * sqrt((n - 2) / (1 - r^2))`.
pub fn pearson_correlation<T: Scalar>(a: &[T], b: &[T]) -> Result<Correlation> {
    if a.len() < 3 {
        return Err(Error::invalid("pearson correlation needs at least 3 points"));
    }
    let r = pearson_r(a, b)?;
    let n = a.len();
    let dof = (n - 2) as f64;
    let p_value = if r.abs() >= 1.0 {
        0.0
    } else {
        let t = r * (dof / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, dof).expect("positive degrees of freedom");
        (2.0 * dist.sf(t.abs())).min(1.0)
    };
    Ok(Correlation { r, p_value, n })
}

/// 1-based ranks, ties get their average rank.
pub fn average_ranks<T: Scalar>(x: &[T]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&i, &j| x[i].partial_cmp(&x[j]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && x[idx[end]] == x[idx[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        idx[start..end].iter().for_each(|&i| ranks[i] = avg);
        start = end;
    }
    ranks
}

/// Spearman rank correlation (Pearson on average ranks).
pub fn spearman<T: Scalar>(a: &[T], b: &[T]) -> Result<f64> {
    pearson_r(&average_ranks(a), &average_ranks(b))
}

/// Piecewise-linear interpolation; `None` outside `[xs[0], xs[last]]`.
pub fn interpolate_linear<T: Scalar>(xs: &[T], ys: &[T], x: T) -> Option<T> {
    let last = xs.len().checked_sub(1)?;
    if x < xs[0] || x > xs[last] {
        return None;
    }
    let hi = xs.partition_point(|&v| v < x);
    if xs[hi] == x {
        return Some(ys[hi]);
    }
    let lo = hi - 1;
    let w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    Some(ys[lo] + w * (ys[hi] - ys[lo]))
}

/// Interpolates the reference onto the curve's durations (no
/// extrapolation) and correlates the overlapping points.
pub fn compare_to_reference<T: Scalar>(
    durations: &[T],
    values: &[T],
    ref_durations: &[T],
    ref_values: &[T],
) -> Result<Correlation> {
    if durations.len() != values.len() || ref_durations.len() != ref_values.len() {
        return Err(Error::invalid("curve columns have different lengths"));
    }
    check_increasing(durations)?;
    check_increasing(ref_durations)?;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (&d, &v) in durations.iter().zip(values) {
        if let Some(r) = interpolate_linear(ref_durations, ref_values, d) {
            a.push(v);
            b.push(r);
        }
    }
    if a.is_empty() {
        return Err(Error::NoOverlap);
    }
    pearson_correlation(&a, &b)
}
