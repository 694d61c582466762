use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Mean accuracy of one classifier over a duration grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyCurve<T> {
    pub dataset: String,
    pub classifier: String,
    /// Strictly increasing, in seconds.
    pub durations: Vec<T>,
    pub mean_acc: Vec<T>,
    pub std_acc: Vec<T>,
    /// Per-repeat accuracies at each duration.
    pub repeat_accs: Vec<Vec<T>>,
}

impl<T: Scalar> AccuracyCurve<T> {
    pub fn new(
        dataset: impl Into<String>,
        classifier: impl Into<String>,
        durations: Vec<T>,
        mean_acc: Vec<T>,
        std_acc: Vec<T>,
        repeat_accs: Vec<Vec<T>>,
    ) -> Result<Self> {
        let n = durations.len();
        if mean_acc.len() != n || std_acc.len() != n || repeat_accs.len() != n {
            return Err(Error::invalid("curve columns have different lengths"));
        }
        check_increasing(&durations)?;
        if mean_acc.iter().any(|&a| !(a >= T::zero() && a <= T::one())) {
            return Err(Error::invalid("mean accuracy outside [0, 1]"));
        }
        Ok(Self {
            dataset: dataset.into(),
            classifier: classifier.into(),
            durations,
            mean_acc,
            std_acc,
            repeat_accs,
        })
    }

    /// Curve from bare means; std 0 and no per-repeat values.
    pub fn from_means(classifier: impl Into<String>, durations: Vec<T>, mean_acc: Vec<T>) -> Result<Self> {
        let n = durations.len();
        Self::new("", classifier, durations, mean_acc, vec![T::zero(); n], vec![Vec::new(); n])
    }

    pub fn len(&self) -> usize {
        self.durations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.durations.is_empty()
    }
}

pub(crate) fn check_increasing<T: Scalar>(x: &[T]) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) || x.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("durations must be finite and strictly increasing"));
    }
    Ok(())
}

/// `(y - min) / (max - min)`.
pub fn min_max_normalize<T: Scalar>(y: &[T]) -> Result<Vec<T>> {
    if y.len() < 2 {
        return Err(Error::invalid("normalization needs at least 2 points"));
    }
    let lo = y.iter().copied().fold(T::infinity(), T::min);
    let hi = y.iter().copied().fold(T::neg_infinity(), T::max);
    let span = hi - lo;
    if !(span > T::zero()) || !span.is_finite() {
        return Err(Error::DegenerateNormalization);
    }
    Ok(y.iter().map(|&v| (v - lo) / span).collect())
}

/// Min-max normalized mean accuracies; std values scale by the same factor.
pub fn normalize_curve<T: Scalar>(curve: &AccuracyCurve<T>) -> Result<AccuracyCurve<T>> {
    let mean_acc = min_max_normalize(&curve.mean_acc)?;
    let lo = curve.mean_acc.iter().copied().fold(T::infinity(), T::min);
    let hi = curve.mean_acc.iter().copied().fold(T::neg_infinity(), T::max);
    let span = hi - lo;
    Ok(AccuracyCurve {
        mean_acc,
        std_acc: curve.std_acc.iter().map(|&s| s / span).collect(),
        repeat_accs: curve
            .repeat_accs
            .iter()
            .map(|r| r.iter().map(|&v| (v - lo) / span).collect())
            .collect(),
        ..curve.clone()
    })
}

/// Central differences on a non-uniform grid, one-sided at both ends.
pub fn derivative<T: Scalar>(x: &[T], y: &[T]) -> Result<Vec<T>> {
    if x.len() != y.len() {
        return Err(Error::invalid("x and y have different lengths"));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::invalid("derivative needs at least 3 points"));
    }
    check_increasing(x)?;
    let slope = |a: usize, b: usize| (y[b] - y[a]) / (x[b] - x[a]);
    Ok((0..n)
        .map(|i| match i {
            0 => slope(0, 1),
            _ if i == n - 1 => slope(n - 2, n - 1),
            _ => slope(i - 1, i + 1),
        })
        .collect())
}

pub fn derivative_curve<T: Scalar>(curve: &AccuracyCurve<T>) -> Result<Vec<T>> {
    derivative(&curve.durations, &curve.mean_acc)
}

/// Pointwise mean of several curves over the durations they all share.
pub fn pooled_mean_curve<T: Scalar>(curves: &[AccuracyCurve<T>]) -> Result<AccuracyCurve<T>> {
    let first = curves.first().ok_or_else(|| Error::invalid("no curves to pool"))?;
    let shared: Vec<usize> = (0..first.len())
        .filter(|&i| curves.iter().all(|c| c.durations.contains(&first.durations[i])))
        .collect();
    let k = T::of_usize(curves.len());
    let mut durations = Vec::with_capacity(shared.len());
    let mut mean_acc = Vec::with_capacity(shared.len());
    for &i in &shared {
        let d = first.durations[i];
        let sum: T = curves
            .iter()
            .map(|c| {
                let j = c.durations.iter().position(|&v| v == d).expect("shared duration");
                c.mean_acc[j]
            })
            .sum();
        durations.push(d);
        mean_acc.push(sum / k);
    }
    let n = durations.len();
    AccuracyCurve::new(
        first.dataset.clone(),
        "pooled",
        durations,
        mean_acc,
        vec![T::zero(); n],
        vec![Vec::new(); n],
    )
}
