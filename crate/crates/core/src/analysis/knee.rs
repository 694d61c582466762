//! Kneedle knee detection for concave increasing curves.

use serde::{Deserialize, Serialize};

use super::curve::{check_increasing, min_max_normalize, AccuracyCurve};
use crate::{Error, Result, Scalar};

/// Difference values within this distance of the maximum count as ties.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KneeResult<T> {
    pub index: usize,
    /// Always one of the input durations.
    pub knee_duration: T,
    /// `y_norm - x_norm` at every grid point.
    pub difference_curve: Vec<T>,
    /// Maximum of the difference curve.
    pub confidence: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum KneeOutcome<T> {
    Knee(KneeResult<T>),
    /// The difference curve never rises above zero (linear or convex input).
    NoKnee { difference_curve: Vec<T> },
}

impl<T: Scalar> KneeOutcome<T> {
    pub fn knee(&self) -> Option<&KneeResult<T>> {
        match self {
            Self::Knee(k) => Some(k),
            Self::NoKnee { .. } => None,
        }
    }

    pub fn difference_curve(&self) -> &[T] {
        match self {
            Self::Knee(k) => &k.difference_curve,
            Self::NoKnee { difference_curve } => difference_curve,
        }
    }
}

/// Normalizes both axes to `[0, 1]` and returns `y_norm - x_norm`.
pub fn difference_curve<T: Scalar>(x: &[T], y: &[T]) -> Result<Vec<T>> {
    if x.len() != y.len() {
        return Err(Error::invalid("x and y have different lengths"));
    }
    if x.len() < 3 {
        return Err(Error::invalid("knee detection needs at least 3 points"));
    }
    check_increasing(x)?;
    let xn = min_max_normalize(x)?;
    let yn = min_max_normalize(y)?;
    Ok(yn.iter().zip(&xn).map(|(&a, &b)| a - b).collect())
}

/// Knee at the maximum of the difference curve; ties go to the smaller
/// duration.
pub fn detect_knee<T: Scalar>(x: &[T], y: &[T]) -> Result<KneeOutcome<T>> {
    let d = difference_curve(x, y)?;
    let max = d.iter().copied().fold(T::neg_infinity(), T::max);
    let tol = T::lit(TIE_TOLERANCE);
    if max <= tol {
        return Ok(KneeOutcome::NoKnee { difference_curve: d });
    }
    let index = d.iter().position(|&v| v >= max - tol).expect("maximum exists");
    Ok(KneeOutcome::Knee(KneeResult {
        index,
        knee_duration: x[index],
        difference_curve: d,
        confidence: max,
    }))
}

pub fn detect_knee_curve<T: Scalar>(curve: &AccuracyCurve<T>) -> Result<KneeOutcome<T>> {
    detect_knee(&curve.durations, &curve.mean_acc)
}
