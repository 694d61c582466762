use super::{require_len, FeatureResult};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatisticalFeatures<T> {
    pub mean: T,
    /// Population standard deviation.
    pub std: T,
    /// Population variance.
    pub variance: T,
    pub peak_to_peak: T,
    /// `m3 / m2^1.5`, 0 for constant input.
    pub skewness: T,
    /// Fisher excess kurtosis `m4 / m2^2 - 3`, 0 for constant input.
    pub kurtosis: T,
}

impl<T: Copy> StatisticalFeatures<T> {
    pub fn to_array(&self) -> [T; 6] {
        [
            self.mean,
            self.std,
            self.variance,
            self.peak_to_peak,
            self.skewness,
            self.kurtosis,
        ]
    }
}

pub fn statistical_features<T: Scalar>(x: &[T]) -> FeatureResult<StatisticalFeatures<T>> {
    require_len(x, 2)?;
    let n = T::of_usize(x.len());
    let mean = x.iter().copied().sum::<T>() / n;
    let (mut m2, mut m3, mut m4) = (T::zero(), T::zero(), T::zero());
    let (mut lo, mut hi) = (x[0], x[0]);
    for &v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 = m2 + d2;
        m3 = m3 + d2 * d;
        m4 = m4 + d2 * d2;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    m2 = m2 / n;
    m3 = m3 / n;
    m4 = m4 / n;
    let (skewness, kurtosis) = if m2 > T::zero() {
        (m3 / m2.powf(T::lit(1.5)), m4 / (m2 * m2) - T::lit(3.0))
    } else {
        (T::zero(), T::zero())
    };
    Ok(StatisticalFeatures {
        mean,
        std: m2.sqrt(),
        variance: m2,
        peak_to_peak: hi - lo,
        skewness,
        kurtosis,
    })
}
