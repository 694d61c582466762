//! First-order Butterworth band-pass as a high-pass/low-pass cascade.
//!
//! Each stage is the bilinear transform of a first-order analog prototype
//! with the cutoff pre-warped so the digital -3 dB point lands exactly on
//! the requested frequency. With `K = tan(pi * fc / fs)`:
//!
//! ```text
//! low-pass:   H(z) = K/(1+K) * (1 + z^-1) / (1 + a1 z^-1)
//! high-pass:  H(z) = 1/(1+K) * (1 - z^-1) / (1 + a1 z^-1)
//!             a1 = (K - 1)/(K + 1)
//! ```
//!
//! Filtering is causal and single-pass (no zero-phase reversal), starting
//! from a zero state.

use num_traits::Float;

use crate::{Error, Result, Scalar};

/// `y[n] = b0 x[n] + b1 x[n-1] - a1 y[n-1]`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderSection<T> {
    pub b0: T,
    pub b1: T,
    pub a1: T,
}

impl<T: Scalar> FirstOrderSection<T> {
    pub fn lowpass(cutoff_hz: f64, fs: f64) -> Self {
        let k = (std::f64::consts::PI * cutoff_hz / fs).tan();
        let g = k / (1.0 + k);
        Self {
            b0: T::lit(g),
            b1: T::lit(g),
            a1: T::lit((k - 1.0) / (k + 1.0)),
        }
    }

    pub fn highpass(cutoff_hz: f64, fs: f64) -> Self {
        let k = (std::f64::consts::PI * cutoff_hz / fs).tan();
        let g = 1.0 / (1.0 + k);
        Self {
            b0: T::lit(g),
            b1: T::lit(-g),
            a1: T::lit((k - 1.0) / (k + 1.0)),
        }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(x.len());
        let (mut x1, mut y1) = (T::zero(), T::zero());
        for &v in x {
            let y = self.b0 * v + self.b1 * x1 - self.a1 * y1;
            out.push(y);
            x1 = v;
            y1 = y;
        }
        out
    }

    /// |H(e^{jw})| evaluated from the coefficients, `w = 2 pi f / fs`.
    pub fn magnitude(&self, freq_hz: f64, fs: f64) -> f64 {
        let w = 2.0 * std::f64::consts::PI * freq_hz / fs;
        let (c, s) = (w.cos(), w.sin());
        let (b0, b1, a1) = (self.b0.as_f64(), self.b1.as_f64(), self.a1.as_f64());
        let num = (b0 + b1 * c).hypot(-b1 * s);
        let den = (1.0 + a1 * c).hypot(-a1 * s);
        num / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandpassDesign<T> {
    pub fs: f64,
    pub low_hz: f64,
    pub high_hz: f64,
    pub highpass: FirstOrderSection<T>,
    pub lowpass: FirstOrderSection<T>,
}

impl<T: Scalar> BandpassDesign<T> {
    pub fn new(fs: f64, low_hz: f64, high_hz: f64) -> Result<Self> {
        let nyquist = fs / 2.0;
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(Error::invalid(format!("sampling rate must be > 0, got {fs}")));
        }
        if !(low_hz > 0.0 && low_hz < nyquist) || !(high_hz > 0.0 && high_hz < nyquist) {
            return Err(Error::invalid(format!(
                "cutoffs {low_hz}/{high_hz} Hz must lie in (0, {nyquist}) Hz"
            )));
        }
        if low_hz >= high_hz {
            return Err(Error::invalid(format!(
                "low cutoff {low_hz} Hz must be below high cutoff {high_hz} Hz"
            )));
        }
        Ok(Self {
            fs,
            low_hz,
            high_hz,
            highpass: FirstOrderSection::highpass(low_hz, fs),
            lowpass: FirstOrderSection::lowpass(high_hz, fs),
        })
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.lowpass.apply(&self.highpass.apply(x))
    }

    pub fn magnitude(&self, freq_hz: f64) -> f64 {
        self.highpass.magnitude(freq_hz, self.fs) * self.lowpass.magnitude(freq_hz, self.fs)
    }
}

/// Causal first-order Butterworth band-pass between `low_hz` and `high_hz`.
pub fn bandpass_filter<T: Scalar>(signal: &[T], fs: f64, low_hz: f64, high_hz: f64) -> Result<Vec<T>> {
    if signal.len() < 2 {
        return Err(Error::invalid(format!(
            "filter input needs at least 2 samples, got {}",
            signal.len()
        )));
    }
    if signal.iter().any(|v| !Float::is_finite(*v)) {
        return Err(Error::invalid("filter input contains non-finite samples"));
    }
    Ok(BandpassDesign::new(fs, low_hz, high_hz)?.apply(signal))
}
