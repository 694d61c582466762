//! Welch power spectral density and EEG band powers.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{require_len, FeatureError, FeatureResult};
use crate::signal::EEG_BANDS;
use crate::Scalar;

pub const BAND_NAMES: [&str; 5] = ["delta", "theta", "alpha", "beta", "gamma"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Hann,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsdParams {
    pub window: Window,
    /// Welch segment length in samples; `None` means one second of data.
    pub welch_segment_len: Option<usize>,
    /// Fractional overlap between consecutive Welch segments.
    pub overlap: f64,
}

impl Default for PsdParams {
    fn default() -> Self {
        Self {
            window: Window::Hann,
            welch_segment_len: None,
            overlap: 0.5,
        }
    }
}

/// One-sided power spectral density on bins `k * fs / nfft`, `k = 0..=nfft/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Psd<T> {
    pub freqs: Vec<f64>,
    pub density: Vec<T>,
    /// Bin spacing in Hz.
    pub resolution: f64,
}

impl<T: Scalar> Psd<T> {
    /// Rectangle-rule integral of the density over bins with `lo <= f < hi`.
    pub fn integrate(&self, lo: f64, hi: f64) -> T {
        let df = T::lit(self.resolution);
        self.freqs
            .iter()
            .zip(&self.density)
            .filter(|(&f, _)| f >= lo && f < hi)
            .map(|(_, &p)| p * df)
            .sum()
    }

    pub fn total_power(&self) -> T {
        self.density.iter().copied().sum::<T>() * T::lit(self.resolution)
    }
}

fn hann<T: Scalar>(n: usize) -> Vec<T> {
    // periodic Hann, the usual choice for spectral estimation
    (0..n)
        .map(|i| {
            let phase = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            T::lit(0.5 - 0.5 * phase.cos())
        })
        .collect()
}

/// Welch estimate with mean removal per segment.
///
/// The segment length is `min(len, welch_segment_len)`; when the input is
/// shorter than two segments a single periodogram over the whole input is
/// returned.
pub fn welch_psd<T: Scalar>(x: &[T], fs: f64, params: &PsdParams) -> FeatureResult<Psd<T>> {
    require_len(x, 4)?;
    if !(0.0..1.0).contains(&params.overlap) {
        return Err(FeatureError::InvalidParameter(format!(
            "overlap must be in [0, 1), got {}",
            params.overlap
        )));
    }
    let nominal = params
        .welch_segment_len
        .unwrap_or_else(|| fs.round().max(4.0) as usize);
    let mut seg_len = nominal.min(x.len());
    if x.len() < 2 * seg_len {
        seg_len = x.len();
    }
    let overlap = (seg_len as f64 * params.overlap).round() as usize;
    let step = (seg_len - overlap).max(1);

    let window: Vec<T> = match params.window {
        Window::Hann => hann(seg_len),
    };
    let win_power: T = window.iter().map(|&w| w * w).sum();
    let scale = T::one() / (T::lit(fs) * win_power);
    let n_bins = seg_len / 2 + 1;

    let fft = FftPlanner::<T>::new().plan_fft_forward(seg_len);
    let mut buf = vec![Complex::new(T::zero(), T::zero()); seg_len];
    let mut acc = vec![T::zero(); n_bins];
    let mut n_segments = 0usize;
    let mut start = 0;
    while start + seg_len <= x.len() {
        let seg = &x[start..start + seg_len];
        let mean = seg.iter().copied().sum::<T>() / T::of_usize(seg_len);
        for ((b, &v), &w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = Complex::new((v - mean) * w, T::zero());
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a = *a + b.norm_sqr();
        }
        n_segments += 1;
        start += step;
    }

    let two = T::lit(2.0);
    let norm = scale / T::of_usize(n_segments);
    let density = acc
        .into_iter()
        .enumerate()
        .map(|(k, p)| {
            let one_sided = k > 0 && !(seg_len % 2 == 0 && k == seg_len / 2);
            if one_sided {
                p * norm * two
            } else {
                p * norm
            }
        })
        .collect();
    let resolution = fs / seg_len as f64;
    Ok(Psd {
        freqs: (0..n_bins).map(|k| k as f64 * resolution).collect(),
        density,
        resolution,
    })
}

/// Delta, theta, alpha, beta and gamma power. Bands are half-open and
/// clipped to `[0, fs/2)`.
pub fn band_powers<T: Scalar>(x: &[T], fs: f64, params: &PsdParams) -> FeatureResult<[T; 5]> {
    let psd = welch_psd(x, fs, params)?;
    let nyquist = fs / 2.0;
    let mut out = [T::zero(); 5];
    for (o, &(lo, hi)) in out.iter_mut().zip(EEG_BANDS.iter()) {
        *o = psd.integrate(lo.min(nyquist), hi.min(nyquist));
    }
    Ok(out)
}
