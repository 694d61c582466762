//! Subject-specific synthetic EEG.
//!
//! Every subject gets, per channel, one sinusoidal oscillator in each
//! classical EEG band with a fixed amplitude and frequency, plus a `1/f^beta`
//! aperiodic background with a subject-specific exponent. Each recording of
//! that subject redraws oscillator phases and the noise realizations only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{Dataset, Recording};
use crate::seed::derive_seed;
use crate::{Error, Result};

/// Band edges in Hz: delta, theta, alpha, beta, gamma.
pub const EEG_BANDS: [(f64, f64); 5] = [(0.5, 4.0), (4.0, 8.0), (8.0, 13.0), (13.0, 30.0), (30.0, 45.0)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub name: String,
    pub n_subjects: usize,
    pub n_channels: usize,
    pub fs: f64,
    /// Seconds per recording.
    pub duration_s: f64,
    /// One recording per subject per condition.
    pub conditions: Vec<String>,
    /// Uniform range for each band oscillator's amplitude (µV).
    pub amplitude_uv: [f64; 2],
    /// Uniform range for the aperiodic exponent.
    pub aperiodic_exponent: [f64; 2],
    /// RMS of the aperiodic component (µV).
    pub aperiodic_uv: f64,
    /// Standard deviation of the white measurement noise (µV).
    pub noise_floor_uv: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            name: "synthetic".into(),
            n_subjects: 10,
            n_channels: 4,
            fs: 128.0,
            duration_s: 60.0,
            conditions: vec!["rest".into()],
            amplitude_uv: [1.0, 6.0],
            aperiodic_exponent: [0.8, 1.4],
            aperiodic_uv: 12.0,
            noise_floor_uv: 2.0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("synth: {m}")));
        if self.n_subjects < 2 {
            return Err(Error::TooFewSubjects(self.n_subjects));
        }
        if self.n_channels == 0 {
            return bad("n_channels must be >= 1".into());
        }
        if !(self.fs > 0.0 && self.fs.is_finite()) {
            return bad(format!("fs must be > 0, got {}", self.fs));
        }
        if !(self.duration_s > 0.0 && (self.duration_s * self.fs) >= 2.0) {
            return bad(format!("duration_s {} too short", self.duration_s));
        }
        if self.conditions.is_empty() {
            return bad("conditions must not be empty".into());
        }
        let range_ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] <= r[1];
        if !range_ok(self.amplitude_uv) || self.amplitude_uv[0] < 0.0 {
            return bad(format!("bad amplitude range {:?}", self.amplitude_uv));
        }
        if !range_ok(self.aperiodic_exponent) {
            return bad(format!("bad exponent range {:?}", self.aperiodic_exponent));
        }
        if self.aperiodic_uv < 0.0 || self.noise_floor_uv < 0.0 {
            return bad("noise levels must be non-negative".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct SubjectModel {
    /// `[channel][band] -> (amplitude, frequency)`
    oscillators: Vec<Vec<(f64, f64)>>,
    exponent: f64,
}

fn uniform(rng: &mut impl Rng, r: [f64; 2]) -> f64 {
    if r[0] == r[1] {
        r[0]
    } else {
        rng.random_range(r[0]..r[1])
    }
}

fn draw_subject(spec: &SynthSpec, subject: usize) -> SubjectModel {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &[subject as u64, 0]));
    let top = 0.45 * spec.fs;
    let oscillators = (0..spec.n_channels)
        .map(|_| {
            EEG_BANDS
                .iter()
                .map(|&(lo, hi)| {
                    let amp = uniform(&mut rng, spec.amplitude_uv);
                    let hi = hi.min(top);
                    let freq = if lo < hi { rng.random_range(lo..hi) } else { lo.min(top) };
                    (amp, freq)
                })
                .collect()
        })
        .collect();
    SubjectModel {
        oscillators,
        exponent: uniform(&mut rng, spec.aperiodic_exponent),
    }
}

/// Unit-RMS `1/f^exponent` noise by spectral shaping of white Gaussian noise.
fn aperiodic_noise(rng: &mut impl Rng, n: usize, exponent: f64, planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|_| Complex::new(rng.sample::<f64, _>(StandardNormal), 0.0))
        .collect();
    if n < 2 {
        return vec![0.0; n];
    }
    planner.plan_fft_forward(n).process(&mut buf);
    buf[0] = Complex::new(0.0, 0.0);
    for (k, b) in buf.iter_mut().enumerate().skip(1) {
        let bin = k.min(n - k) as f64;
        *b *= bin.powf(-exponent / 2.0);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let out: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let rms = (out.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if rms > 0.0 {
        out.into_iter().map(|v| v / rms).collect()
    } else {
        out
    }
}

/// Deterministic in `spec` (including its seed).
pub fn generate_synthetic_dataset(spec: &SynthSpec) -> Result<Dataset<f64>> {
    spec.validate()?;
    let n = (spec.duration_s * spec.fs).round() as usize;
    let width = spec.n_subjects.to_string().len().max(2);
    let channels: Vec<String> = (0..spec.n_channels).map(|c| format!("C{:02}", c + 1)).collect();
    let mut planner = FftPlanner::new();
    let tau = 2.0 * std::f64::consts::PI;

    let mut recordings = Vec::with_capacity(spec.n_subjects * spec.conditions.len());
    for subject in 0..spec.n_subjects {
        let model = draw_subject(spec, subject);
        let subject_id = format!("S{:0width$}", subject + 1);
        for (ci, condition) in spec.conditions.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
                spec.seed,
                &[subject as u64, 1 + ci as u64],
            ));
            let mut data = Vec::with_capacity(spec.n_channels);
            for oscillators in &model.oscillators {
                let phases: Vec<f64> = oscillators.iter().map(|_| rng.random_range(0.0..tau)).collect();
                let pink = aperiodic_noise(&mut rng, n, model.exponent, &mut planner);
                let channel = (0..n)
                    .map(|t| {
                        let time = t as f64 / spec.fs;
                        let periodic: f64 = oscillators
                            .iter()
                            .zip(&phases)
                            .map(|(&(a, f), &p)| a * (tau * f * time + p).sin())
                            .sum();
                        let white: f64 = rng.sample(StandardNormal);
                        periodic + spec.aperiodic_uv * pink[t] + spec.noise_floor_uv * white
                    })
                    .collect();
                data.push(channel);
            }
            recordings.push(Recording::new(
                subject_id.clone(),
                condition.clone(),
                channels.clone(),
                spec.fs,
                data,
            )?);
        }
    }
    Dataset::new(spec.name.clone(), recordings)
}
