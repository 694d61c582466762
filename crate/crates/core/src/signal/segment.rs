use super::Recording;
use crate::{Error, Result, Scalar};

pub const MIN_GRID_DURATION_S: f64 = 0.1;
pub const MAX_GRID_DURATION_S: f64 = 10.0;

/// A fixed-duration window of a recording, the unit of classification.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<T> {
    pub subject_id: String,
    pub condition: String,
    pub fs: f64,
    pub duration_s: f64,
    /// Start index in the parent recording.
    pub source_offset: usize,
    /// Channel-major samples, each of length `len()`.
    pub data: Vec<Vec<T>>,
}

impl<T> Segment<T> {
    pub fn len(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_channels(&self) -> usize {
        self.data.len()
    }
}

/// Nineteen durations from 0.1 s to 10 s, dense below 1 s.
pub fn default_duration_grid() -> Vec<f64> {
    vec![
        0.1, 0.2, 0.3, 0.4, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 6.0, 7.0, 8.0, 9.0,
        10.0,
    ]
}

/// Samples per segment, `floor(duration * fs)`.
///
/// A relative slack of 1e-9 absorbs products such as `2.3 * 100.0 =
/// 229.99999999999997` that are integral in exact arithmetic.
pub fn sample_count(duration_s: f64, fs: f64) -> usize {
    let p = duration_s * fs;
    (p + p.abs() * 1e-9).floor().max(0.0) as usize
}

/// Cuts `recording` into consecutive non-overlapping windows starting at
/// sample 0. The trailing remainder is discarded. A window longer than the
/// recording yields an empty list and a warning.
pub fn segment_recording<T: Scalar>(
    recording: &Recording<T>,
    duration_s: f64,
) -> Result<Vec<Segment<T>>> {
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::invalid(format!("segment duration must be > 0, got {duration_s}")));
    }
    let len = sample_count(duration_s, recording.fs);
    if len < 2 {
        return Err(Error::invalid(format!(
            "{duration_s} s at {} Hz gives {len} sample(s) per segment; need at least 2",
            recording.fs
        )));
    }
    let n = recording.n_samples();
    if len > n {
        log::warn!(
            "subject {}: {duration_s} s segments exceed the {:.3} s recording; no segments",
            recording.subject_id,
            recording.duration_s()
        );
        return Ok(Vec::new());
    }
    Ok((0..n / len)
        .map(|i| {
            let start = i * len;
            Segment {
                subject_id: recording.subject_id.clone(),
                condition: recording.condition.clone(),
                fs: recording.fs,
                duration_s,
                source_offset: start,
                data: recording
                    .data()
                    .iter()
                    .map(|c| c[start..start + len].to_vec())
                    .collect(),
            }
        })
        .collect())
}
