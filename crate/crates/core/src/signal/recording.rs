use std::collections::{BTreeSet, HashSet};

use crate::{Error, Result, Scalar};

/// One subject/session multi-channel recording.
///
/// Samples are stored channel-major: `data[c][t]` is channel `c` at
/// sample `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording<T> {
    pub subject_id: String,
    pub condition: String,
    pub channels: Vec<String>,
    pub fs: f64,
    data: Vec<Vec<T>>,
}

impl<T: Scalar> Recording<T> {
    pub fn new(
        subject_id: impl Into<String>,
        condition: impl Into<String>,
        channels: Vec<String>,
        fs: f64,
        data: Vec<Vec<T>>,
    ) -> Result<Self> {
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(Error::invalid(format!("sampling rate must be > 0, got {fs}")));
        }
        if channels.is_empty() {
            return Err(Error::invalid("recording has no channels"));
        }
        if channels.len() != data.len() {
            return Err(Error::InconsistentChannels(format!(
                "{} channel names but {} data columns",
                channels.len(),
                data.len()
            )));
        }
        let mut seen = HashSet::new();
        for ch in &channels {
            if !seen.insert(ch.as_str()) {
                return Err(Error::invalid(format!("duplicate channel name {ch:?}")));
            }
        }
        let n = data[0].len();
        if n == 0 {
            return Err(Error::invalid("recording has no samples"));
        }
        if data.iter().any(|c| c.len() != n) {
            return Err(Error::InconsistentChannels(
                "channels have different lengths".into(),
            ));
        }
        Ok(Self {
            subject_id: subject_id.into(),
            condition: condition.into(),
            channels,
            fs,
            data,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.data[0].len()
    }

    pub fn n_channels(&self) -> usize {
        self.data.len()
    }

    pub fn channel(&self, c: usize) -> &[T] {
        &self.data[c]
    }

    pub fn data(&self) -> &[Vec<T>] {
        &self.data
    }

    pub fn duration_s(&self) -> f64 {
        self.n_samples() as f64 / self.fs
    }

    /// Applies `f` to every channel, keeping metadata. `f` must preserve length.
    pub fn map_channels<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&[T]) -> Result<Vec<T>>,
    {
        let data = self.data.iter().map(|c| f(c)).collect::<Result<Vec<_>>>()?;
        Self::new(
            self.subject_id.clone(),
            self.condition.clone(),
            self.channels.clone(),
            self.fs,
            data,
        )
    }

    pub fn cast<U: Scalar>(&self) -> Recording<U> {
        Recording {
            subject_id: self.subject_id.clone(),
            condition: self.condition.clone(),
            channels: self.channels.clone(),
            fs: self.fs,
            data: self
                .data
                .iter()
                .map(|c| c.iter().map(|&v| U::lit(v.as_f64())).collect())
                .collect(),
        }
    }
}

/// A set of recordings sharing one channel layout and sampling rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub name: String,
    recordings: Vec<Recording<T>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(name: impl Into<String>, recordings: Vec<Recording<T>>) -> Result<Self> {
        let Some(first) = recordings.first() else {
            return Err(Error::TooFewSubjects(0));
        };
        for r in &recordings[1..] {
            if r.channels != first.channels {
                return Err(Error::InconsistentChannels(format!(
                    "recording of subject {} has channels {:?}, expected {:?}",
                    r.subject_id, r.channels, first.channels
                )));
            }
            if r.fs != first.fs {
                return Err(Error::invalid(format!(
                    "recording of subject {} sampled at {} Hz, expected {} Hz",
                    r.subject_id, r.fs, first.fs
                )));
            }
        }
        let ds = Self {
            name: name.into(),
            recordings,
        };
        let n = ds.subjects().len();
        if n < 2 {
            return Err(Error::TooFewSubjects(n));
        }
        Ok(ds)
    }

    pub fn recordings(&self) -> &[Recording<T>] {
        &self.recordings
    }

    /// Distinct subject ids, sorted.
    pub fn subjects(&self) -> BTreeSet<&str> {
        self.recordings.iter().map(|r| r.subject_id.as_str()).collect()
    }

    /// Distinct condition tags, sorted.
    pub fn conditions(&self) -> BTreeSet<&str> {
        self.recordings.iter().map(|r| r.condition.as_str()).collect()
    }

    pub fn channels(&self) -> &[String] {
        &self.recordings[0].channels
    }

    pub fn fs(&self) -> f64 {
        self.recordings[0].fs
    }

    /// Restricts to one condition. Fails if fewer than 2 subjects remain.
    pub fn with_condition(&self, condition: &str) -> Result<Self> {
        let recs = self
            .recordings
            .iter()
            .filter(|r| r.condition == condition)
            .cloned()
            .collect();
        Self::new(format!("{}:{}", self.name, condition), recs)
    }
}
