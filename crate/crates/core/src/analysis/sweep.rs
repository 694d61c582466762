//! Duration sweep: filter, segment, extract features, evaluate.

use serde::{Deserialize, Serialize};

use super::AccuracyCurve;
use crate::classify::{repeated_eval_many, ClassifierSpec, FeatureTable, Protocol};
use crate::features::{extract_vectors, FeatureParams, FeatureVector};
use crate::seed::derive_seed;
use crate::signal::{
    bandpass_filter, default_duration_grid, segment_recording, Dataset, MAX_GRID_DURATION_S, MIN_GRID_DURATION_S,
};
use crate::{Error, Result};

/// Sanity bounds for grid durations, in seconds.
pub const GRID_BOUNDS_S: (f64, f64) = (0.05, 60.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Preprocess {
    pub enabled: bool,
    pub low_hz: f64,
    pub high_hz: f64,
}

impl Default for Preprocess {
    fn default() -> Self {
        Self {
            enabled: true,
            low_hz: 3.0,
            high_hz: 40.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionMode {
    /// All conditions in one identification problem.
    #[default]
    Pooled,
    /// One sweep per condition.
    PerCondition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub grid: Vec<f64>,
    pub preprocess: Preprocess,
    pub features: FeatureParams,
    pub classifiers: Vec<ClassifierSpec>,
    pub protocol: Protocol,
    pub condition_mode: ConditionMode,
    pub master_seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            grid: default_duration_grid(),
            preprocess: Preprocess::default(),
            features: FeatureParams::default(),
            classifiers: ClassifierSpec::defaults(),
            protocol: Protocol::default(),
            condition_mode: ConditionMode::Pooled,
            master_seed: 0,
        }
    }
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("duration grid is empty".into()));
    }
    let (lo, hi) = GRID_BOUNDS_S;
    if let Some(d) = grid.iter().find(|&&d| !(d >= lo && d <= hi)) {
        return Err(Error::Config(format!("grid duration {d} s outside [{lo}, {hi}] s")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("duration grid must be strictly increasing".into()));
    }
    if grid[0] < MIN_GRID_DURATION_S || grid[grid.len() - 1] > MAX_GRID_DURATION_S {
        log::debug!("grid extends beyond the usual {MIN_GRID_DURATION_S}-{MAX_GRID_DURATION_S} s range");
    }
    Ok(())
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        validate_grid(&self.grid)?;
        self.features.validate()?;
        self.protocol.validate()?;
        if self.classifiers.is_empty() {
            return Err(Error::Config("no classifiers configured".into()));
        }
        let mut labels = std::collections::BTreeSet::new();
        for spec in &self.classifiers {
            spec.validate()?;
            if !labels.insert(spec.label()) {
                return Err(Error::Config(format!("classifier {} listed twice", spec.label())));
            }
        }
        let p = &self.preprocess;
        if p.enabled && !(p.low_hz > 0.0 && p.low_hz < p.high_hz) {
            return Err(Error::Config(format!(
                "preprocess: need 0 < low_hz < high_hz, got {} and {}",
                p.low_hz, p.high_hz
            )));
        }
        Ok(())
    }
}

/// Band-pass filters every channel of every recording.
pub fn preprocess_dataset(dataset: &Dataset<f64>, p: &Preprocess) -> Result<Dataset<f64>> {
    if !p.enabled {
        return Ok(dataset.clone());
    }
    let fs = dataset.fs();
    let recordings = dataset
        .recordings()
        .iter()
        .map(|r| r.map_channels(|c| bandpass_filter(c, fs, p.low_hz, p.high_hz)))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(dataset.name.clone(), recordings)
}

/// Identification problems to sweep, per the condition mode.
fn partitions(dataset: &Dataset<f64>, mode: ConditionMode) -> Result<Vec<Dataset<f64>>> {
    match mode {
        ConditionMode::Pooled => Ok(vec![dataset.clone()]),
        ConditionMode::PerCondition => dataset
            .conditions()
            .into_iter()
            .map(|c| dataset.with_condition(c))
            .collect(),
    }
}

/// Features of every segment of `dataset` at `duration_s`, in recording
/// then time order.
pub fn segment_features(dataset: &Dataset<f64>, duration_s: f64, params: &FeatureParams) -> Result<Vec<FeatureVector<f64>>> {
    let mut segments = Vec::new();
    for rec in dataset.recordings() {
        segments.extend(segment_recording(rec, duration_s)?);
    }
    Ok(extract_vectors(&segments, params))
}

/// [`run_sweep_with`] without a feature hook.
pub fn run_sweep(dataset: &Dataset<f64>, config: &SweepConfig) -> Result<Vec<AccuracyCurve<f64>>> {
    run_sweep_with(dataset, config, |_, _, _| Ok(()))
}

/// Runs every classifier at every grid duration and returns one curve per
/// (partition, classifier), partitions in condition order and classifiers
/// in config order.
///
/// A duration is left out of the curves, with a warning, when it yields no
/// segments or some subject ends up with fewer than two. `on_features`
/// sees each partition name, duration and feature set before evaluation.
pub fn run_sweep_with<F>(dataset: &Dataset<f64>, config: &SweepConfig, mut on_features: F) -> Result<Vec<AccuracyCurve<f64>>>
where
    F: FnMut(&str, f64, &[FeatureVector<f64>]) -> Result<()>,
{
    config.validate()?;
    let filtered = preprocess_dataset(dataset, &config.preprocess)?;
    let mut curves = Vec::new();
    for part in partitions(&filtered, config.condition_mode)? {
        let n = config.classifiers.len();
        let mut durations = Vec::new();
        let mut reports = vec![Vec::new(); n];
        for (di, &duration) in config.grid.iter().enumerate() {
            let vectors = segment_features(&part, duration, &config.features)?;
            if vectors.is_empty() {
                log::warn!("{}: no {duration} s segments; duration dropped", part.name);
                continue;
            }
            on_features(&part.name, duration, &vectors)?;
            let table = match FeatureTable::from_vectors(&vectors) {
                Ok(t) => t,
                Err(e @ Error::InsufficientSegments { .. }) => {
                    log::warn!("{}: {duration} s: {e}; duration dropped", part.name);
                    continue;
                }
                Err(e) => return Err(e),
            };
            let seed = derive_seed(config.master_seed, &[di as u64]);
            log::info!(
                "{}: {duration} s, {} segments x {} features",
                part.name,
                vectors.len(),
                table.dim
            );
            let evals = repeated_eval_many(&table, &config.classifiers, &config.protocol, seed)?;
            durations.push(duration);
            for (acc, r) in reports.iter_mut().zip(evals) {
                acc.push(r);
            }
        }
        for (spec, reps) in config.classifiers.iter().zip(reports) {
            curves.push(AccuracyCurve::new(
                part.name.clone(),
                spec.label(),
                durations.clone(),
                reps.iter().map(|r| r.accuracy_mean).collect(),
                reps.iter().map(|r| r.accuracy_std).collect(),
                reps.into_iter().map(|r| r.per_repeat).collect(),
            )?);
        }
    }
    Ok(curves)
}
