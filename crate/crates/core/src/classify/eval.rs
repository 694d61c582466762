use serde::{Deserialize, Serialize};

use super::{stratified_split, ClassifierSpec, FeatureTable, LabeledSet, TrainedModel};
use crate::seed::derive_seed;
use crate::{Error, Result};

/// Repeated stratified hold-out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Protocol {
    pub repeats: usize,
    /// Fraction of each subject's segments held out for testing.
    pub test_fraction: f64,
}

impl Default for Protocol {
    fn default() -> Self {
        Self {
            repeats: 3,
            test_fraction: 0.3,
        }
    }
}

impl Protocol {
    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::Config("protocol: repeats must be >= 1".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config("protocol: test_fraction must be in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy_mean: f64,
    /// Sample standard deviation (n - 1) across repeats; 0 for one repeat.
    pub accuracy_std: f64,
    pub per_repeat: Vec<f64>,
}

impl EvalReport {
    pub fn from_accuracies(per_repeat: Vec<f64>) -> Self {
        let accuracy_mean = per_repeat.iter().sum::<f64>() / per_repeat.len() as f64;
        Self {
            accuracy_mean,
            accuracy_std: sample_std(&per_repeat),
            per_repeat,
        }
    }
}

/// Standard deviation with the `n - 1` denominator; 0 when `n < 2`.
pub fn sample_std(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Fraction of correct top-1 predictions.
pub fn evaluate(model: &TrainedModel, test: &LabeledSet) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::invalid("empty test set"));
    }
    if test.dim != model.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            got: test.dim,
        });
    }
    let predictions = model.predict(test)?;
    let hits = predictions.iter().zip(&test.y).filter(|(p, y)| p == y).count();
    Ok(hits as f64 / test.len() as f64)
}

/// Seed of the split in `repeat`, shared by every classifier.
pub fn split_seed(seed: u64, repeat: usize) -> u64 {
    derive_seed(seed, &[repeat as u64, 0])
}

/// Training seed of one classifier in `repeat`.
pub fn model_seed(seed: u64, repeat: usize, spec: &ClassifierSpec) -> u64 {
    derive_seed(seed, &[repeat as u64, 1, spec.kind() as u64])
}

/// Re-splits, re-imputes, re-standardizes, retrains and scores `spec`
/// once per repeat.
pub fn repeated_eval(table: &FeatureTable, spec: &ClassifierSpec, protocol: &Protocol, seed: u64) -> Result<EvalReport> {
    let mut reports = repeated_eval_many(table, std::slice::from_ref(spec), protocol, seed)?;
    Ok(reports.remove(0))
}

/// [`repeated_eval`] for several classifiers sharing each repeat's split
/// and fold preprocessing. Reports come back in `specs` order.
pub fn repeated_eval_many(
    table: &FeatureTable,
    specs: &[ClassifierSpec],
    protocol: &Protocol,
    seed: u64,
) -> Result<Vec<EvalReport>> {
    protocol.validate()?;
    let mut accs = vec![Vec::with_capacity(protocol.repeats); specs.len()];
    for repeat in 0..protocol.repeats {
        let (train_idx, test_idx) = stratified_split(
            &table.y,
            table.n_classes(),
            protocol.test_fraction,
            split_seed(seed, repeat),
        )?;
        let (train, test, _) = table.prepare_fold(&train_idx, &test_idx)?;
        for (spec, acc) in specs.iter().zip(accs.iter_mut()) {
            let model = spec.with_seed(model_seed(seed, repeat, spec)).train(&train)?;
            acc.push(evaluate(&model, &test)?);
        }
    }
    Ok(accs.into_iter().map(EvalReport::from_accuracies).collect())
}
