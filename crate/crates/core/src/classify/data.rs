use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::features::FeatureVector;
use crate::{Error, Result};

/// Dense labeled matrix, row-major, no missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    pub x: Vec<f64>,
    pub dim: usize,
    pub y: Vec<usize>,
    pub label_names: Vec<String>,
}

impl LabeledSet {
    pub fn new(x: Vec<f64>, dim: usize, y: Vec<usize>, label_names: Vec<String>) -> Result<Self> {
        if dim == 0 || x.len() != dim * y.len() {
            return Err(Error::invalid(format!(
                "matrix of {} values does not hold {} rows of dimension {dim}",
                x.len(),
                y.len()
            )));
        }
        if let Some(&bad) = y.iter().find(|&&c| c >= label_names.len()) {
            return Err(Error::invalid(format!(
                "label {bad} out of range for {} classes",
                label_names.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature matrix contains non-finite values"));
        }
        Ok(Self {
            x,
            dim,
            y,
            label_names,
        })
    }

    /// Builds a set with generated label names `"0", "1", ...`.
    pub fn from_rows(rows: &[Vec<f64>], y: Vec<usize>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("rows have different lengths"));
        }
        let n_classes = y.iter().max().map_or(0, |m| m + 1);
        Self::new(
            rows.concat(),
            dim,
            y,
            (0..n_classes).map(|c| c.to_string()).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.label_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.x.chunks_exact(self.dim)
    }
}

/// Raw feature vectors with subject labels, before imputation and scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub rows: Vec<Vec<Option<f64>>>,
    pub y: Vec<usize>,
    pub label_names: Vec<String>,
    pub dim: usize,
}

impl FeatureTable {
    /// Labels are subject ids in sorted order. Every subject needs at least
    /// two rows so both folds can hold it.
    pub fn from_vectors(vectors: &[FeatureVector<f64>]) -> Result<Self> {
        let dim = vectors.first().map_or(0, |v| v.values.len());
        if dim == 0 {
            return Err(Error::invalid("no feature vectors"));
        }
        if let Some(v) = vectors.iter().find(|v| v.values.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.values.len(),
            });
        }
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for v in vectors {
            *counts.entry(v.subject_id.as_str()).or_default() += 1;
        }
        if counts.len() < 2 {
            return Err(Error::TooFewSubjects(counts.len()));
        }
        if let Some((s, &c)) = counts.iter().find(|(_, &c)| c < 2) {
            return Err(Error::InsufficientSegments {
                subject: s.to_string(),
                count: c,
            });
        }
        let label_names: Vec<String> = counts.keys().map(|s| s.to_string()).collect();
        let index: BTreeMap<&str, usize> = label_names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        Ok(Self {
            rows: vectors.iter().map(|v| v.values.clone()).collect(),
            y: vectors.iter().map(|v| index[v.subject_id.as_str()]).collect(),
            label_names,
            dim,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.label_names.len()
    }

    /// Imputes and z-scores both folds with statistics from `train` only.
    pub fn prepare_fold(&self, train: &[usize], test: &[usize]) -> Result<(LabeledSet, LabeledSet, FoldStats)> {
        let stats = FoldStats::fit(self, train);
        let build = |idx: &[usize]| {
            let mut x = Vec::with_capacity(idx.len() * self.dim);
            for &i in idx {
                x.extend(stats.transform(&self.rows[i]));
            }
            LabeledSet::new(
                x,
                self.dim,
                idx.iter().map(|&i| self.y[i]).collect(),
                self.label_names.clone(),
            )
        };
        Ok((build(train)?, build(test)?, stats))
    }
}

/// Per-feature imputation value and z-score parameters of one training fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldStats {
    /// Training-fold mean of the observed values (0 when none observed).
    pub impute: Vec<f64>,
    pub mean: Vec<f64>,
    /// Population standard deviation; 1 where the feature is constant.
    pub std: Vec<f64>,
}

impl FoldStats {
    pub fn fit(table: &FeatureTable, train: &[usize]) -> Self {
        let d = table.dim;
        let mut sum = vec![0.0; d];
        let mut seen = vec![0usize; d];
        for &i in train {
            for (j, v) in table.rows[i].iter().enumerate() {
                if let Some(v) = v {
                    sum[j] += v;
                    seen[j] += 1;
                }
            }
        }
        let impute: Vec<f64> = sum
            .iter()
            .zip(&seen)
            .map(|(&s, &n)| if n > 0 { s / n as f64 } else { 0.0 })
            .collect();
        let n = train.len().max(1) as f64;
        let mut mean = vec![0.0; d];
        for &i in train {
            for (j, v) in table.rows[i].iter().enumerate() {
                mean[j] += v.unwrap_or(impute[j]);
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for &i in train {
            for (j, v) in table.rows[i].iter().enumerate() {
                let dv = v.unwrap_or(impute[j]) - mean[j];
                var[j] += dv * dv;
            }
        }
        let std = var
            .iter()
            .map(|&v| {
                let s = (v / n).sqrt();
                if s > 0.0 && s.is_finite() {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Self { impute, mean, std }
    }

    pub fn transform<'a>(&'a self, row: &'a [Option<f64>]) -> impl Iterator<Item = f64> + 'a {
        row.iter()
            .enumerate()
            .map(move |(j, v)| (v.unwrap_or(self.impute[j]) - self.mean[j]) / self.std[j])
    }
}

/// Per-class shuffled hold-out: `round(n * test_fraction)` rows of each
/// class (clamped to `1..n`) go to the test fold. Returns sorted
/// `(train, test)` index lists.
pub fn stratified_split(
    y: &[usize],
    n_classes: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "test fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    let mut by_class = vec![Vec::new(); n_classes];
    for (i, &c) in y.iter().enumerate() {
        by_class[c].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (c, mut idx) in by_class.into_iter().enumerate() {
        let n = idx.len();
        if n < 2 {
            return Err(Error::InsufficientSegments {
                subject: c.to_string(),
                count: n,
            });
        }
        idx.shuffle(&mut rng);
        let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}
