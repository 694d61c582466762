use serde::{Deserialize, Serialize};

use super::LabeledSet;
use crate::{Error, Result};

/// Stores the standardized training matrix; predicts by majority vote of
/// the `k` Euclidean-nearest training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub dim: usize,
    pub n_classes: usize,
    pub x: Vec<f64>,
    pub y: Vec<usize>,
}

pub fn train_knn(train: &LabeledSet, k: usize) -> Result<KnnModel> {
    if k == 0 || k > train.len() {
        return Err(Error::invalid(format!(
            "k = {k} must be in 1..={} (training rows)",
            train.len()
        )));
    }
    Ok(KnnModel {
        k,
        dim: train.dim,
        n_classes: train.n_classes(),
        x: train.x.clone(),
        y: train.y.clone(),
    })
}

impl KnnModel {
    /// Indices and squared distances of the `k` nearest rows, ordered by
    /// `(distance, index)`.
    pub fn neighbors(&self, query: &[f64]) -> Vec<(f64, usize)> {
        let mut d: Vec<(f64, usize)> = self
            .x
            .chunks_exact(self.dim)
            .enumerate()
            .map(|(i, row)| {
                let sq: f64 = row.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
                (sq, i)
            })
            .collect();
        let by_key = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < d.len() {
            d.select_nth_unstable_by(self.k - 1, by_key);
            d.truncate(self.k);
        }
        d.sort_unstable_by(by_key);
        d
    }

    /// Majority vote; ties go to the class with the smallest mean neighbor
    /// distance, then to the lowest class index.
    pub fn predict_one(&self, query: &[f64]) -> usize {
        let mut votes = vec![0usize; self.n_classes];
        let mut dist_sum = vec![0.0f64; self.n_classes];
        for (sq, i) in self.neighbors(query) {
            votes[self.y[i]] += 1;
            dist_sum[self.y[i]] += sq.sqrt();
        }
        let mut best = 0;
        for c in 1..self.n_classes {
            let better = votes[c] > votes[best]
                || (votes[c] == votes[best]
                    && votes[c] > 0
                    && dist_sum[c] / (votes[c] as f64) < dist_sum[best] / (votes[best] as f64));
            if better {
                best = c;
            }
        }
        best
    }
}
