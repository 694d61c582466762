//! One-vs-rest gradient-boosted regression trees on logistic loss.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::LabeledSet;
use crate::seed::derive_seed;
use crate::{Error, Result};

/// Splits must reduce the residual sum of squares by more than this.
const MIN_GAIN: f64 = 1e-12;
/// Keeps Newton leaf values finite when every hessian term vanishes.
const HESSIAN_RIDGE: f64 = 1e-12;
const PRIOR_CLIP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbtParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    /// Fraction of training rows drawn without replacement for each tree.
    pub subsample: f64,
    pub min_samples_leaf: usize,
    pub seed: u64,
}

impl Default for GbtParams {
    fn default() -> Self {
        Self {
            n_trees: 200,
            max_depth: 3,
            learning_rate: 0.1,
            subsample: 1.0,
            min_samples_leaf: 1,
            seed: 0,
        }
    }
}

impl GbtParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("gbt: {m}")));
        if self.n_trees == 0 || self.max_depth == 0 {
            return bad("n_trees and max_depth must be >= 1");
        }
        if !(self.learning_rate > 0.0) {
            return bad("learning_rate must be > 0");
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return bad("subsample must be in (0, 1]");
        }
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TreeNode {
    Leaf {
        value: f64,
    },
    /// Rows with `x[feature] < threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Binary regression tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<TreeNode>,
}

impl RegressionTree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut k = 0;
        loop {
            match self.nodes[k] {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => k = if x[feature] < threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], k: usize) -> usize {
            match nodes[k] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub dim: usize,
    pub n_classes: usize,
    pub learning_rate: f64,
    /// Per-class prior log-odds.
    pub init: Vec<f64>,
    /// `trees[c]` boosts the score of class `c`.
    pub trees: Vec<Vec<RegressionTree>>,
}

impl GbtModel {
    /// Raw one-vs-rest scores (log-odds) per class.
    pub fn decision_function(&self, x: &[f64]) -> Vec<f64> {
        self.init
            .iter()
            .zip(&self.trees)
            .map(|(&f0, trees)| f0 + self.learning_rate * trees.iter().map(|t| t.predict(x)).sum::<f64>())
            .collect()
    }

    pub fn predict_one(&self, x: &[f64]) -> usize {
        super::mlp::argmax(&self.decision_function(x))
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Row order of every feature column, ties by row index.
struct Presorted {
    order: Vec<Vec<u32>>,
}

impl Presorted {
    fn new(set: &LabeledSet) -> Self {
        let n = set.len();
        let order = (0..set.dim)
            .map(|f| {
                let mut idx: Vec<u32> = (0..n as u32).collect();
                idx.sort_by(|&a, &b| {
                    let va = set.x[a as usize * set.dim + f];
                    let vb = set.x[b as usize * set.dim + f];
                    va.total_cmp(&vb).then(a.cmp(&b))
                });
                idx
            })
            .collect();
        Self { order }
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

struct FrontierNode {
    id: usize,
    sum_r: f64,
    sum_h: f64,
    count: usize,
}

/// Grows one tree level by level. `active[i]` marks rows in the subsample.
/// Each level scans every presorted column once.
fn grow_tree(
    set: &LabeledSet,
    sorted: &Presorted,
    residual: &[f64],
    hessian: &[f64],
    active: &[bool],
    params: &GbtParams,
) -> RegressionTree {
    let n = set.len();
    let mut nodes = vec![TreeNode::Leaf { value: 0.0 }];
    // position in the current frontier, usize::MAX when the row is settled
    let mut slot = vec![usize::MAX; n];
    let mut root = FrontierNode {
        id: 0,
        sum_r: 0.0,
        sum_h: 0.0,
        count: 0,
    };
    for i in (0..n).filter(|&i| active[i]) {
        slot[i] = 0;
        root.sum_r += residual[i];
        root.sum_h += hessian[i];
        root.count += 1;
    }
    let mut frontier = vec![root];
    let leaf_value = |node: &FrontierNode| node.sum_r / (node.sum_h + HESSIAN_RIDGE);
    let min_leaf = params.min_samples_leaf;

    for _depth in 0..params.max_depth {
        let k = frontier.len();
        let mut best: Vec<Option<Candidate>> = vec![None; k];
        let mut left_sum = vec![0.0; k];
        let mut left_n = vec![0usize; k];
        let mut last = vec![f64::NAN; k];
        for (f, column) in sorted.order.iter().enumerate() {
            left_sum.fill(0.0);
            left_n.fill(0);
            for &row in column {
                let i = row as usize;
                let s = slot[i];
                if s == usize::MAX {
                    continue;
                }
                let v = set.x[i * set.dim + f];
                let node = &frontier[s];
                let nl = left_n[s];
                if nl >= min_leaf && node.count - nl >= min_leaf && v > last[s] {
                    let sl = left_sum[s];
                    let sr = node.sum_r - sl;
                    let nr = node.count - nl;
                    let gain = sl * sl / nl as f64 + sr * sr / nr as f64
                        - node.sum_r * node.sum_r / node.count as f64;
                    if best[s].is_none_or(|b| gain > b.gain) {
                        let mut threshold = 0.5 * (last[s] + v);
                        if threshold <= last[s] {
                            threshold = v;
                        }
                        best[s] = Some(Candidate {
                            gain,
                            feature: f,
                            threshold,
                        });
                    }
                }
                left_sum[s] += residual[i];
                left_n[s] += 1;
                last[s] = v;
            }
        }

        let mut next = Vec::new();
        // frontier slot -> (left slot, right slot) in `next`
        let mut children = vec![None; k];
        for (s, node) in frontier.iter().enumerate() {
            match best[s] {
                Some(c) if c.gain > MIN_GAIN => {
                    let left = nodes.len();
                    nodes.push(TreeNode::Leaf { value: 0.0 });
                    nodes.push(TreeNode::Leaf { value: 0.0 });
                    nodes[node.id] = TreeNode::Split {
                        feature: c.feature,
                        threshold: c.threshold,
                        left,
                        right: left + 1,
                    };
                    children[s] = Some((next.len(), c));
                    for id in [left, left + 1] {
                        next.push(FrontierNode {
                            id,
                            sum_r: 0.0,
                            sum_h: 0.0,
                            count: 0,
                        });
                    }
                }
                _ => {
                    nodes[node.id] = TreeNode::Leaf {
                        value: leaf_value(node),
                    }
                }
            }
        }
        for i in 0..n {
            let s = slot[i];
            if s == usize::MAX {
                continue;
            }
            slot[i] = match children[s] {
                Some((base, c)) => {
                    let t = if set.x[i * set.dim + c.feature] < c.threshold {
                        base
                    } else {
                        base + 1
                    };
                    let child = &mut next[t];
                    child.sum_r += residual[i];
                    child.sum_h += hessian[i];
                    child.count += 1;
                    t
                }
                None => usize::MAX,
            };
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    for node in &frontier {
        nodes[node.id] = TreeNode::Leaf {
            value: leaf_value(node),
        };
    }
    RegressionTree { nodes }
}

pub fn train_gbt(train: &LabeledSet, params: &GbtParams) -> Result<GbtModel> {
    params.validate()?;
    let n = train.len();
    let n_classes = train.n_classes();
    let mut present = vec![0usize; n_classes];
    for &c in &train.y {
        present[c] += 1;
    }
    if present.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::invalid("gradient boosting needs at least two classes in the training set"));
    }
    let sorted = Presorted::new(train);
    let n_sample = ((n as f64 * params.subsample).round() as usize).clamp(1, n);
    let mut residual = vec![0.0; n];
    let mut hessian = vec![0.0; n];
    let mut active = vec![true; n];
    let mut init = Vec::with_capacity(n_classes);
    let mut all_trees = Vec::with_capacity(n_classes);

    for c in 0..n_classes {
        let prior = (present[c] as f64 / n as f64).clamp(PRIOR_CLIP, 1.0 - PRIOR_CLIP);
        let f0 = (prior / (1.0 - prior)).ln();
        let mut score = vec![f0; n];
        let mut trees = Vec::with_capacity(params.n_trees);
        for t in 0..params.n_trees {
            for i in 0..n {
                let p = sigmoid(score[i]);
                let y = if train.y[i] == c { 1.0 } else { 0.0 };
                residual[i] = y - p;
                hessian[i] = p * (1.0 - p);
            }
            if n_sample < n {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, &[c as u64, t as u64]));
                let mut idx: Vec<usize> = (0..n).collect();
                idx.shuffle(&mut rng);
                active.fill(false);
                idx[..n_sample].iter().for_each(|&i| active[i] = true);
            }
            let tree = grow_tree(train, &sorted, &residual, &hessian, &active, params);
            for (i, s) in score.iter_mut().enumerate() {
                *s += params.learning_rate * tree.predict(train.row(i));
            }
            trees.push(tree);
        }
        init.push(f0);
        all_trees.push(trees);
    }
    Ok(GbtModel {
        dim: train.dim,
        n_classes,
        learning_rate: params.learning_rate,
        init,
        trees: all_trees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn accuracy(m: &GbtModel, set: &LabeledSet) -> f64 {
        let hits = (0..set.len()).filter(|&i| m.predict_one(set.row(i)) == set.y[i]).count();
        hits as f64 / set.len() as f64
    }

    #[test]
    fn one_stump_splits_at_zero() {
        let rows: Vec<Vec<f64>> = [-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0].iter().map(|&v| vec![v]).collect();
        let y = vec![0, 0, 0, 0, 1, 1, 1, 1];
        let set = LabeledSet::from_rows(&rows, y).unwrap();
        let params = GbtParams {
            n_trees: 1,
            max_depth: 1,
            ..GbtParams::default()
        };
        let m = train_gbt(&set, &params).unwrap();
        assert_eq!(accuracy(&m, &set), 1.0);
        match m.trees[0][0].nodes[0] {
            TreeNode::Split { threshold, .. } => assert_eq!(threshold, 0.0),
            _ => panic!("expected a split"),
        }
    }

    #[test]
    fn xor_with_depth_two() {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..40 {
            let a = (i % 2) as f64 + 0.01 * i as f64;
            let b = ((i / 2) % 2) as f64 - 0.005 * i as f64;
            rows.push(vec![a, b]);
            y.push(((i % 2) ^ ((i / 2) % 2)) as usize);
        }
        let set = LabeledSet::from_rows(&rows, y).unwrap();
        let params = GbtParams {
            n_trees: 50,
            max_depth: 2,
            ..GbtParams::default()
        };
        assert_eq!(accuracy(&train_gbt(&set, &params).unwrap(), &set), 1.0);
    }

    #[test]
    fn single_class_is_rejected() {
        let set = LabeledSet::new(vec![1.0, 2.0], 1, vec![0, 0], vec!["a".into(), "b".into()]).unwrap();
        assert!(train_gbt(&set, &GbtParams::default()).is_err());
    }

    #[test]
    fn subsampling_is_seeded() {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![(i * 7 % 11) as f64, (i % 4) as f64]).collect();
        let set = LabeledSet::from_rows(&rows, (0..30).map(|i| i % 3).collect()).unwrap();
        let params = GbtParams {
            n_trees: 10,
            subsample: 0.6,
            seed: 4,
            ..GbtParams::default()
        };
        assert_eq!(train_gbt(&set, &params).unwrap(), train_gbt(&set, &params).unwrap());
        let other = GbtParams { seed: 5, ..params.clone() };
        assert_ne!(train_gbt(&set, &params).unwrap(), train_gbt(&set, &other).unwrap());
    }

    #[test]
    fn depth_is_bounded() {
        let rows: Vec<Vec<f64>> = (0..64).map(|i| vec![i as f64]).collect();
        let set = LabeledSet::from_rows(&rows, (0..64).map(|i| (i / 3) % 2).collect()).unwrap();
        let m = train_gbt(&set, &GbtParams { n_trees: 5, ..GbtParams::default() }).unwrap();
        assert!(m.trees.iter().flatten().all(|t| t.depth() <= 3));
    }
}
