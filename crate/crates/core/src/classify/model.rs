use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{train_gbt, train_knn, train_mlp, GbtModel, GbtParams, KnnModel, LabeledSet, Mlp, MlpConfig};
use crate::{Error, Result};

/// Version of the JSON layout written by [`save_model`].
pub const MODEL_SCHEMA_VERSION: u32 = 1;

const DEFAULT_K: usize = 5;

fn default_k() -> usize {
    DEFAULT_K
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Knn,
    Mlp,
    Gbt,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Knn => "knn",
            Self::Mlp => "mlp",
            Self::Gbt => "gbt",
        }
    }
}

/// A classifier and its hyperparameters, as written in run configs:
/// `{"kind": "knn", "k": 5}`, `{"kind": "mlp", "hidden_layers": [...]}`, ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassifierSpec {
    Knn {
        #[serde(default = "default_k")]
        k: usize,
    },
    Mlp(MlpConfig),
    Gbt(GbtParams),
}

impl ClassifierSpec {
    pub fn knn(k: usize) -> Self {
        Self::Knn { k }
    }

    /// KNN (k = 5), MLP and GBT with default hyperparameters.
    pub fn defaults() -> Vec<Self> {
        vec![
            Self::knn(DEFAULT_K),
            Self::Mlp(MlpConfig::default()),
            Self::Gbt(GbtParams::default()),
        ]
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            Self::Knn { .. } => ClassifierKind::Knn,
            Self::Mlp(_) => ClassifierKind::Mlp,
            Self::Gbt(_) => ClassifierKind::Gbt,
        }
    }

    /// Name used in result tables: the kind, plus `_k{k}` for KNN with a
    /// non-default `k`.
    pub fn label(&self) -> String {
        match self {
            Self::Knn { k } if *k != DEFAULT_K => format!("knn_k{k}"),
            other => other.kind().as_str().to_string(),
        }
    }

    /// Copy with the training seed replaced. KNN has no randomness.
    pub fn with_seed(&self, seed: u64) -> Self {
        match self {
            Self::Knn { k } => Self::Knn { k: *k },
            Self::Mlp(c) => Self::Mlp(MlpConfig { seed, ..c.clone() }),
            Self::Gbt(p) => Self::Gbt(GbtParams { seed, ..p.clone() }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Knn { k } if *k == 0 => Err(Error::Config("knn: k must be >= 1".into())),
            Self::Knn { .. } => Ok(()),
            Self::Mlp(c) => c.validate(),
            Self::Gbt(p) => p.validate(),
        }
    }

    pub fn train(&self, train: &LabeledSet) -> Result<TrainedModel> {
        Ok(match self {
            Self::Knn { k } => TrainedModel::Knn(train_knn(train, *k)?),
            Self::Mlp(c) => TrainedModel::Mlp(train_mlp(train, c)?),
            Self::Gbt(p) => TrainedModel::Gbt(train_gbt(train, p)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "lowercase")]
pub enum TrainedModel {
    Knn(KnnModel),
    Mlp(Mlp),
    Gbt(GbtModel),
}

impl TrainedModel {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            Self::Knn(_) => ClassifierKind::Knn,
            Self::Mlp(_) => ClassifierKind::Mlp,
            Self::Gbt(_) => ClassifierKind::Gbt,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Self::Knn(m) => m.dim,
            Self::Mlp(m) => m.input_dim(),
            Self::Gbt(m) => m.dim,
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            Self::Knn(m) => m.n_classes,
            Self::Mlp(m) => m.n_outputs(),
            Self::Gbt(m) => m.n_classes,
        }
    }

    pub fn predict_one(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        Ok(match self {
            Self::Knn(m) => m.predict_one(x),
            Self::Mlp(m) => m.predict_one(x),
            Self::Gbt(m) => m.predict_one(x),
        })
    }

    pub fn predict(&self, set: &LabeledSet) -> Result<Vec<usize>> {
        set.rows().map(|r| self.predict_one(r)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    model: TrainedModel,
}

/// Writes `{"schema_version": 1, "model": {"kind": ..., "parameters": ...}}`.
pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    let file = ModelFile {
        schema_version: MODEL_SCHEMA_VERSION,
        model: model.clone(),
    };
    let json = serde_json::to_vec(&file).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    crate::report::write_atomic(path, &json)
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let file: ModelFile = serde_json::from_slice(&bytes).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    if file.schema_version != MODEL_SCHEMA_VERSION {
        return Err(Error::invalid(format!(
            "model schema version {} is not supported (expected {MODEL_SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    Ok(file.model)
}
