//! Identification classifiers and the repeated hold-out protocol.

mod data;
mod eval;
mod gbt;
mod knn;
mod mlp;
mod model;

pub use data::{stratified_split, FeatureTable, FoldStats, LabeledSet};
pub use eval::{evaluate, model_seed, repeated_eval, repeated_eval_many, sample_std, split_seed, EvalReport, Protocol};
pub use gbt::{train_gbt, GbtModel, GbtParams, RegressionTree, TreeNode};
pub use knn::{train_knn, KnnModel};
pub use mlp::{mlp_gradient_check, train_from, train_mlp, Dense, Mlp, MlpConfig, MlpGradients};
pub use model::{load_model, save_model, ClassifierKind, ClassifierSpec, TrainedModel, MODEL_SCHEMA_VERSION};
