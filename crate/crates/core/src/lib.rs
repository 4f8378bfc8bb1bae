//! Schizophrenia-vs-control classification from ERP/EEG/demographic
//! features.
//!
//! The crate covers the full experiment pipeline:
//!
//! - [`schema`] / [`data`]: the canonical 50-column feature layout and CSV
//!   ingestion of the three input tables (ERP averages, EEG trial features,
//!   demographics) merged on the subject column.
//! - [`preprocess`]: train-side z-score standardization and equal-width
//!   discretization.
//! - [`entropy`](mod@entropy): Shannon entropy scoring and the highest-entropy-first
//!   feature ranking.
//! - [`tree`], [`knn`], [`svm`], [`model`]: three from-scratch binary
//!   classifiers behind one fit/predict contract with versioned JSON
//!   persistence.
//! - [`eval`]: trial- and subject-level splits, stratified k-fold, holdout,
//!   and accuracy reporting.
//! - [`ablation`]: leave-one-feature-out and entropy-incremental removal
//!   experiments.
//! - [`synth`]: a seeded Gaussian cohort generator with a closed-form
//!   optimal-accuracy oracle for end-to-end calibration.

pub mod ablation;
pub mod data;
pub mod entropy;
pub mod error;
pub mod eval;
pub mod knn;
pub mod model;
pub mod preprocess;
pub mod schema;
pub mod svm;
pub mod synth;
pub mod tree;

pub use ablation::{AblationMode, AblationRecord, AblationReport};
pub use data::{load_table, merge, parse_table, FeatureMatrix, RawTable};
pub use entropy::{column_entropy, entropy, rank_features, EntropyRanking, EntropyScore};
pub use error::{Error, Result};
pub use eval::{evaluate, split, EvalResult, SplitMode, SplitPolicy, SplitScheme};
pub use knn::{euclidean_distance, KChoice, KnnConfig};
pub use model::{fit, ModelConfig, TrainedModel};
pub use preprocess::{
    apply_standardizer, discretize_column, fit_standardizer, BinningConfig, StandardizerState,
};
pub use schema::{
    ColumnKind, ColumnSchema, DatasetGroup, Electrode, ErpComponent, Label, TableKind,
};
pub use svm::{rbf_kernel, GammaChoice, SvmConfig};
pub use synth::{
    bayes_accuracy, bayes_accuracy_for_separation, generate, SynthConfig, SynthTables,
};
pub use tree::{TreeConfig, TreeNode};
