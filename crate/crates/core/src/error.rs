//! Error type shared by every module in the crate.

use std::path::PathBuf;

use thiserror::Error;

use crate::schema::{DatasetGroup, TableKind};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // --- ingestion ---
    #[error("input file not found: {path}")]
    MissingFile { path: PathBuf },

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{table} table has no header row")]
    MissingHeader { table: TableKind },

    #[error("{table} table header mismatch: missing {missing:?}, unexpected {unexpected:?}")]
    HeaderMismatch {
        table: TableKind,
        missing: Vec<String>,
        unexpected: Vec<String>,
    },

    #[error("{table} table row {row}, column '{column}': expected a finite number, got '{value}'")]
    NonNumericCell {
        table: TableKind,
        row: usize,
        column: String,
        value: String,
    },

    #[error("{table} table row {row}: invalid group label '{value}' (expected SZ or HC)")]
    InvalidGroup {
        table: TableKind,
        row: usize,
        value: String,
    },

    #[error("subject '{subject}' has no demographics row")]
    UnknownSubject { subject: String },

    #[error("subject '{subject}' appears more than once in the demographics table")]
    DuplicateDemographics { subject: String },

    #[error("subject '{subject}' has conflicting group labels across input tables")]
    GroupMismatch { subject: String },

    #[error(
        "subject '{subject}' has {erp_rows} ERP row(s) and {eeg_rows} EEG row(s); \
         rows must pair one-to-one or one side must have a single row per subject"
    )]
    MismatchedObservations {
        subject: String,
        erp_rows: usize,
        eeg_rows: usize,
    },

    // --- matrix operations ---
    #[error("dataset group {group:?} selects no columns from this schema")]
    EmptySelection { group: DatasetGroup },

    #[error("unknown column '{name}'")]
    UnknownColumn { name: String },

    #[error("schema mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: String, found: String },

    #[error("non-finite value at row {row}, column '{column}'")]
    NonFiniteValue { row: usize, column: String },

    // --- preprocessing / entropy ---
    #[error("operation requires at least {needed} row(s), got {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error("invalid probability distribution: {reason}")]
    InvalidDistribution { reason: String },

    // --- classifiers ---
    #[error("feature vectors have different lengths: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("k = {k} exceeds the training-set size {n_train}")]
    KTooLarge { k: usize, n_train: usize },

    #[error("training set contains a single class; both SZ and HC are required")]
    SingleClassTraining,

    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },

    // --- evaluation ---
    #[error("cannot split: all rows belong to a single class")]
    SingleClass,

    #[error("infeasible stratification: {reason}")]
    InfeasibleStratification { reason: String },

    // --- model persistence ---
    #[error("unsupported model file version {found} (this build reads version {supported})")]
    ModelVersion { found: u32, supported: u32 },

    #[error("model (de)serialization failed: {source}")]
    ModelJson {
        #[source]
        source: serde_json::Error,
    },
}
