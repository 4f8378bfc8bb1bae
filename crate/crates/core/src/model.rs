//! One fit/predict contract over the three classifiers, plus versioned
//! JSON persistence with a bit-exact round trip.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::knn::{self, KnnConfig, KnnModel};
use crate::schema::{ColumnSchema, Label};
use crate::svm::{self, SvmConfig, SvmModel};
use crate::tree::{self, TreeConfig, TreeNode};

/// Which classifier to train, with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    Tree(TreeConfig),
    Knn(KnnConfig),
    Svm(SvmConfig),
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::Tree(_) => "dt",
            ModelConfig::Knn(_) => "knn",
            ModelConfig::Svm(_) => "svm",
        }
    }

    /// Distance-based models consume standardized inputs; the tree's
    /// threshold splits are scale-invariant and take raw values.
    pub fn wants_standardized_inputs(&self) -> bool {
        !matches!(self, ModelConfig::Tree(_))
    }
}

/// A fitted classifier, immutable after fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum TrainedModel {
    Tree {
        schema: ColumnSchema,
        config: TreeConfig,
        root: TreeNode,
    },
    Knn {
        schema: ColumnSchema,
        config: KnnConfig,
        model: KnnModel,
    },
    Svm {
        schema: ColumnSchema,
        config: SvmConfig,
        model: SvmModel,
    },
}

/// Trains the configured classifier on the given matrix.
pub fn fit(train: &FeatureMatrix, cfg: &ModelConfig) -> Result<TrainedModel> {
    let schema = train.schema().clone();
    Ok(match cfg {
        ModelConfig::Tree(c) => TrainedModel::Tree {
            schema,
            config: *c,
            root: tree::fit(train, c)?,
        },
        ModelConfig::Knn(c) => TrainedModel::Knn {
            schema,
            config: *c,
            model: knn::fit(train, c)?,
        },
        ModelConfig::Svm(c) => TrainedModel::Svm {
            schema,
            config: *c,
            model: svm::fit(train, c)?,
        },
    })
}

impl TrainedModel {
    pub fn schema(&self) -> &ColumnSchema {
        match self {
            TrainedModel::Tree { schema, .. }
            | TrainedModel::Knn { schema, .. }
            | TrainedModel::Svm { schema, .. } => schema,
        }
    }

    /// Predicts a label for every row. The row schema must equal the
    /// training schema.
    pub fn predict(&self, rows: &FeatureMatrix) -> Result<Vec<Label>> {
        if rows.schema() != self.schema() {
            return Err(Error::SchemaMismatch {
                expected: self.schema().summary(),
                found: rows.schema().summary(),
            });
        }
        let mut out = Vec::with_capacity(rows.n_rows());
        for r in 0..rows.n_rows() {
            let row = rows.row(r);
            out.push(match self {
                TrainedModel::Tree { root, .. } => root.route(row),
                TrainedModel::Knn { model, .. } => {
                    knn::vote(&model.rows, &model.labels, model.k, row)?
                }
                TrainedModel::Svm { model, .. } => model.classify(row)?,
            });
        }
        Ok(out)
    }
}

const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    model: TrainedModel,
}

/// Serializes a model as a versioned JSON document.
pub fn to_json(model: &TrainedModel) -> Result<String> {
    serde_json::to_string_pretty(&ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        model: model.clone(),
    })
    .map_err(|source| Error::ModelJson { source })
}

/// Parses a versioned JSON model document.
pub fn from_json(text: &str) -> Result<TrainedModel> {
    let file: ModelFile =
        serde_json::from_str(text).map_err(|source| Error::ModelJson { source })?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::ModelVersion {
            found: file.format_version,
            supported: MODEL_FORMAT_VERSION,
        });
    }
    Ok(file.model)
}

pub fn save(model: &TrainedModel, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(model)?).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load(path: &Path) -> Result<TrainedModel> {
    if !path.exists() {
        return Err(Error::MissingFile {
            path: path.to_path_buf(),
        });
    }
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json(&text)
}
