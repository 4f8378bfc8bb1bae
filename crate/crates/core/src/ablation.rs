//! The two feature-importance experiments.
//!
//! Leave-one-out drops each feature alone, restores it, and records the
//! accuracy of every reduced run. Entropy-incremental ranks features once
//! on the full matrix, then removes them cumulatively in descending-entropy
//! order until one remains. Both experiments reuse one set of folds derived
//! from the policy seed, so accuracy differences are attributable to the
//! removed features alone.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::entropy::rank_features;
use crate::error::{Error, Result};
use crate::eval::{evaluate_folds, split, EvalResult, SplitPolicy};
use crate::model::ModelConfig;
use crate::preprocess::BinningConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AblationMode {
    LeaveOneOut,
    EntropyIncremental,
}

impl AblationMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            AblationMode::LeaveOneOut => "leave-one-out",
            AblationMode::EntropyIncremental => "entropy-incremental",
        }
    }
}

/// One evaluated removal step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRecord {
    pub step: usize,
    /// Feature(s) newly removed at this step.
    pub removed: Vec<String>,
    pub remaining_count: usize,
    pub accuracy: f64,
}

/// Ordered removal records plus the full-matrix baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub mode: AblationMode,
    pub baseline_accuracy: f64,
    pub records: Vec<AblationRecord>,
    pub model: ModelConfig,
    pub policy: SplitPolicy,
    pub standardized: bool,
}

impl AblationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("AblationReport is always serializable")
    }

    /// CSV with header `step,removed,remaining_count,accuracy`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,removed,remaining_count,accuracy\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.step,
                r.removed.join(";"),
                r.remaining_count,
                r.accuracy
            ));
        }
        out
    }

    /// (x, y) pairs for plotting the accuracy trajectory; step 0 is the
    /// baseline on the full matrix.
    pub fn to_plot_data(&self) -> String {
        let mut out = String::from("x,y\n");
        out.push_str(&format!("0,{}\n", self.baseline_accuracy));
        for r in &self.records {
            out.push_str(&format!("{},{}\n", r.step, r.accuracy));
        }
        out
    }
}

/// Evaluates with each single feature removed in schema order.
pub fn run_leave_one_out(
    m: &FeatureMatrix,
    model_cfg: &ModelConfig,
    policy: &SplitPolicy,
    standardize: bool,
) -> Result<AblationReport> {
    ensure_enough_features(m)?;
    let folds = split(m, policy)?;
    let baseline = evaluate_folds(m, model_cfg, &folds, standardize, policy)?;

    let names: Vec<String> = m.schema().names().map(str::to_string).collect();
    let mut records = Vec::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        let dropped: HashSet<String> = [name.clone()].into();
        let reduced = m.drop_columns(&dropped)?;
        let result = evaluate_folds(&reduced, model_cfg, &folds, standardize, policy)?;
        records.push(AblationRecord {
            step: i + 1,
            removed: vec![name.clone()],
            remaining_count: names.len() - 1,
            accuracy: result.accuracy,
        });
    }

    Ok(AblationReport {
        mode: AblationMode::LeaveOneOut,
        baseline_accuracy: baseline.accuracy,
        records,
        model: *model_cfg,
        policy: *policy,
        standardized: standardize,
    })
}

/// Removes features cumulatively in descending-entropy order, evaluating
/// after each removal, until a single feature remains.
pub fn run_entropy_incremental(
    m: &FeatureMatrix,
    model_cfg: &ModelConfig,
    policy: &SplitPolicy,
    standardize: bool,
    bins: &BinningConfig,
) -> Result<AblationReport> {
    ensure_enough_features(m)?;
    let folds = split(m, policy)?;
    let baseline = evaluate_folds(m, model_cfg, &folds, standardize, policy)?;

    let ranking = rank_features(m, bins)?;
    let order: Vec<String> = ranking.column_order().map(str::to_string).collect();
    let total = order.len();

    let mut removed_so_far: HashSet<String> = HashSet::new();
    let mut records = Vec::with_capacity(total - 1);
    for (i, name) in order.iter().take(total - 1).enumerate() {
        removed_so_far.insert(name.clone());
        let reduced = m.drop_columns(&removed_so_far)?;
        let result = evaluate_folds(&reduced, model_cfg, &folds, standardize, policy)?;
        records.push(AblationRecord {
            step: i + 1,
            removed: vec![name.clone()],
            remaining_count: total - (i + 1),
            accuracy: result.accuracy,
        });
    }

    Ok(AblationReport {
        mode: AblationMode::EntropyIncremental,
        baseline_accuracy: baseline.accuracy,
        records,
        model: *model_cfg,
        policy: *policy,
        standardized: standardize,
    })
}

fn ensure_enough_features(m: &FeatureMatrix) -> Result<()> {
    if m.n_cols() < 2 {
        return Err(Error::InvalidConfig {
            reason: format!(
                "ablation needs at least 2 feature columns, got {}",
                m.n_cols()
            ),
        });
    }
    Ok(())
}

/// Re-evaluates one record's reduced matrix from scratch; used to audit
/// that reports are reproducible by independent `evaluate` calls.
pub fn reevaluate_record(
    m: &FeatureMatrix,
    removed: &HashSet<String>,
    model_cfg: &ModelConfig,
    policy: &SplitPolicy,
    standardize: bool,
) -> Result<EvalResult> {
    let reduced = m.drop_columns(removed)?;
    crate::eval::evaluate(&reduced, model_cfg, policy, standardize)
}
