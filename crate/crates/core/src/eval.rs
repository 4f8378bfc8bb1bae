//! Split protocols, cross-validation, and accuracy.
//!
//! Splits operate on rows (trial level) or on whole subjects (subject
//! level, so no participant appears on both sides of a partition). All
//! shuffling flows from the policy seed. Per fold, preprocessing is fit on
//! the training side only, then the model is fit and scored on the held-out
//! side.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::model::{self, ModelConfig};
use crate::preprocess::{apply_standardizer, fit_standardizer};
use crate::schema::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    /// Rows split independently; one subject's rows may land on both sides.
    TrialLevel,
    /// All rows of a subject stay on one side.
    SubjectLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitScheme {
    Holdout { test_fraction: f64 },
    KFold { folds: usize, stratified: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitPolicy {
    pub mode: SplitMode,
    pub scheme: SplitScheme,
    pub seed: u64,
}

impl SplitPolicy {
    /// The default protocol: stratified 10-fold at trial level, seed 42.
    pub fn default_protocol() -> Self {
        Self {
            mode: SplitMode::TrialLevel,
            scheme: SplitScheme::KFold {
                folds: 10,
                stratified: true,
            },
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.scheme {
            SplitScheme::Holdout { test_fraction } => {
                if !(test_fraction > 0.0 && test_fraction < 1.0) {
                    return Err(Error::InvalidConfig {
                        reason: format!(
                            "holdout test_fraction must be in (0, 1), got {test_fraction}"
                        ),
                    });
                }
            }
            SplitScheme::KFold { folds, .. } => {
                if folds < 2 {
                    return Err(Error::InvalidConfig {
                        reason: format!("kfold requires folds >= 2, got {folds}"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// One train/test partition, as row indices into the source matrix.
pub type FoldIndices = (Vec<usize>, Vec<usize>);

/// A splittable unit: one row (trial level) or one subject's rows.
struct Unit {
    rows: Vec<usize>,
    label: Label,
}

fn units_of(m: &FeatureMatrix, mode: SplitMode) -> Vec<Unit> {
    match mode {
        SplitMode::TrialLevel => (0..m.n_rows())
            .map(|r| Unit {
                rows: vec![r],
                label: m.labels()[r],
            })
            .collect(),
        SplitMode::SubjectLevel => {
            let mut order: Vec<&str> = Vec::new();
            let mut units: Vec<Unit> = Vec::new();
            for (r, subject) in m.subject_ids().iter().enumerate() {
                match order.iter().position(|s| s == subject) {
                    Some(i) => units[i].rows.push(r),
                    None => {
                        order.push(subject);
                        units.push(Unit {
                            rows: vec![r],
                            label: m.labels()[r],
                        });
                    }
                }
            }
            units
        }
    }
}

/// Partitions rows into train/test folds per the policy.
///
/// Stratified k-fold balances fold sizes to within one unit and holds each
/// fold's class counts within one unit of the exact class ratio.
pub fn split(m: &FeatureMatrix, policy: &SplitPolicy) -> Result<Vec<FoldIndices>> {
    policy.validate()?;
    if m.n_rows() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: m.n_rows(),
        });
    }
    if !m.labels().contains(&Label::Sz) || !m.labels().contains(&Label::Hc) {
        return Err(Error::SingleClass);
    }

    let units = units_of(m, policy.mode);
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);

    let unit_folds: Vec<Vec<usize>> = match policy.scheme {
        SplitScheme::Holdout { test_fraction } => {
            if units.len() < 2 {
                return Err(Error::InfeasibleStratification {
                    reason: format!(
                        "holdout needs at least 2 {} units, got {}",
                        mode_name(policy.mode),
                        units.len()
                    ),
                });
            }
            let mut order: Vec<usize> = (0..units.len()).collect();
            order.shuffle(&mut rng);
            let n_test =
                ((units.len() as f64 * test_fraction).round() as usize).clamp(1, units.len() - 1);
            vec![order[..n_test].to_vec()]
        }
        SplitScheme::KFold { folds, stratified } => {
            if units.len() < folds {
                return Err(Error::TooFewRows {
                    needed: folds,
                    got: units.len(),
                });
            }
            if stratified {
                stratified_fold_assignment(&units, folds, &mut rng)
            } else {
                let mut order: Vec<usize> = (0..units.len()).collect();
                order.shuffle(&mut rng);
                let mut fold_units = vec![Vec::new(); folds];
                for (i, u) in order.into_iter().enumerate() {
                    fold_units[i % folds].push(u);
                }
                fold_units
            }
        }
    };

    Ok(unit_folds
        .iter()
        .map(|test_units| {
            let in_test: Vec<bool> = {
                let mut mask = vec![false; units.len()];
                for &u in test_units {
                    mask[u] = true;
                }
                mask
            };
            let mut train = Vec::new();
            let mut test = Vec::new();
            for (u, unit) in units.iter().enumerate() {
                let side = if in_test[u] { &mut test } else { &mut train };
                side.extend_from_slice(&unit.rows);
            }
            train.sort_unstable();
            test.sort_unstable();
            (train, test)
        })
        .collect())
}

fn mode_name(mode: SplitMode) -> &'static str {
    match mode {
        SplitMode::TrialLevel => "trial",
        SplitMode::SubjectLevel => "subject",
    }
}

/// Assigns units to folds: per class, each fold receives the floor share
/// and the remainders go to the currently lightest folds, keeping both the
/// total fold sizes and the per-fold class counts within one unit of exact.
fn stratified_fold_assignment(
    units: &[Unit],
    folds: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let mut fold_units: Vec<Vec<usize>> = vec![Vec::new(); folds];
    let mut load = vec![0usize; folds];
    for class in [Label::Sz, Label::Hc] {
        let mut members: Vec<usize> = (0..units.len())
            .filter(|&u| units[u].label == class)
            .collect();
        members.shuffle(rng);
        let base = members.len() / folds;
        let extras = members.len() % folds;

        // The `extras` folds with the lightest load get one more unit.
        let mut by_load: Vec<usize> = (0..folds).collect();
        by_load.sort_by_key(|&f| (load[f], f));
        let mut share = vec![base; folds];
        for &f in by_load.iter().take(extras) {
            share[f] += 1;
        }

        let mut cursor = 0;
        for f in 0..folds {
            for _ in 0..share[f] {
                fold_units[f].push(members[cursor]);
                cursor += 1;
            }
            load[f] += share[f];
        }
    }
    fold_units
}

/// Confusion counts pooled over folds, with SZ as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_sz: usize,
    pub true_hc: usize,
    pub false_sz: usize,
    pub false_hc: usize,
}

/// Accuracy of one protocol run: the per-fold values and their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub accuracy: f64,
    pub per_fold: Vec<f64>,
    pub fold_sizes: Vec<(usize, usize)>,
    pub confusion: ConfusionCounts,
    pub model: ModelConfig,
    pub policy: SplitPolicy,
    pub standardized: bool,
}

impl EvalResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("EvalResult is always serializable")
    }

    pub const CSV_HEADER: &'static str =
        "model,group,split,scheme,seed,standardized,folds,accuracy";

    /// One appendable results-table row; `group` names the column subset
    /// the caller evaluated.
    pub fn to_csv_row(&self, group: &str) -> String {
        let scheme = match self.policy.scheme {
            SplitScheme::Holdout { test_fraction } => format!("holdout:{test_fraction}"),
            SplitScheme::KFold { folds, stratified } => format!(
                "kfold:{folds}{}",
                if stratified { "" } else { ":unstratified" }
            ),
        };
        format!(
            "{},{},{},{},{},{},{},{}",
            self.model.name(),
            group,
            mode_name(self.policy.mode),
            scheme,
            self.policy.seed,
            self.standardized,
            self.per_fold.len(),
            self.accuracy
        )
    }
}

/// Fits and scores the model on explicit folds. Standardization, when on
/// and wanted by the model, is fit per fold on the training rows only.
pub fn evaluate_folds(
    m: &FeatureMatrix,
    model_cfg: &ModelConfig,
    folds: &[FoldIndices],
    standardize: bool,
    policy: &SplitPolicy,
) -> Result<EvalResult> {
    let mut per_fold = Vec::with_capacity(folds.len());
    let mut fold_sizes = Vec::with_capacity(folds.len());
    let mut confusion = ConfusionCounts::default();

    for (train_idx, test_idx) in folds {
        let train = m.select_rows(train_idx);
        let test = m.select_rows(test_idx);
        let (train, test) = if standardize && model_cfg.wants_standardized_inputs() {
            let state = fit_standardizer(&train)?;
            (
                apply_standardizer(&state, &train)?,
                apply_standardizer(&state, &test)?,
            )
        } else {
            (train, test)
        };

        let fitted = model::fit(&train, model_cfg)?;
        let predictions = fitted.predict(&test)?;
        let mut correct = 0;
        for (pred, truth) in predictions.iter().zip(test.labels()) {
            match (pred, truth) {
                (Label::Sz, Label::Sz) => {
                    confusion.true_sz += 1;
                    correct += 1;
                }
                (Label::Hc, Label::Hc) => {
                    confusion.true_hc += 1;
                    correct += 1;
                }
                (Label::Sz, Label::Hc) => confusion.false_sz += 1,
                (Label::Hc, Label::Sz) => confusion.false_hc += 1,
            }
        }
        per_fold.push(correct as f64 / test.n_rows().max(1) as f64);
        fold_sizes.push((train.n_rows(), test.n_rows()));
    }

    let accuracy = per_fold.iter().sum::<f64>() / per_fold.len().max(1) as f64;
    Ok(EvalResult {
        accuracy,
        per_fold,
        fold_sizes,
        confusion,
        model: *model_cfg,
        policy: *policy,
        standardized: standardize,
    })
}

/// Splits per the policy, then fits and scores per fold.
pub fn evaluate(
    m: &FeatureMatrix,
    model_cfg: &ModelConfig,
    policy: &SplitPolicy,
    standardize: bool,
) -> Result<EvalResult> {
    let folds = split(m, policy)?;
    evaluate_folds(m, model_cfg, &folds, standardize, policy)
}
