//! Column standardization and equal-width discretization.
//!
//! Standardizers are fit on training rows only and applied to everything
//! the distance-based models see. The stddev convention is population
//! (divide by n). Constant columns standardize to zero.

use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::schema::ColumnSchema;

/// Per-column mean and population stddev captured from a training matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizerState {
    schema: ColumnSchema,
    means: Vec<f64>,
    stddevs: Vec<f64>,
}

impl StandardizerState {
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stddevs(&self) -> &[f64] {
        &self.stddevs
    }
}

/// Computes per-column mean and population stddev. Requires at least two rows.
pub fn fit_standardizer(train: &FeatureMatrix) -> Result<StandardizerState> {
    let n = train.n_rows();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let n_cols = train.n_cols();
    let mut means = vec![0.0; n_cols];
    for r in 0..n {
        for (c, v) in train.row(r).iter().enumerate() {
            means[c] += v;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut vars = vec![0.0; n_cols];
    for r in 0..n {
        for (c, v) in train.row(r).iter().enumerate() {
            let d = v - means[c];
            vars[c] += d * d;
        }
    }
    let stddevs = vars.iter().map(|v| (v / n as f64).sqrt()).collect();
    Ok(StandardizerState {
        schema: train.schema().clone(),
        means,
        stddevs,
    })
}

/// Maps every value x to (x - mean) / stddev; constant columns map to 0.
pub fn apply_standardizer(state: &StandardizerState, m: &FeatureMatrix) -> Result<FeatureMatrix> {
    if state.schema != *m.schema() {
        return Err(Error::SchemaMismatch {
            expected: state.schema.summary(),
            found: m.schema().summary(),
        });
    }
    let n_cols = m.n_cols();
    let mut values = Vec::with_capacity(m.n_rows() * n_cols);
    for r in 0..m.n_rows() {
        for (c, v) in m.row(r).iter().enumerate() {
            let s = state.stddevs[c];
            values.push(if s > 0.0 {
                (v - state.means[c]) / s
            } else {
                0.0
            });
        }
    }
    Ok(m.with_values(values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinningStrategy {
    EqualWidth,
}

/// Discretization settings for entropy scoring of continuous columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinningConfig {
    pub bin_count: usize,
    pub strategy: BinningStrategy,
}

impl BinningConfig {
    pub fn new(bin_count: usize) -> Result<Self> {
        if bin_count < 2 {
            return Err(Error::InvalidConfig {
                reason: format!("bin_count must be >= 2, got {bin_count}"),
            });
        }
        Ok(Self {
            bin_count,
            strategy: BinningStrategy::EqualWidth,
        })
    }
}

impl Default for BinningConfig {
    fn default() -> Self {
        Self {
            bin_count: 10,
            strategy: BinningStrategy::EqualWidth,
        }
    }
}

/// Assigns each value to an equal-width bin spanning [min, max].
///
/// The maximum value lands in the last bin; a constant column maps to bin 0.
pub fn discretize_column(values: &[f64], cfg: &BinningConfig) -> Result<Vec<usize>> {
    if values.is_empty() {
        return Err(Error::TooFewRows { needed: 1, got: 0 });
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidDistribution {
            reason: format!("non-finite value {bad} cannot be discretized"),
        });
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Ok(vec![0; values.len()]);
    }
    let k = cfg.bin_count;
    let width = (max - min) / k as f64;
    Ok(values
        .iter()
        .map(|&v| (((v - min) / width) as usize).min(k - 1))
        .collect())
}
