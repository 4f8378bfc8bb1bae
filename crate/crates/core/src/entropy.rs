//! Shannon entropy and the highest-entropy-first feature ranking.
//!
//! Column entropy is computed on the feature-value distribution itself
//! (unsupervised): values are discretized into equal-width bins and the
//! bin frequencies form the distribution. Scores are in bits.

use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::preprocess::{discretize_column, BinningConfig};

/// Shannon entropy in bits: -sum p_i * log2(p_i), with 0*log(0) = 0.
///
/// Probabilities must be non-negative and sum to 1 within 1e-9.
pub fn entropy(probabilities: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for &p in probabilities {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidDistribution {
                reason: format!("probability {p} is negative or non-finite"),
            });
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution {
            reason: format!("probabilities sum to {sum}, expected 1"),
        });
    }
    Ok(probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum())
}

/// One column's entropy score in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyScore {
    pub column: String,
    pub entropy_bits: f64,
}

/// Every feature column ordered by descending entropy, ties kept in schema order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRanking {
    scores: Vec<EntropyScore>,
}

impl EntropyRanking {
    pub fn scores(&self) -> &[EntropyScore] {
        &self.scores
    }

    /// Column names in removal order (highest entropy first).
    pub fn column_order(&self) -> impl Iterator<Item = &str> {
        self.scores.iter().map(|s| s.column.as_str())
    }

    /// CSV with header `column,entropy_bits`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("column,entropy_bits\n");
        for score in &self.scores {
            out.push_str(&format!("{},{}\n", score.column, score.entropy_bits));
        }
        out
    }
}

/// Entropy of one named column after equal-width discretization.
pub fn column_entropy(
    m: &FeatureMatrix,
    column: &str,
    cfg: &BinningConfig,
) -> Result<EntropyScore> {
    let idx = m
        .schema()
        .index_of(column)
        .ok_or_else(|| Error::UnknownColumn {
            name: column.to_string(),
        })?;
    let values = m.column(idx);
    let bins = discretize_column(&values, cfg)?;
    let mut counts = vec![0usize; cfg.bin_count];
    for b in bins {
        counts[b] += 1;
    }
    let n = values.len() as f64;
    let probabilities: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    Ok(EntropyScore {
        column: column.to_string(),
        entropy_bits: entropy(&probabilities)?,
    })
}

/// Scores every column and sorts descending; equal scores keep schema order.
pub fn rank_features(m: &FeatureMatrix, cfg: &BinningConfig) -> Result<EntropyRanking> {
    if m.n_cols() == 0 {
        return Err(Error::UnknownColumn {
            name: "<no columns>".to_string(),
        });
    }
    let mut scores = Vec::with_capacity(m.n_cols());
    for col in m.schema().columns() {
        scores.push(column_entropy(m, &col.name, cfg)?);
    }
    // Stable sort keeps schema order on ties.
    scores.sort_by(|a, b| b.entropy_bits.total_cmp(&a.entropy_bits));
    Ok(EntropyRanking { scores })
}
