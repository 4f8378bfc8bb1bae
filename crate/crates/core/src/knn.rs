//! k-nearest-neighbors with Euclidean distance and majority vote.
//!
//! `k` may be fixed (positive, odd, at most the training-set size) or AUTO.
//! AUTO resolves k by deterministic 5-fold internal cross-validation over
//! odd candidates 1..=min(31, n_train - 1), keeping the best mean fold
//! accuracy and the smallest k on ties. Fold assignment is round-robin per
//! class in row order, so resolution needs no RNG.

use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::schema::Label;

/// Plain n-dimensional Euclidean distance.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KChoice {
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMetric {
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: KChoice,
    pub distance: DistanceMetric,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self {
            k: KChoice::Auto,
            distance: DistanceMetric::Euclidean,
        }
    }
}

impl KnnConfig {
    pub fn validate(&self) -> Result<()> {
        if let KChoice::Fixed(k) = self.k {
            if k == 0 || k % 2 == 0 {
                return Err(Error::InvalidConfig {
                    reason: format!("k must be a positive odd integer, got {k}"),
                });
            }
        }
        Ok(())
    }
}

/// The fitted model: the stored training rows plus the resolved k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
    pub k: usize,
}

/// Votes among the k nearest training rows. Distance ties resolve to the
/// lower row index; vote ties resolve to the single nearest neighbor.
pub fn vote(rows: &[Vec<f64>], labels: &[Label], k: usize, query: &[f64]) -> Result<Label> {
    let mut ranked: Vec<(f64, usize)> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| euclidean_distance(row, query).map(|d| (d, i)))
        .collect::<Result<_>>()?;
    // Stable by distance keeps lower indices first among ties.
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let k = k.min(ranked.len());
    let sz = ranked[..k]
        .iter()
        .filter(|(_, i)| labels[*i] == Label::Sz)
        .count();
    let hc = k - sz;
    Ok(if sz > hc {
        Label::Sz
    } else if hc > sz {
        Label::Hc
    } else {
        labels[ranked[0].1]
    })
}

/// Mean fold accuracy of a k candidate under the deterministic internal split.
fn internal_cv_accuracy(train: &FeatureMatrix, fold_of: &[usize], n_folds: usize, k: usize) -> f64 {
    let mut fold_acc = Vec::with_capacity(n_folds);
    for fold in 0..n_folds {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut queries = Vec::new();
        for (r, &assigned) in fold_of.iter().enumerate() {
            if assigned == fold {
                queries.push(r);
            } else {
                rows.push(train.row(r).to_vec());
                labels.push(train.labels()[r]);
            }
        }
        if queries.is_empty() || rows.is_empty() {
            continue;
        }
        let correct = queries
            .iter()
            .filter(|&&q| {
                vote(&rows, &labels, k, train.row(q)).expect("equal-width rows")
                    == train.labels()[q]
            })
            .count();
        fold_acc.push(correct as f64 / queries.len() as f64);
    }
    if fold_acc.is_empty() {
        0.0
    } else {
        fold_acc.iter().sum::<f64>() / fold_acc.len() as f64
    }
}

/// AUTO resolution; returns the winning k and its mean internal CV accuracy.
pub(crate) fn resolve_auto_k(train: &FeatureMatrix) -> (usize, f64) {
    let n = train.n_rows();
    if n < 3 {
        return (1, 0.0);
    }
    let max_k = 31.min(n - 1);
    let n_folds = 5.min(n);

    // Round-robin fold assignment within each class, in row order.
    let mut fold_of = vec![0usize; n];
    let mut next = [0usize; 2];
    for (slot, &label) in fold_of.iter_mut().zip(train.labels()) {
        let class = usize::from(label == Label::Hc);
        *slot = next[class] % n_folds;
        next[class] += 1;
    }

    let mut best_k = 1;
    let mut best_acc = f64::NEG_INFINITY;
    let mut k = 1;
    while k <= max_k {
        let acc = internal_cv_accuracy(train, &fold_of, n_folds, k);
        if acc > best_acc {
            best_acc = acc;
            best_k = k;
        }
        k += 2;
    }
    (best_k, best_acc)
}

/// Stores the training data and resolves k.
pub fn fit(train: &FeatureMatrix, cfg: &KnnConfig) -> Result<KnnModel> {
    cfg.validate()?;
    if train.n_rows() == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    let k = match cfg.k {
        KChoice::Fixed(k) => {
            if k > train.n_rows() {
                return Err(Error::KTooLarge {
                    k,
                    n_train: train.n_rows(),
                });
            }
            k
        }
        KChoice::Auto => resolve_auto_k(train).0,
    };
    let rows = (0..train.n_rows()).map(|r| train.row(r).to_vec()).collect();
    Ok(KnnModel {
        rows,
        labels: train.labels().to_vec(),
        k,
    })
}
