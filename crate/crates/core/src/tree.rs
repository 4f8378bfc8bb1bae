//! Binary decision tree with information-gain threshold splits.
//!
//! Splits route `value <= threshold` left and `> threshold` right. Candidate
//! thresholds are midpoints between consecutive distinct sorted values of a
//! column. Growth stops on zero label entropy, the depth cap, the
//! min-samples floor, or when no candidate has positive gain. Ties between
//! candidates resolve to the lower column index, then the lower threshold.

use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::schema::Label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Internal {
        column: String,
        column_index: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        class: Label,
        /// Majority fraction among training rows that reached this node.
        purity: f64,
    },
}

impl TreeNode {
    pub fn route(&self, row: &[f64]) -> Label {
        match self {
            TreeNode::Leaf { class, .. } => *class,
            TreeNode::Internal {
                column_index,
                threshold,
                left,
                right,
                ..
            } => {
                if row[*column_index] <= *threshold {
                    left.route(row)
                } else {
                    right.route(row)
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeConfig {
    /// Maximum split depth; `None` grows until another stop rule fires.
    pub max_depth: Option<usize>,
    /// Nodes with fewer rows become leaves.
    pub min_samples_split: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_split < 2 {
            return Err(Error::InvalidConfig {
                reason: format!(
                    "min_samples_split must be >= 2, got {}",
                    self.min_samples_split
                ),
            });
        }
        Ok(())
    }
}

/// Label entropy in bits from (SZ count, HC count).
fn label_entropy(sz: usize, hc: usize) -> f64 {
    let n = (sz + hc) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in &[sz, hc] {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.log2();
        }
    }
    h
}

/// The best (column, threshold, gain) over all candidates, or `None` when no
/// candidate has positive gain. Shared by `fit` and nothing else; tests use
/// an independent enumeration.
fn best_split(m: &FeatureMatrix, rows: &[usize]) -> Option<(usize, f64, f64)> {
    let sz_total = rows.iter().filter(|&&r| m.labels()[r] == Label::Sz).count();
    let hc_total = rows.len() - sz_total;
    let parent = label_entropy(sz_total, hc_total);
    let n = rows.len() as f64;

    let mut best: Option<(usize, f64, f64)> = None;
    for col in 0..m.n_cols() {
        let mut cells: Vec<(f64, Label)> = rows
            .iter()
            .map(|&r| (m.value(r, col), m.labels()[r]))
            .collect();
        cells.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left_sz = 0usize;
        let mut left_hc = 0usize;
        let mut i = 0;
        while i < cells.len() {
            // Consume the run of equal values.
            let v = cells[i].0;
            while i < cells.len() && cells[i].0 == v {
                match cells[i].1 {
                    Label::Sz => left_sz += 1,
                    Label::Hc => left_hc += 1,
                }
                i += 1;
            }
            if i == cells.len() {
                break;
            }
            let threshold = (v + cells[i].0) / 2.0;
            let left_n = (left_sz + left_hc) as f64;
            let right_sz = sz_total - left_sz;
            let right_hc = hc_total - left_hc;
            let right_n = (right_sz + right_hc) as f64;
            let gain = parent
                - (left_n / n) * label_entropy(left_sz, left_hc)
                - (right_n / n) * label_entropy(right_sz, right_hc);
            if gain > 0.0 && best.is_none_or(|(_, _, g)| gain > g) {
                best = Some((col, threshold, gain));
            }
        }
    }
    best
}

fn majority_leaf(m: &FeatureMatrix, rows: &[usize]) -> TreeNode {
    let sz = rows.iter().filter(|&&r| m.labels()[r] == Label::Sz).count();
    let hc = rows.len() - sz;
    // Exact ties resolve to HC, matching the SVM zero-decision convention.
    let class = if sz > hc { Label::Sz } else { Label::Hc };
    let purity = sz.max(hc) as f64 / rows.len() as f64;
    TreeNode::Leaf { class, purity }
}

fn grow(m: &FeatureMatrix, rows: &[usize], depth: usize, cfg: &TreeConfig) -> TreeNode {
    let sz = rows.iter().filter(|&&r| m.labels()[r] == Label::Sz).count();
    let pure = sz == 0 || sz == rows.len();
    let depth_capped = cfg.max_depth.is_some_and(|cap| depth >= cap);
    if pure || depth_capped || rows.len() < cfg.min_samples_split {
        return majority_leaf(m, rows);
    }
    match best_split(m, rows) {
        None => majority_leaf(m, rows),
        Some((col, threshold, _)) => {
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
                rows.iter().partition(|&&r| m.value(r, col) <= threshold);
            TreeNode::Internal {
                column: m.schema().columns()[col].name.clone(),
                column_index: col,
                threshold,
                left: Box::new(grow(m, &left_rows, depth + 1, cfg)),
                right: Box::new(grow(m, &right_rows, depth + 1, cfg)),
            }
        }
    }
}

/// Grows a tree on the full training matrix.
pub fn fit(train: &FeatureMatrix, cfg: &TreeConfig) -> Result<TreeNode> {
    cfg.validate()?;
    if train.n_rows() == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    let rows: Vec<usize> = (0..train.n_rows()).collect();
    Ok(grow(train, &rows, 0, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{Column, ColumnKind, ColumnSchema};

    pub(crate) fn matrix(names: &[&str], rows: &[(&[f64], Label)]) -> FeatureMatrix {
        let schema = ColumnSchema::new(
            names
                .iter()
                .map(|n| Column {
                    name: n.to_string(),
                    kind: ColumnKind::Timing,
                })
                .collect(),
        )
        .unwrap();
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for (row, label) in rows {
            values.extend_from_slice(row);
            labels.push(*label);
        }
        let ids = (0..rows.len()).map(|i| format!("s{i}")).collect();
        FeatureMatrix::new(schema, values, labels, ids).unwrap()
    }

    #[test]
    fn single_class_training_set_is_one_pure_leaf() {
        let m = matrix(
            &["x"],
            &[
                (&[1.0], Label::Sz),
                (&[2.0], Label::Sz),
                (&[3.0], Label::Sz),
            ],
        );
        let root = fit(&m, &TreeConfig::default()).unwrap();
        assert_eq!(
            root,
            TreeNode::Leaf {
                class: Label::Sz,
                purity: 1.0
            }
        );
    }

    #[test]
    fn height_weight_toy_routes_tall_to_first_class() {
        // Male -> SZ, female -> HC. The learned rule should be:
        // height > 180 => male, else weight > 80 => male, else female.
        let m = matrix(
            &["height", "weight"],
            &[
                (&[190.0, 60.0], Label::Sz),
                (&[188.0, 65.0], Label::Sz),
                (&[185.0, 70.0], Label::Sz),
                (&[175.0, 90.0], Label::Sz),
                (&[170.0, 85.0], Label::Sz),
                (&[175.0, 70.0], Label::Hc),
                (&[165.0, 60.0], Label::Hc),
                (&[160.0, 75.0], Label::Hc),
                (&[170.0, 60.0], Label::Hc),
            ],
        );
        let root = fit(&m, &TreeConfig::default()).unwrap();
        assert_eq!(root.route(&[185.0, 70.0]), Label::Sz);
        assert_eq!(root.route(&[200.0, 50.0]), Label::Sz);
        assert_eq!(root.route(&[170.0, 95.0]), Label::Sz);
        assert_eq!(root.route(&[170.0, 60.0]), Label::Hc);
        // The root must be the height split at the 180 midpoint.
        match &root {
            TreeNode::Internal {
                column, threshold, ..
            } => {
                assert_eq!(column, "height");
                assert_eq!(*threshold, 180.0);
            }
            leaf => panic!("expected internal root, got {leaf:?}"),
        }
    }

    #[test]
    fn xor_pattern_reaches_full_training_accuracy() {
        // XOR pattern with all-distinct coordinates so every impure node
        // still has a positive-gain split available.
        let m = matrix(
            &["x", "y"],
            &[
                (&[0.10, 0.12], Label::Sz),
                (&[0.88, 0.90], Label::Sz),
                (&[0.16, 0.04], Label::Sz),
                (&[0.84, 0.96], Label::Sz),
                (&[0.09, 0.91], Label::Hc),
                (&[0.93, 0.08], Label::Hc),
                (&[0.04, 0.86], Label::Hc),
                (&[0.97, 0.14], Label::Hc),
            ],
        );
        let root = fit(&m, &TreeConfig::default()).unwrap();
        assert!(root.depth() >= 2);
        for r in 0..m.n_rows() {
            assert_eq!(root.route(m.row(r)), m.labels()[r], "row {r}");
        }
    }

    #[test]
    fn depth_cap_of_zero_yields_majority_leaf() {
        let m = matrix(
            &["x"],
            &[
                (&[0.0], Label::Sz),
                (&[1.0], Label::Sz),
                (&[2.0], Label::Hc),
            ],
        );
        let cfg = TreeConfig {
            max_depth: Some(0),
            ..TreeConfig::default()
        };
        let root = fit(&m, &cfg).unwrap();
        assert_eq!(
            root,
            TreeNode::Leaf {
                class: Label::Sz,
                purity: 2.0 / 3.0
            }
        );
    }

    #[test]
    fn min_samples_split_stops_growth() {
        let m = matrix(
            &["x"],
            &[
                (&[0.0], Label::Sz),
                (&[1.0], Label::Hc),
                (&[2.0], Label::Sz),
                (&[3.0], Label::Hc),
            ],
        );
        let cfg = TreeConfig {
            max_depth: None,
            min_samples_split: 5,
        };
        let root = fit(&m, &cfg).unwrap();
        assert!(matches!(root, TreeNode::Leaf { .. }));
    }

    #[test]
    fn empty_training_set_rejected() {
        let m = matrix(&["x"], &[]);
        assert!(matches!(
            fit(&m, &TreeConfig::default()).unwrap_err(),
            Error::EmptyTrainingSet
        ));
    }

    #[test]
    fn consistent_data_reaches_perfect_training_accuracy() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let rows: Vec<(Vec<f64>, Label)> = (0..30)
                .map(|_| {
                    let v: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let label = if rng.random_range(0.0..1.0) < 0.5 {
                        Label::Sz
                    } else {
                        Label::Hc
                    };
                    (v, label)
                })
                .collect();
            let borrowed: Vec<(&[f64], Label)> =
                rows.iter().map(|(v, l)| (v.as_slice(), *l)).collect();
            let m = matrix(&["a", "b", "c", "d"], &borrowed);
            let root = fit(&m, &TreeConfig::default()).unwrap();
            for r in 0..m.n_rows() {
                assert_eq!(root.route(m.row(r)), m.labels()[r]);
            }
        }
    }

    #[test]
    fn predictions_are_scale_invariant() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let rows: Vec<(Vec<f64>, Label)> = (0..40)
            .map(|i| {
                let v: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
                let label = if i % 3 == 0 { Label::Sz } else { Label::Hc };
                (v, label)
            })
            .collect();
        let borrowed: Vec<(&[f64], Label)> = rows.iter().map(|(v, l)| (v.as_slice(), *l)).collect();
        let m = matrix(&["a", "b", "c"], &borrowed);

        let scales = [3.0, 0.25, 40.0];
        let scaled_rows: Vec<(Vec<f64>, Label)> = rows
            .iter()
            .map(|(v, l)| (v.iter().zip(scales).map(|(x, s)| x * s).collect(), *l))
            .collect();
        let borrowed_scaled: Vec<(&[f64], Label)> = scaled_rows
            .iter()
            .map(|(v, l)| (v.as_slice(), *l))
            .collect();
        let m_scaled = matrix(&["a", "b", "c"], &borrowed_scaled);

        let t1 = fit(&m, &TreeConfig::default()).unwrap();
        let t2 = fit(&m_scaled, &TreeConfig::default()).unwrap();
        for r in 0..m.n_rows() {
            assert_eq!(t1.route(m.row(r)), t2.route(m_scaled.row(r)), "row {r}");
        }
    }

    #[test]
    fn root_split_matches_exhaustive_enumeration() {
        use rand::Rng;
        use rand::SeedableRng;
        // Independent oracle: enumerate every (column, midpoint) candidate.
        fn oracle_best(m: &FeatureMatrix) -> Option<(usize, f64)> {
            let n = m.n_rows() as f64;
            let sz_total = m.labels().iter().filter(|&&l| l == Label::Sz).count();
            let hc_total = m.n_rows() - sz_total;
            let h = |sz: usize, hc: usize| -> f64 {
                let tot = (sz + hc) as f64;
                let mut e = 0.0;
                for c in [sz, hc] {
                    if c > 0 {
                        let p = c as f64 / tot;
                        e -= p * p.log2();
                    }
                }
                e
            };
            let parent = h(sz_total, hc_total);
            let mut best: Option<(usize, f64, f64)> = None;
            for col in 0..m.n_cols() {
                let mut vals: Vec<f64> = (0..m.n_rows()).map(|r| m.value(r, col)).collect();
                vals.sort_by(f64::total_cmp);
                vals.dedup();
                for w in vals.windows(2) {
                    let threshold = (w[0] + w[1]) / 2.0;
                    let mut lsz = 0;
                    let mut lhc = 0;
                    for r in 0..m.n_rows() {
                        if m.value(r, col) <= threshold {
                            match m.labels()[r] {
                                Label::Sz => lsz += 1,
                                Label::Hc => lhc += 1,
                            }
                        }
                    }
                    let ln = (lsz + lhc) as f64;
                    let rsz = sz_total - lsz;
                    let rhc = hc_total - lhc;
                    let rn = (rsz + rhc) as f64;
                    let gain = parent - (ln / n) * h(lsz, lhc) - (rn / n) * h(rsz, rhc);
                    if gain > 0.0 && best.is_none_or(|(_, _, g)| gain > g) {
                        best = Some((col, threshold, gain));
                    }
                }
            }
            best.map(|(c, t, _)| (c, t))
        }

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for case in 0..30 {
            let rows: Vec<(Vec<f64>, Label)> = (0..12)
                .map(|_| {
                    let v: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
                    let label = if rng.random_range(0.0..1.0) < 0.5 {
                        Label::Sz
                    } else {
                        Label::Hc
                    };
                    (v, label)
                })
                .collect();
            let borrowed: Vec<(&[f64], Label)> =
                rows.iter().map(|(v, l)| (v.as_slice(), *l)).collect();
            let m = matrix(&["a", "b", "c"], &borrowed);
            let root = fit(&m, &TreeConfig::default()).unwrap();
            match (root, oracle_best(&m)) {
                (
                    TreeNode::Internal {
                        column_index,
                        threshold,
                        ..
                    },
                    Some((oc, ot)),
                ) => {
                    assert_eq!(column_index, oc, "case {case}");
                    assert_eq!(threshold, ot, "case {case}");
                }
                (TreeNode::Leaf { .. }, None) => {}
                (got, want) => panic!("case {case}: {got:?} vs oracle {want:?}"),
            }
        }
    }
}
