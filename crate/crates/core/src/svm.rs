//! Soft-margin SVM with an RBF kernel, trained by sequential pairwise
//! optimization of the dual (SMO).
//!
//! Labels map SZ -> +1, HC -> -1. The decision function is
//! f(x) = sum_i alpha_i y_i K(x_i, x) + b; predictions take sign(f), with
//! f(x) = 0 mapping to HC. Pair selection uses the usual max-|E_i - E_j|
//! heuristic with seeded random fallbacks, so a fit is a deterministic
//! function of (data, config, seed).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};
use crate::knn::euclidean_distance;
use crate::schema::Label;

/// RBF kernel value exp(-gamma * ||a - b||^2), in (0, 1].
pub fn rbf_kernel(a: &[f64], b: &[f64], gamma: f64) -> Result<f64> {
    let d = euclidean_distance(a, b)?;
    Ok((-gamma * d * d).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaChoice {
    /// 1 / (n_features * mean per-column variance of the training data).
    Scale,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub c: f64,
    pub gamma: GammaChoice,
    pub tolerance: f64,
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            gamma: GammaChoice::Scale,
            tolerance: 1e-3,
            max_passes: 100,
            seed: 0,
        }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidConfig {
                reason: format!("C must be positive, got {}", self.c),
            });
        }
        if let GammaChoice::Fixed(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidConfig {
                    reason: format!("gamma must be positive, got {g}"),
                });
            }
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig {
                reason: format!("tolerance must be positive, got {}", self.tolerance),
            });
        }
        if self.max_passes == 0 {
            return Err(Error::InvalidConfig {
                reason: "max_passes must be >= 1".to_string(),
            });
        }
        Ok(())
    }
}

/// Fitted SVM: support vectors with their duals and the resolved gamma.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// alpha_i for each support vector, in (0, C].
    pub alphas: Vec<f64>,
    /// Label of each support vector.
    pub labels: Vec<Label>,
    pub bias: f64,
    pub gamma: f64,
    /// False when the sweep budget ran out before the KKT conditions held.
    pub converged: bool,
}

impl SvmModel {
    /// f(x) = sum_i alpha_i y_i K(x_i, x) + bias.
    pub fn decision(&self, row: &[f64]) -> Result<f64> {
        let mut f = self.bias;
        for ((sv, &alpha), label) in self
            .support_vectors
            .iter()
            .zip(&self.alphas)
            .zip(&self.labels)
        {
            f += alpha * label.signed() * rbf_kernel(sv, row, self.gamma)?;
        }
        Ok(f)
    }

    pub fn classify(&self, row: &[f64]) -> Result<Label> {
        Ok(if self.decision(row)? > 0.0 {
            Label::Sz
        } else {
            Label::Hc
        })
    }

    /// sum_i alpha_i y_i over the stored support vectors.
    pub fn dual_constraint_residual(&self) -> f64 {
        self.alphas
            .iter()
            .zip(&self.labels)
            .map(|(a, l)| a * l.signed())
            .sum()
    }
}

/// Resolves `GammaChoice::Scale` against a training matrix.
pub fn resolve_gamma(train: &FeatureMatrix, choice: GammaChoice) -> f64 {
    match choice {
        GammaChoice::Fixed(g) => g,
        GammaChoice::Scale => {
            let n = train.n_rows() as f64;
            let n_cols = train.n_cols();
            let mut mean_var = 0.0;
            for c in 0..n_cols {
                let col = train.column(c);
                let mean = col.iter().sum::<f64>() / n;
                let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                mean_var += var;
            }
            mean_var /= n_cols as f64;
            if mean_var > 0.0 {
                1.0 / (n_cols as f64 * mean_var)
            } else {
                1.0 / n_cols as f64
            }
        }
    }
}

struct Solver<'a> {
    x: Vec<&'a [f64]>,
    y: Vec<f64>,
    kernel: Vec<f64>, // n x n, row-major
    alpha: Vec<f64>,
    errors: Vec<f64>, // E_i = f(x_i) - y_i
    bias: f64,
    c: f64,
    tol: f64,
    rng: ChaCha8Rng,
}

impl<'a> Solver<'a> {
    fn k(&self, i: usize, j: usize) -> f64 {
        self.kernel[i * self.x.len() + j]
    }

    fn non_bound(&self) -> Vec<usize> {
        (0..self.x.len())
            .filter(|&i| self.alpha[i] > 0.0 && self.alpha[i] < self.c)
            .collect()
    }

    fn take_step(&mut self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        let (ai, aj) = (self.alpha[i], self.alpha[j]);
        let (yi, yj) = (self.y[i], self.y[j]);
        let (ei, ej) = (self.errors[i], self.errors[j]);
        let (lo, hi) = if yi != yj {
            ((aj - ai).max(0.0), (self.c + aj - ai).min(self.c))
        } else {
            ((ai + aj - self.c).max(0.0), (ai + aj).min(self.c))
        };
        if lo >= hi {
            return false;
        }
        let eta = self.k(i, i) + self.k(j, j) - 2.0 * self.k(i, j);
        if eta <= 0.0 {
            // Coincident points under an RBF kernel; no usable direction.
            return false;
        }
        let aj_new = (aj + yj * (ei - ej) / eta).clamp(lo, hi);
        if (aj_new - aj).abs() < 1e-12 {
            return false;
        }
        let ai_new = ai + yi * yj * (aj - aj_new);

        let d_i = yi * (ai_new - ai);
        let d_j = yj * (aj_new - aj);
        let b1 = self.bias - ei - d_i * self.k(i, i) - d_j * self.k(i, j);
        let b2 = self.bias - ej - d_i * self.k(i, j) - d_j * self.k(j, j);
        let bias_new = if ai_new > 0.0 && ai_new < self.c {
            b1
        } else if aj_new > 0.0 && aj_new < self.c {
            b2
        } else {
            (b1 + b2) / 2.0
        };
        let d_b = bias_new - self.bias;

        for k in 0..self.x.len() {
            self.errors[k] += d_i * self.k(i, k) + d_j * self.k(j, k) + d_b;
        }
        self.alpha[i] = ai_new;
        self.alpha[j] = aj_new;
        self.bias = bias_new;
        true
    }

    fn examine(&mut self, i: usize) -> bool {
        let r = self.errors[i] * self.y[i];
        let violates =
            (r < -self.tol && self.alpha[i] < self.c) || (r > self.tol && self.alpha[i] > 0.0);
        if !violates {
            return false;
        }

        let non_bound = self.non_bound();
        if non_bound.len() > 1 {
            // Second-choice heuristic: maximize |E_i - E_j|.
            let mut best = None;
            let mut best_gap = -1.0;
            for &j in &non_bound {
                let gap = (self.errors[i] - self.errors[j]).abs();
                if j != i && gap > best_gap {
                    best_gap = gap;
                    best = Some(j);
                }
            }
            if let Some(j) = best {
                if self.take_step(i, j) {
                    return true;
                }
            }
        }

        let n = self.x.len();
        let start = self.rng.random_range(0..n.max(1));
        for off in 0..non_bound.len() {
            let j = non_bound[(start + off) % non_bound.len()];
            if self.take_step(i, j) {
                return true;
            }
        }
        for off in 0..n {
            let j = (start + off) % n;
            if self.take_step(i, j) {
                return true;
            }
        }
        false
    }
}

/// Trains on rows with both classes present. When the sweep budget runs out
/// before the KKT conditions hold within tolerance, the model is still
/// returned with `converged = false`.
pub fn fit(train: &FeatureMatrix, cfg: &SvmConfig) -> Result<SvmModel> {
    cfg.validate()?;
    let n = train.n_rows();
    if n == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    let both_classes = train.labels().contains(&Label::Sz) && train.labels().contains(&Label::Hc);
    if n < 2 || !both_classes {
        return Err(Error::SingleClassTraining);
    }

    let gamma = resolve_gamma(train, cfg.gamma);
    let x: Vec<&[f64]> = (0..n).map(|r| train.row(r)).collect();
    let y: Vec<f64> = train.labels().iter().map(Label::signed).collect();

    let mut kernel = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = rbf_kernel(x[i], x[j], gamma)?;
            kernel[i * n + j] = v;
            kernel[j * n + i] = v;
        }
    }

    let mut solver = Solver {
        errors: y.iter().map(|yi| -yi).collect(),
        x,
        y,
        kernel,
        alpha: vec![0.0; n],
        bias: 0.0,
        c: cfg.c,
        tol: cfg.tolerance,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
    };

    let mut converged = false;
    let mut examine_all = true;
    let mut sweeps = 0;
    while sweeps < cfg.max_passes {
        let targets: Vec<usize> = if examine_all {
            (0..n).collect()
        } else {
            solver.non_bound()
        };
        let changed = targets.iter().filter(|&&i| solver.examine(i)).count();
        sweeps += 1;
        if examine_all {
            if changed == 0 {
                converged = true;
                break;
            }
            examine_all = false;
        } else if changed == 0 {
            examine_all = true;
        }
    }

    let mut support_vectors = Vec::new();
    let mut alphas = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        if solver.alpha[i] > 1e-12 {
            support_vectors.push(solver.x[i].to_vec());
            alphas.push(solver.alpha[i]);
            labels.push(train.labels()[i]);
        }
    }

    Ok(SvmModel {
        support_vectors,
        alphas,
        labels,
        bias: solver.bias,
        gamma,
        converged,
    })
}
