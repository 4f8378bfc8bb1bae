//! Seeded two-class cohort generator in the canonical CSV schemas.
//!
//! Class structure is Gaussian with shared per-column variance: the nine
//! N100 columns of healthy controls are shifted by +effect_size standard
//! deviations relative to patients (reduced-suppression modeling), every
//! other column is class-independent noise unless `noise_dims_informative`
//! extends the same shift to the remaining signal and timing columns.
//! Demographics never carry class signal. The equal-covariance design gives
//! a closed-form optimal accuracy used to calibrate the whole pipeline.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::data::{merge, parse_table, FeatureMatrix};
use crate::error::{Error, Result};
use crate::schema::{ColumnKind, ColumnSchema, ErpComponent, TableKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_hc: usize,
    pub n_sz: usize,
    /// Standardized mean separation applied to the informative columns.
    pub effect_size: f64,
    /// When set, non-N100 signal and timing columns also carry the shift.
    pub noise_dims_informative: bool,
    pub trials_per_subject: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_hc: 32,
            n_sz: 49,
            effect_size: 1.0,
            noise_dims_informative: false,
            trials_per_subject: 1,
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_hc < 1 || self.n_sz < 1 {
            return Err(Error::InvalidConfig {
                reason: format!(
                    "need at least one subject per class, got {}/{}",
                    self.n_hc, self.n_sz
                ),
            });
        }
        if !(self.effect_size >= 0.0 && self.effect_size.is_finite()) {
            return Err(Error::InvalidConfig {
                reason: format!(
                    "effect_size must be finite and >= 0, got {}",
                    self.effect_size
                ),
            });
        }
        if self.trials_per_subject < 1 {
            return Err(Error::InvalidConfig {
                reason: "trials_per_subject must be >= 1".to_string(),
            });
        }
        Ok(())
    }
}

/// The three generated tables as CSV text in the canonical schemas.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthTables {
    pub erp_csv: String,
    pub eeg_csv: String,
    pub demo_csv: String,
}

impl SynthTables {
    /// Runs the generated text through the normal ingestion path.
    pub fn to_matrix(&self) -> Result<FeatureMatrix> {
        let erp = parse_table(&self.erp_csv, TableKind::ErpAverages)?;
        let eeg = parse_table(&self.eeg_csv, TableKind::EegTrials)?;
        let demo = parse_table(&self.demo_csv, TableKind::Demographics)?;
        merge(&erp, &eeg, &demo)
    }
}

/// Per-column noise scale and class-independent base mean.
fn column_profile(kind: ColumnKind, name: &str) -> (f64, f64) {
    match kind {
        ColumnKind::Timing => {
            if name == "ITI" {
                (2.0, 0.3)
            } else {
                (100.0, 15.0)
            }
        }
        ColumnKind::Erp(_, ErpComponent::N100) => (-1.0, 1.0),
        ColumnKind::Erp(_, ErpComponent::P200) => (1.0, 1.0),
        ColumnKind::Erp(..) => (0.0, 1.0),
        ColumnKind::RawElectrode(_) => (0.0, 1.0),
        ColumnKind::Demographic => unreachable!("demographics are sampled separately"),
    }
}

fn is_informative(kind: ColumnKind, noise_dims_informative: bool) -> bool {
    match kind {
        ColumnKind::Erp(_, ErpComponent::N100) => true,
        ColumnKind::Demographic => false,
        _ => noise_dims_informative,
    }
}

/// Number of columns carrying the class shift under this config.
pub fn informative_column_count(cfg: &SynthConfig) -> usize {
    ColumnSchema::canonical()
        .columns()
        .iter()
        .filter(|c| {
            !matches!(c.kind, ColumnKind::Demographic)
                && is_informative(c.kind, cfg.noise_dims_informative)
        })
        .count()
}

/// Generates the three cohort tables. Same seed, same bytes.
pub fn generate(cfg: &SynthConfig) -> Result<SynthTables> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let schema = ColumnSchema::canonical();
    let erp_columns: Vec<_> = schema
        .columns()
        .iter()
        .filter(|c| matches!(c.kind, ColumnKind::Timing | ColumnKind::Erp(..)))
        .cloned()
        .collect();
    let eeg_columns: Vec<_> = schema
        .columns()
        .iter()
        .filter(|c| matches!(c.kind, ColumnKind::RawElectrode(_)))
        .cloned()
        .collect();

    let mut erp_csv = format!(
        "subject,group,{}\n",
        erp_columns
            .iter()
            .map(|c| c.name.as_str())
            .collect::<Vec<_>>()
            .join(",")
    );
    let mut eeg_csv = format!(
        "subject,group,{}\n",
        eeg_columns
            .iter()
            .map(|c| c.name.as_str())
            .collect::<Vec<_>>()
            .join(",")
    );
    let mut demo_csv = String::from("subject,age,gender,education,group\n");

    let total = cfg.n_hc + cfg.n_sz;
    for subject_idx in 0..total {
        let is_hc = subject_idx < cfg.n_hc;
        let group = if is_hc { "HC" } else { "SZ" };
        let subject = format!("S{:03}", subject_idx + 1);

        let age = round1(40.0 + 12.0 * normal(&mut rng));
        let gender = if rng.random_range(0.0..1.0) < 0.5 {
            "male"
        } else {
            "female"
        };
        let education = round1(14.0 + 3.0 * normal(&mut rng));
        demo_csv.push_str(&format!("{subject},{age},{gender},{education},{group}\n"));

        for _ in 0..cfg.trials_per_subject {
            let mut erp_cells = Vec::with_capacity(erp_columns.len());
            for col in &erp_columns {
                let (base, sigma) = column_profile(col.kind, &col.name);
                let shift = if is_hc && is_informative(col.kind, cfg.noise_dims_informative) {
                    cfg.effect_size * sigma
                } else {
                    0.0
                };
                erp_cells.push(format!("{}", base + shift + sigma * normal(&mut rng)));
            }
            erp_csv.push_str(&format!("{subject},{group},{}\n", erp_cells.join(",")));

            let mut eeg_cells = Vec::with_capacity(eeg_columns.len());
            for col in &eeg_columns {
                let (base, sigma) = column_profile(col.kind, &col.name);
                let shift = if is_hc && is_informative(col.kind, cfg.noise_dims_informative) {
                    cfg.effect_size * sigma
                } else {
                    0.0
                };
                eeg_cells.push(format!("{}", base + shift + sigma * normal(&mut rng)));
            }
            eeg_csv.push_str(&format!("{subject},{group},{}\n", eeg_cells.join(",")));
        }
    }

    Ok(SynthTables {
        erp_csv,
        eeg_csv,
        demo_csv,
    })
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn round1(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

/// Optimal accuracy for two equal-covariance Gaussian classes whose means
/// differ by `d_effective` pooled standard deviations, under the given
/// class priors.
pub fn bayes_accuracy_for_separation(d_effective: f64, prior_hc: f64, prior_sz: f64) -> f64 {
    let total = prior_hc + prior_sz;
    let (pi_h, pi_s) = (prior_hc / total, prior_sz / total);
    if d_effective <= 0.0 {
        return pi_h.max(pi_s);
    }
    // HC sits at +d on the discriminant axis, SZ at 0; choose HC above t.
    let t = d_effective / 2.0 - (pi_h / pi_s).ln() / d_effective;
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    pi_h * std_normal.cdf(d_effective - t) + pi_s * std_normal.cdf(t)
}

/// Closed-form optimal accuracy for this config's generator: the
/// informative columns aggregate to d = effect_size * sqrt(count).
pub fn bayes_accuracy(cfg: &SynthConfig) -> Result<f64> {
    cfg.validate()?;
    let m = informative_column_count(cfg) as f64;
    let d = cfg.effect_size * m.sqrt();
    let prior_hc = cfg.n_hc as f64 / (cfg.n_hc + cfg.n_sz) as f64;
    Ok(bayes_accuracy_for_separation(d, prior_hc, 1.0 - prior_hc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::Label;

    #[test]
    fn cohort_sizes_match_config() {
        let cfg = SynthConfig {
            n_hc: 32,
            n_sz: 49,
            trials_per_subject: 1,
            ..SynthConfig::default()
        };
        let m = generate(&cfg).unwrap().to_matrix().unwrap();
        assert_eq!(m.n_rows(), 81);
        assert_eq!(m.n_cols(), 50);
        let hc = m.labels().iter().filter(|&&l| l == Label::Hc).count();
        assert_eq!(hc, 32);
    }

    #[test]
    fn trials_multiply_rows_not_subjects() {
        let cfg = SynthConfig {
            n_hc: 4,
            n_sz: 6,
            trials_per_subject: 5,
            ..SynthConfig::default()
        };
        let m = generate(&cfg).unwrap().to_matrix().unwrap();
        assert_eq!(m.n_rows(), 50);
        let mut subjects: Vec<&String> = m.subject_ids().iter().collect();
        subjects.sort();
        subjects.dedup();
        assert_eq!(subjects.len(), 10);
    }

    #[test]
    fn same_seed_same_bytes() {
        let cfg = SynthConfig::default();
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a, b);
        let c = generate(&SynthConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(generate(&SynthConfig {
            n_hc: 0,
            ..SynthConfig::default()
        })
        .is_err());
        assert!(generate(&SynthConfig {
            effect_size: -1.0,
            ..SynthConfig::default()
        })
        .is_err());
        assert!(generate(&SynthConfig {
            trials_per_subject: 0,
            ..SynthConfig::default()
        })
        .is_err());
    }

    #[test]
    fn zero_effect_shows_no_aggregate_location_shift() {
        // 20 seeds x 9 N100 columns = 180 two-sample z tests at alpha 0.01;
        // Binomial(180, 0.01) exceeds 8 rejections with probability ~1e-4.
        let schema = ColumnSchema::canonical();
        let n100_cols: Vec<usize> = schema
            .columns()
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c.kind, ColumnKind::Erp(_, ErpComponent::N100)))
            .map(|(i, _)| i)
            .collect();
        assert_eq!(n100_cols.len(), 9);

        let mut rejections = 0;
        for seed in 0..20 {
            let cfg = SynthConfig {
                n_hc: 40,
                n_sz: 40,
                effect_size: 0.0,
                seed,
                ..SynthConfig::default()
            };
            let m = generate(&cfg).unwrap().to_matrix().unwrap();
            for &col in &n100_cols {
                let z = two_sample_z(&m, col);
                if z.abs() > 2.576 {
                    rejections += 1;
                }
            }
        }
        assert!(rejections <= 8, "got {rejections} rejections out of 180");
    }

    fn two_sample_z(m: &FeatureMatrix, col: usize) -> f64 {
        let mut groups: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        for r in 0..m.n_rows() {
            groups[usize::from(m.labels()[r] == Label::Hc)].push(m.value(r, col));
        }
        let stats = |v: &[f64]| {
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
            (mean, var, n)
        };
        let (m0, v0, n0) = stats(&groups[0]);
        let (m1, v1, n1) = stats(&groups[1]);
        (m1 - m0) / (v0 / n0 + v1 / n1).sqrt()
    }

    #[test]
    fn non_informative_columns_stay_unshifted_under_strong_effect() {
        // With the flag off, raw-electrode and demographic columns must show
        // no class shift even at effect 3: 10 seeds x 2 columns at alpha
        // 0.01 make more than 3 rejections vanishingly unlikely.
        let schema = ColumnSchema::canonical();
        let raw = schema.index_of("C4").unwrap();
        let age = schema.index_of("age").unwrap();
        let mut rejections = 0;
        for seed in 0..10 {
            let cfg = SynthConfig {
                n_hc: 40,
                n_sz: 40,
                effect_size: 3.0,
                seed: 100 + seed,
                ..SynthConfig::default()
            };
            let m = generate(&cfg).unwrap().to_matrix().unwrap();
            for col in [raw, age] {
                if two_sample_z(&m, col).abs() > 2.576 {
                    rejections += 1;
                }
            }
        }
        assert!(rejections <= 3, "got {rejections} rejections out of 20");
    }

    #[test]
    fn strong_effect_supports_single_column_threshold_oracle() {
        let cfg = SynthConfig {
            n_hc: 200,
            n_sz: 200,
            effect_size: 3.0,
            seed: 5,
            ..SynthConfig::default()
        };
        let m = generate(&cfg).unwrap().to_matrix().unwrap();
        let col = m.schema().index_of("Cz_N100").unwrap();
        let mut hc = Vec::new();
        let mut sz = Vec::new();
        for r in 0..m.n_rows() {
            match m.labels()[r] {
                Label::Hc => hc.push(m.value(r, col)),
                Label::Sz => sz.push(m.value(r, col)),
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let threshold = (mean(&hc) + mean(&sz)) / 2.0;
        // HC sits above SZ on N100 columns.
        let correct = hc.iter().filter(|&&v| v > threshold).count()
            + sz.iter().filter(|&&v| v <= threshold).count();
        let accuracy = correct as f64 / m.n_rows() as f64;
        assert!(accuracy >= 0.90, "threshold oracle accuracy {accuracy}");
    }

    #[test]
    fn informative_noise_dims_carry_signal_when_enabled() {
        let cfg = SynthConfig {
            n_hc: 150,
            n_sz: 150,
            effect_size: 3.0,
            noise_dims_informative: true,
            seed: 6,
            ..SynthConfig::default()
        };
        let m = generate(&cfg).unwrap().to_matrix().unwrap();
        let col = m.schema().index_of("C3").unwrap();
        let z = two_sample_z(&m, col);
        assert!(z > 10.0, "raw electrode column should separate, z = {z}");
        assert_eq!(informative_column_count(&cfg), 47);
    }

    #[test]
    fn bayes_accuracy_examples() {
        // No effect: the optimum is the larger prior.
        let cfg = SynthConfig {
            n_hc: 32,
            n_sz: 49,
            effect_size: 0.0,
            ..SynthConfig::default()
        };
        let b = bayes_accuracy(&cfg).unwrap();
        assert!((b - 49.0 / 81.0).abs() < 1e-12);

        // Single informative column, effect 3, equal priors: Phi(1.5).
        let single = bayes_accuracy_for_separation(3.0, 0.5, 0.5);
        assert!((single - 0.9332).abs() < 1e-4, "{single}");

        // Overwhelming effect: accuracy approaches 1.
        let huge = bayes_accuracy_for_separation(80.0, 0.5, 0.5);
        assert!(huge >= 1.0 - 1e-9);
    }

    #[test]
    fn bayes_accuracy_uses_nine_columns_by_default() {
        let cfg = SynthConfig {
            effect_size: 1.0,
            ..SynthConfig::default()
        };
        assert_eq!(informative_column_count(&cfg), 9);
        let b = bayes_accuracy(&cfg).unwrap();
        let expected = bayes_accuracy_for_separation(3.0, 32.0 / 81.0, 49.0 / 81.0);
        assert_eq!(b, expected);
    }
}
