//! Command bodies: thin orchestration over the library, plus file output
//! and the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::json;

use szclassify_core::ablation::{self, AblationMode};
use szclassify_core::data::{load_table, merge, FeatureMatrix, RawTable};
use szclassify_core::error::{Error, Result};
use szclassify_core::eval::{evaluate, EvalResult, SplitPolicy};
use szclassify_core::model::{self, ModelConfig};
use szclassify_core::preprocess::{apply_standardizer, fit_standardizer, BinningConfig};
use szclassify_core::schema::{DatasetGroup, Label, TableKind};
use szclassify_core::synth::{bayes_accuracy, generate, SynthConfig};
use szclassify_core::{entropy, Electrode};

use crate::manifest::write_manifest;

pub struct DataPaths {
    pub erp: PathBuf,
    pub eeg: PathBuf,
    pub demo: PathBuf,
}

impl DataPaths {
    fn all(&self) -> Vec<PathBuf> {
        vec![self.erp.clone(), self.eeg.clone(), self.demo.clone()]
    }
}

fn load_tables(paths: &DataPaths) -> Result<(RawTable, RawTable, RawTable)> {
    Ok((
        load_table(&paths.erp, TableKind::ErpAverages)?,
        load_table(&paths.eeg, TableKind::EegTrials)?,
        load_table(&paths.demo, TableKind::Demographics)?,
    ))
}

fn load_matrix(paths: &DataPaths, group: DatasetGroup) -> Result<FeatureMatrix> {
    let (erp, eeg, demo) = load_tables(paths)?;
    let dropped = erp.dropped_rows + eeg.dropped_rows + demo.dropped_rows;
    if dropped > 0 {
        eprintln!("note: dropped {dropped} row(s) with missing cells during ingestion");
    }
    merge(&erp, &eeg, &demo)?.select_group(group)
}

fn ensure_out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })
}

fn write_output(out_dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = out_dir.join(name);
    std::fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Validates the three tables and summarizes the merged matrix.
pub fn ingest_check(paths: &DataPaths, out_dir: &Path) -> Result<()> {
    let (erp, eeg, demo) = load_tables(paths)?;
    let m = merge(&erp, &eeg, &demo)?;
    let sz = m.labels().iter().filter(|&&l| l == Label::Sz).count();
    let mut subjects: Vec<&String> = m.subject_ids().iter().collect();
    subjects.sort();
    subjects.dedup();

    let report = json!({
        "rows": m.n_rows(),
        "columns": m.n_cols(),
        "subjects": subjects.len(),
        "sz_rows": sz,
        "hc_rows": m.n_rows() - sz,
        "dropped_rows": {
            "erp_averages": erp.dropped_rows,
            "eeg_trials": eeg.dropped_rows,
            "demographics": demo.dropped_rows,
        },
    });
    println!(
        "ok: {} rows x {} columns from {} subjects ({} SZ / {} HC rows)",
        m.n_rows(),
        m.n_cols(),
        subjects.len(),
        sz,
        m.n_rows() - sz
    );

    ensure_out_dir(out_dir)?;
    let report_path = write_output(
        out_dir,
        "ingest_report.json",
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    write_manifest(out_dir, None, report, &paths.all(), &[report_path])?;
    Ok(())
}

/// Entropy ranking of the selected columns as `ranking.csv`.
pub fn rank(
    paths: &DataPaths,
    group: DatasetGroup,
    bins: &BinningConfig,
    out_dir: &Path,
) -> Result<()> {
    let m = load_matrix(paths, group)?;
    let ranking = entropy::rank_features(&m, bins)?;
    ensure_out_dir(out_dir)?;
    let csv_path = write_output(out_dir, "ranking.csv", &ranking.to_csv())?;
    println!(
        "ranked {} columns; highest entropy: {}",
        ranking.scores().len(),
        ranking.scores()[0].column
    );
    write_manifest(
        out_dir,
        None,
        json!({ "group": group, "bins": bins.bin_count }),
        &paths.all(),
        &[csv_path],
    )?;
    Ok(())
}

/// Fits one model on the full selected matrix and saves it as JSON.
pub fn train(
    paths: &DataPaths,
    model_cfg: &ModelConfig,
    group: DatasetGroup,
    standardize: bool,
    seed: u64,
    out_dir: &Path,
) -> Result<()> {
    let m = load_matrix(paths, group)?;
    let train_m = if standardize && model_cfg.wants_standardized_inputs() {
        let state = fit_standardizer(&m)?;
        apply_standardizer(&state, &m)?
    } else {
        m
    };
    let fitted = model::fit(&train_m, model_cfg)?;
    ensure_out_dir(out_dir)?;
    let name = format!("model_{}_{}.json", model_cfg.name(), group);
    let path = write_output(out_dir, &name, &model::to_json(&fitted)?)?;
    println!("saved {}", path.display());
    write_manifest(
        out_dir,
        Some(seed),
        json!({ "model": model_cfg, "group": group, "standardize": standardize }),
        &paths.all(),
        &[path],
    )?;
    Ok(())
}

/// Evaluates the requested (model, group) cells; `grid` additionally emits
/// the 3x3 results table with models as rows and dataset groups as columns.
pub fn evaluate_cells(
    paths: &DataPaths,
    cells: &[(ModelConfig, DatasetGroup)],
    grid: bool,
    policy: &SplitPolicy,
    standardize: bool,
    out_dir: &Path,
) -> Result<()> {
    ensure_out_dir(out_dir)?;
    let mut outputs = Vec::new();
    let mut grid_cells: BTreeMap<(&'static str, &'static str), f64> = BTreeMap::new();

    for (model_cfg, group) in cells {
        let m = load_matrix(paths, *group)?;
        let result = evaluate(&m, model_cfg, policy, standardize)?;
        println!(
            "{} on {}: accuracy {:.4} over {} fold(s)",
            model_cfg.name(),
            group,
            result.accuracy,
            result.per_fold.len()
        );
        let stem = format!("evaluate_{}_{}", model_cfg.name(), group);
        outputs.push(write_output(
            out_dir,
            &format!("{stem}.json"),
            &result.to_json(),
        )?);
        outputs.push(write_output(
            out_dir,
            &format!("{stem}.csv"),
            &format!(
                "{}\n{}\n",
                EvalResult::CSV_HEADER,
                result.to_csv_row(group.as_str())
            ),
        )?);
        grid_cells.insert((model_cfg.name(), group.as_str()), result.accuracy);
    }

    if grid {
        let mut table = String::from("model,erp,eeg_demographic,all\n");
        for model_name in ["svm", "dt", "knn"] {
            let cell = |group: &'static str| {
                grid_cells
                    .get(&(model_name, group))
                    .map(|a| a.to_string())
                    .unwrap_or_default()
            };
            table.push_str(&format!(
                "{model_name},{},{},{}\n",
                cell("erp"),
                cell("eeg-demo"),
                cell("all")
            ));
        }
        outputs.push(write_output(out_dir, "results_table.csv", &table)?);
    }

    write_manifest(
        out_dir,
        Some(policy.seed),
        json!({
            "cells": cells
                .iter()
                .map(|(m, g)| json!({ "model": m, "group": g }))
                .collect::<Vec<_>>(),
            "policy": policy,
            "standardize": standardize,
        }),
        &paths.all(),
        &outputs,
    )?;
    Ok(())
}

/// Runs one ablation experiment and writes its report files.
#[allow(clippy::too_many_arguments)]
pub fn ablate(
    paths: &DataPaths,
    mode: AblationMode,
    model_cfg: &ModelConfig,
    group: DatasetGroup,
    policy: &SplitPolicy,
    standardize: bool,
    bins: &BinningConfig,
    plot_data: bool,
    out_dir: &Path,
) -> Result<()> {
    let m = load_matrix(paths, group)?;
    let report = match mode {
        AblationMode::LeaveOneOut => {
            ablation::run_leave_one_out(&m, model_cfg, policy, standardize)?
        }
        AblationMode::EntropyIncremental => {
            ablation::run_entropy_incremental(&m, model_cfg, policy, standardize, bins)?
        }
    };

    println!(
        "{} on {} ({}): baseline {:.4}, {} removal step(s)",
        mode.as_str(),
        group,
        model_cfg.name(),
        report.baseline_accuracy,
        report.records.len()
    );

    ensure_out_dir(out_dir)?;
    let stem = format!("ablation_{}_{}_{}", mode.as_str(), model_cfg.name(), group);
    let mut outputs = vec![
        write_output(out_dir, &format!("{stem}.csv"), &report.to_csv())?,
        write_output(out_dir, &format!("{stem}.json"), &report.to_json())?,
    ];
    if plot_data {
        outputs.push(write_output(
            out_dir,
            &format!("{stem}_plot.csv"),
            &report.to_plot_data(),
        )?);
    }

    write_manifest(
        out_dir,
        Some(policy.seed),
        json!({
            "mode": mode,
            "model": model_cfg,
            "group": group,
            "policy": policy,
            "standardize": standardize,
            "bins": bins.bin_count,
        }),
        &paths.all(),
        &outputs,
    )?;
    Ok(())
}

/// Generates a synthetic cohort into the three canonical CSVs plus a
/// deterministic synthesis manifest.
pub fn synth(cfg: &SynthConfig, out_dir: &Path) -> Result<()> {
    let tables = generate(cfg)?;
    let bayes = bayes_accuracy(cfg)?;
    ensure_out_dir(out_dir)?;
    let erp = write_output(out_dir, "erp_averages.csv", &tables.erp_csv)?;
    let eeg = write_output(out_dir, "eeg_trials.csv", &tables.eeg_csv)?;
    let demo = write_output(out_dir, "demographics.csv", &tables.demo_csv)?;

    // This manifest is part of the generated artifact and carries no
    // timestamp, so identical configs produce identical bytes.
    let synth_manifest = json!({
        "config": cfg,
        "bayes_accuracy": bayes,
        "informative_columns": szclassify_core::synth::informative_column_count(cfg),
        "n100_columns": Electrode::ALL
            .iter()
            .map(|e| format!("{e}_N100"))
            .collect::<Vec<_>>(),
        "files": ["erp_averages.csv", "eeg_trials.csv", "demographics.csv"],
    });
    let manifest_path = write_output(
        out_dir,
        "synth_manifest.json",
        &serde_json::to_string_pretty(&synth_manifest).expect("manifest serializes"),
    )?;

    println!(
        "wrote {} subjects x {} trial(s) to {} (Bayes accuracy {:.4})",
        cfg.n_hc + cfg.n_sz,
        cfg.trials_per_subject,
        out_dir.display(),
        bayes
    );
    write_manifest(
        out_dir,
        Some(cfg.seed),
        json!({ "synth": cfg, "bayes_accuracy": bayes }),
        &[],
        &[erp, eeg, demo, manifest_path],
    )?;
    Ok(())
}
