//! End-to-end library flow: generate a cohort to disk, ingest it through
//! the CSV path, evaluate all three models on each dataset group, and run
//! a short ablation — the same journey the CLI orchestrates.

use std::collections::HashSet;

use szclassify_core::ablation::run_entropy_incremental;
use szclassify_core::data::{load_table, merge};
use szclassify_core::entropy::rank_features;
use szclassify_core::eval::{evaluate, SplitMode, SplitPolicy, SplitScheme};
use szclassify_core::knn::KnnConfig;
use szclassify_core::model::{self, ModelConfig};
use szclassify_core::preprocess::BinningConfig;
use szclassify_core::schema::{DatasetGroup, TableKind};
use szclassify_core::svm::SvmConfig;
use szclassify_core::synth::{generate, SynthConfig};
use szclassify_core::tree::TreeConfig;

#[test]
fn cohort_files_round_trip_through_the_whole_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SynthConfig {
        n_hc: 20,
        n_sz: 25,
        effect_size: 2.0,
        noise_dims_informative: false,
        trials_per_subject: 2,
        seed: 21,
    };
    let tables = generate(&cfg).unwrap();
    let erp_path = dir.path().join("erp_averages.csv");
    let eeg_path = dir.path().join("eeg_trials.csv");
    let demo_path = dir.path().join("demographics.csv");
    std::fs::write(&erp_path, &tables.erp_csv).unwrap();
    std::fs::write(&eeg_path, &tables.eeg_csv).unwrap();
    std::fs::write(&demo_path, &tables.demo_csv).unwrap();

    let m = merge(
        &load_table(&erp_path, TableKind::ErpAverages).unwrap(),
        &load_table(&eeg_path, TableKind::EegTrials).unwrap(),
        &load_table(&demo_path, TableKind::Demographics).unwrap(),
    )
    .unwrap();
    assert_eq!(m.n_rows(), 90);
    assert_eq!(m.n_cols(), 50);
    // File ingestion equals the in-memory path.
    assert_eq!(m, tables.to_matrix().unwrap());

    let policy = SplitPolicy {
        mode: SplitMode::SubjectLevel,
        scheme: SplitScheme::KFold {
            folds: 4,
            stratified: true,
        },
        seed: 21,
    };
    let models = [
        ModelConfig::Tree(TreeConfig::default()),
        ModelConfig::Knn(KnnConfig::default()),
        ModelConfig::Svm(SvmConfig {
            seed: 21,
            ..SvmConfig::default()
        }),
    ];

    // The N100 signal lives in the ERP columns: ERP-only and ALL separate
    // well, the signal-free EEG+demographic group cannot beat chance by much.
    for model_cfg in &models {
        let erp_acc = evaluate(
            &m.select_group(DatasetGroup::ErpOnly).unwrap(),
            model_cfg,
            &policy,
            true,
        )
        .unwrap()
        .accuracy;
        let all_acc = evaluate(
            &m.select_group(DatasetGroup::All).unwrap(),
            model_cfg,
            &policy,
            true,
        )
        .unwrap()
        .accuracy;
        let noise_acc = evaluate(
            &m.select_group(DatasetGroup::EegDemographic).unwrap(),
            model_cfg,
            &policy,
            true,
        )
        .unwrap()
        .accuracy;
        assert!(erp_acc >= 0.85, "{}: erp {erp_acc}", model_cfg.name());
        assert!(all_acc >= 0.85, "{}: all {all_acc}", model_cfg.name());
        assert!(
            noise_acc <= 0.75,
            "{}: eeg-demo {noise_acc}",
            model_cfg.name()
        );
    }

    // Fit-save-load round trip predicts identically.
    let fitted = model::fit(&m, &ModelConfig::Tree(TreeConfig::default())).unwrap();
    let path = dir.path().join("model.json");
    model::save(&fitted, &path).unwrap();
    let reloaded = model::load(&path).unwrap();
    assert_eq!(fitted.predict(&m).unwrap(), reloaded.predict(&m).unwrap());

    // Ranking covers every column; a short incremental ablation runs on the
    // small EEG+demographic group and keeps its cardinality contract.
    let ranking = rank_features(&m, &BinningConfig::default()).unwrap();
    assert_eq!(ranking.scores().len(), 50);
    let names: HashSet<&str> = ranking.column_order().collect();
    assert_eq!(names.len(), 50);

    let small = m.select_group(DatasetGroup::EegDemographic).unwrap();
    let report = run_entropy_incremental(
        &small,
        &ModelConfig::Tree(TreeConfig::default()),
        &policy,
        false,
        &BinningConfig::default(),
    )
    .unwrap();
    assert_eq!(report.records.len(), small.n_cols() - 1);
    assert_eq!(report.records.last().unwrap().remaining_count, 1);
}
