//! `szclassify`: ingest ERP/EEG/demographic tables, rank features by
//! entropy, train and evaluate the three classifiers, run the two
//! feature-ablation experiments, and generate synthetic cohorts.
//!
//! Exit codes: 0 success, 1 data/runtime error, 2 usage error.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use szclassify_core::ablation::AblationMode;
use szclassify_core::error::{Error, Result};
use szclassify_core::eval::{SplitMode, SplitPolicy, SplitScheme};
use szclassify_core::knn::{DistanceMetric, KChoice, KnnConfig};
use szclassify_core::model::ModelConfig;
use szclassify_core::preprocess::BinningConfig;
use szclassify_core::schema::DatasetGroup;
use szclassify_core::svm::{GammaChoice, SvmConfig};
use szclassify_core::synth::SynthConfig;
use szclassify_core::tree::TreeConfig;

use commands::DataPaths;

#[derive(Parser)]
#[command(
    name = "szclassify",
    version,
    about = "ERP/EEG schizophrenia-vs-control classification experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the three input CSVs and summarize the merged matrix
    IngestCheck {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Rank feature columns by entropy (highest first)
    Rank {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value_t = GroupArg::All)]
        group: GroupArg,
        /// Equal-width bin count for discretization
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Fit one classifier on the full selected matrix and save it as JSON
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, value_enum, default_value_t = GroupArg::All)]
        group: GroupArg,
        #[arg(long)]
        no_standardize: bool,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        hyper: HyperArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Accuracy of (model x dataset-group) cells under a split protocol
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        /// Evaluate a single cell with this model
        #[arg(long, value_enum, required_unless_present = "all")]
        model: Option<ModelArg>,
        #[arg(long, value_enum, default_value_t = GroupArg::All)]
        group: GroupArg,
        /// Evaluate the full 3x3 model-by-group grid instead
        #[arg(long, conflicts_with_all = ["model", "group"])]
        all: bool,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        hyper: HyperArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Feature-removal experiments (leave-one-out or entropy-incremental)
    Ablate {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, value_enum, default_value_t = GroupArg::All)]
        group: GroupArg,
        /// Bin count for the entropy ranking
        #[arg(long, default_value_t = 10)]
        bins: usize,
        /// Also write (x, y) accuracy-trajectory pairs
        #[arg(long)]
        plot_data: bool,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        hyper: HyperArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Generate a synthetic two-class cohort in the canonical CSV schemas
    Synth {
        #[arg(long, default_value_t = 32)]
        n_hc: usize,
        #[arg(long, default_value_t = 49)]
        n_sz: usize,
        /// Standardized mean separation on the nine N100 columns
        #[arg(long, default_value_t = 1.0)]
        effect_size: f64,
        /// Extend the class shift to the non-N100 signal/timing columns
        #[arg(long)]
        noise_informative: bool,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct DataArgs {
    /// ERP averages CSV (subject,group,ITI,time_ms,<36 ERP columns>)
    #[arg(long)]
    erp: PathBuf,
    /// EEG trial features CSV (subject,group,<9 electrode columns>)
    #[arg(long)]
    eeg: PathBuf,
    /// Demographics CSV (subject,age,gender,education,group)
    #[arg(long)]
    demo: PathBuf,
}

impl DataArgs {
    fn paths(&self) -> DataPaths {
        DataPaths {
            erp: self.erp.clone(),
            eeg: self.eeg.clone(),
            demo: self.demo.clone(),
        }
    }
}

#[derive(Args)]
struct SplitArgs {
    /// Split granularity
    #[arg(long, value_enum, default_value_t = SplitArg::Trial)]
    split: SplitArg,
    /// kfold:K (append :unstratified to disable stratification) or holdout:F
    #[arg(long, default_value = "kfold:10", value_parser = parse_scheme)]
    scheme: SplitScheme,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Skip z-score standardization for SVM and k-NN inputs
    #[arg(long)]
    no_standardize: bool,
}

impl SplitArgs {
    fn policy(&self) -> SplitPolicy {
        SplitPolicy {
            mode: match self.split {
                SplitArg::Trial => SplitMode::TrialLevel,
                SplitArg::Subject => SplitMode::SubjectLevel,
            },
            scheme: self.scheme,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct HyperArgs {
    /// Decision-tree depth cap (unlimited when omitted)
    #[arg(long)]
    tree_max_depth: Option<usize>,
    /// Minimum rows an internal tree node needs to split
    #[arg(long, default_value_t = 2)]
    tree_min_samples_split: usize,
    /// k for k-NN: "auto" or a positive odd integer
    #[arg(long, default_value = "auto", value_parser = parse_knn_k)]
    knn_k: KChoice,
    /// SVM soft-margin parameter
    #[arg(long, default_value_t = 1.0)]
    svm_c: f64,
    /// SVM RBF gamma: "scale" or a positive real
    #[arg(long, default_value = "scale", value_parser = parse_gamma)]
    svm_gamma: GammaChoice,
    /// SVM KKT tolerance
    #[arg(long, default_value_t = 1e-3)]
    svm_tol: f64,
    /// SVM optimization sweep budget
    #[arg(long, default_value_t = 100)]
    svm_max_passes: usize,
}

impl HyperArgs {
    fn model_config(&self, which: ModelArg, seed: u64) -> ModelConfig {
        match which {
            ModelArg::Dt => ModelConfig::Tree(TreeConfig {
                max_depth: self.tree_max_depth,
                min_samples_split: self.tree_min_samples_split,
            }),
            ModelArg::Knn => ModelConfig::Knn(KnnConfig {
                k: self.knn_k,
                distance: DistanceMetric::Euclidean,
            }),
            ModelArg::Svm => ModelConfig::Svm(SvmConfig {
                c: self.svm_c,
                gamma: self.svm_gamma,
                tolerance: self.svm_tol,
                max_passes: self.svm_max_passes,
                seed,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Dt,
    Knn,
    Svm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupArg {
    /// ERP-component columns only
    Erp,
    /// Raw-electrode + timing + demographic columns
    EegDemo,
    /// Every column
    All,
}

impl From<GroupArg> for DatasetGroup {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::Erp => DatasetGroup::ErpOnly,
            GroupArg::EegDemo => DatasetGroup::EegDemographic,
            GroupArg::All => DatasetGroup::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SplitArg {
    Trial,
    Subject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    LeaveOneOut,
    EntropyIncremental,
}

impl From<ModeArg> for AblationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::LeaveOneOut => AblationMode::LeaveOneOut,
            ModeArg::EntropyIncremental => AblationMode::EntropyIncremental,
        }
    }
}

fn parse_scheme(s: &str) -> std::result::Result<SplitScheme, String> {
    let lower = s.to_ascii_lowercase();
    if let Some(rest) = lower.strip_prefix("kfold:") {
        let (folds_text, stratified) = match rest.strip_suffix(":unstratified") {
            Some(f) => (f, false),
            None => (rest, true),
        };
        let folds: usize = folds_text
            .parse()
            .map_err(|_| format!("invalid fold count '{folds_text}'"))?;
        if folds < 2 {
            return Err(format!("kfold requires at least 2 folds, got {folds}"));
        }
        return Ok(SplitScheme::KFold { folds, stratified });
    }
    if let Some(rest) = lower.strip_prefix("holdout:") {
        let test_fraction: f64 = rest
            .parse()
            .map_err(|_| format!("invalid holdout fraction '{rest}'"))?;
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(format!(
                "holdout fraction must be in (0, 1), got {test_fraction}"
            ));
        }
        return Ok(SplitScheme::Holdout { test_fraction });
    }
    Err(format!(
        "expected kfold:K, kfold:K:unstratified, or holdout:F, got '{s}'"
    ))
}

fn parse_knn_k(s: &str) -> std::result::Result<KChoice, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(KChoice::Auto);
    }
    let k: usize = s
        .parse()
        .map_err(|_| format!("expected 'auto' or a positive odd integer, got '{s}'"))?;
    if k == 0 || k.is_multiple_of(2) {
        return Err(format!("k must be a positive odd integer, got {k}"));
    }
    Ok(KChoice::Fixed(k))
}

fn parse_gamma(s: &str) -> std::result::Result<GammaChoice, String> {
    if s.eq_ignore_ascii_case("scale") {
        return Ok(GammaChoice::Scale);
    }
    let g: f64 = s
        .parse()
        .map_err(|_| format!("expected 'scale' or a positive real, got '{s}'"))?;
    if !(g > 0.0 && g.is_finite()) {
        return Err(format!("gamma must be positive, got {g}"));
    }
    Ok(GammaChoice::Fixed(g))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::IngestCheck { data, out } => commands::ingest_check(&data.paths(), &out),
        Command::Rank {
            data,
            group,
            bins,
            out,
        } => {
            let bins = BinningConfig::new(bins)?;
            commands::rank(&data.paths(), group.into(), &bins, &out)
        }
        Command::Train {
            data,
            model,
            group,
            no_standardize,
            seed,
            hyper,
            out,
        } => {
            let cfg = hyper.model_config(model, seed);
            commands::train(
                &data.paths(),
                &cfg,
                group.into(),
                !no_standardize,
                seed,
                &out,
            )
        }
        Command::Evaluate {
            data,
            model,
            group,
            all,
            split,
            hyper,
            out,
        } => {
            let policy = split.policy();
            let cells: Vec<(ModelConfig, DatasetGroup)> = if all {
                let mut cells = Vec::new();
                for m in [ModelArg::Svm, ModelArg::Dt, ModelArg::Knn] {
                    for g in [GroupArg::Erp, GroupArg::EegDemo, GroupArg::All] {
                        cells.push((hyper.model_config(m, split.seed), g.into()));
                    }
                }
                cells
            } else {
                let m = model.ok_or_else(|| Error::InvalidConfig {
                    reason: "--model is required without --all".to_string(),
                })?;
                vec![(hyper.model_config(m, split.seed), group.into())]
            };
            commands::evaluate_cells(
                &data.paths(),
                &cells,
                all,
                &policy,
                !split.no_standardize,
                &out,
            )
        }
        Command::Ablate {
            data,
            mode,
            model,
            group,
            bins,
            plot_data,
            split,
            hyper,
            out,
        } => {
            let policy = split.policy();
            let bins = BinningConfig::new(bins)?;
            let cfg = hyper.model_config(model, split.seed);
            commands::ablate(
                &data.paths(),
                mode.into(),
                &cfg,
                group.into(),
                &policy,
                !split.no_standardize,
                &bins,
                plot_data,
                &out,
            )
        }
        Command::Synth {
            n_hc,
            n_sz,
            effect_size,
            noise_informative,
            trials,
            seed,
            out,
        } => {
            let cfg = SynthConfig {
                n_hc,
                n_sz,
                effect_size,
                noise_dims_informative: noise_informative,
                trials_per_subject: trials,
                seed,
            };
            commands::synth(&cfg, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
