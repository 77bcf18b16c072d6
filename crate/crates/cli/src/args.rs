use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "coughgate", version, about = "Cough-sound COVID-19 classification experiments")]
pub struct Cli {
    /// Worker threads for folds, grid points and feature extraction (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract MFCC feature vectors from a corpus.
    Extract(ExtractArgs),
    /// Leave-one-out evaluation of one or all classifiers.
    Evaluate(EvaluateArgs),
    /// Sweep one hyperparameter over its grid.
    Grid(GridArgs),
    /// Sequential forward feature selection.
    Sfs(SfsArgs),
    /// Run the full staged study and write a result bundle.
    Reproduce(ReproduceArgs),
    /// Write the synthetic corpus as WAV files plus a manifest.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct SourceArgs {
    /// Corpus manifest CSV (path,label,dataset,excluded,note).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Feature JSON written by `extract`.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Use the built-in synthetic corpus.
    #[arg(long)]
    pub synthetic: bool,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Seed of the synthetic corpus.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Clips per class in the synthetic corpus.
    #[arg(long, default_value_t = 20)]
    pub per_class: usize,
    /// Scale each clip to unit peak amplitude after resampling.
    #[arg(long)]
    pub peak_normalize: bool,
}

#[derive(Debug, Args)]
pub struct MfccArgs {
    /// Frame length in samples (power of two); hop is half of it.
    #[arg(long, default_value_t = 2048)]
    pub frame_length: usize,
    /// Number of cepstral coefficients kept.
    #[arg(long, default_value_t = 19)]
    pub n_mfcc: usize,
    /// Leading frames averaged into the feature vector, or `all`.
    #[arg(long, default_value = "17")]
    pub segments: String,
    /// Mel filter count.
    #[arg(long, default_value_t = 40)]
    pub n_filters: usize,
    /// Drop coefficient 0 (frame log-energy).
    #[arg(long)]
    pub no_c0: bool,
}

#[derive(Debug, Args)]
pub struct ClassifierArgs {
    /// Classifier name (poly-svm, rbf-svm, linear-lda, quadratic-lda, knn-euclidean, knn-chebyshev, plsr).
    #[arg(long, conflicts_with = "all_classifiers")]
    pub classifier: Option<String>,
    /// Run every classifier.
    #[arg(long)]
    pub all_classifiers: bool,
    /// Neighbours for the k-NN classifiers.
    #[arg(long)]
    pub k: Option<usize>,
    /// RBF kernel width.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Polynomial kernel order.
    #[arg(long)]
    pub order: Option<u32>,
    /// Covariance shrinkage for the discriminant classifiers.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Shrinkage for quadratic LDA only (overrides --gamma for it).
    #[arg(long)]
    pub qda_gamma: Option<f64>,
    /// PLS components.
    #[arg(long)]
    pub components: Option<usize>,
    /// SVM box constraint.
    #[arg(long, default_value_t = 1.0)]
    pub cost: f64,
    /// Z-score features using training-fold statistics.
    #[arg(long)]
    pub standardize: bool,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub mfcc: MfccArgs,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub mfcc: MfccArgs,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    /// Also fit each classifier on the whole dataset and save it under models/.
    #[arg(long)]
    pub save_models: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub mfcc: MfccArgs,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    /// Axis to sweep: frame-length, n-mfcc, n-segments, sigma, order, lda-gamma, qda-gamma, k, components.
    #[arg(long)]
    pub axis: String,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SfsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub mfcc: MfccArgs,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Mel filter count.
    #[arg(long, default_value_t = 40)]
    pub n_filters: usize,
    /// Drop coefficient 0 (frame log-energy).
    #[arg(long)]
    pub no_c0: bool,
    /// SVM box constraint.
    #[arg(long, default_value_t = 1.0)]
    pub cost: f64,
    /// Z-score features using training-fold statistics.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub per_class: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}
