use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use qembed::classify::Hyperparams;
use qembed::corpus::{DataFormat, FoldStrategy};
use qembed::embed::{Averaging, EmbeddingKind, DEFAULT_WINDOW, ENTROPY_FILL};
use qembed::preprocess::{load_rules, load_stopwords, NormalizerSpec, PreprocessConfig, Script};
use qembed::Exec;

use crate::CliError;

/// Flags shared by every subcommand that reads a corpus and fits a model.
#[derive(Args, Debug, Default)]
pub struct RunArgs {
    /// TOML file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Labeled corpus with `text` and `label` columns.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long)]
    pub format: Option<DataFormat>,
    /// Embedding: entropy, tfidf, pmi-vsm or external [default: entropy].
    #[arg(long)]
    pub method: Option<EmbeddingKind>,
    /// Target dimension for entropy and pmi-vsm embeddings [default: 200].
    #[arg(long)]
    pub dim: Option<usize>,
    /// PMI co-occurrence window radius [default: 2].
    #[arg(long)]
    pub window: Option<usize>,
    /// Entropy value for words absent from a question [default: -0.0001].
    #[arg(long, allow_hyphen_values = true)]
    pub fill: Option<f64>,
    /// Count repeated words once per occurrence when averaging word vectors.
    #[arg(long)]
    pub multiset: bool,
    /// Cross-validation folds [default: 5].
    #[arg(long)]
    pub folds: Option<usize>,
    /// Preserve class proportions in every fold.
    #[arg(long)]
    pub stratified: bool,
    /// Seed for fold assignment, SVD sketches and classifier init [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Stopword list, one token per line.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Substitution rules, `pattern<TAB>replacement` per line.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Pretrained word vectors for `--method external`.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Keep tokens that contain digits.
    #[arg(long)]
    pub keep_digits: bool,
    /// Drop tokens with letters outside this script.
    #[arg(long)]
    pub script: Option<Script>,
    /// Token normalizer: lowercase, identity or prefix:N.
    #[arg(long)]
    pub normalizer: Option<NormalizerSpec>,
    /// L2 penalty on classifier weights [default: 1e-4].
    #[arg(long)]
    pub l2: Option<f64>,
    /// Gradient-descent step size [default: 0.1].
    #[arg(long)]
    pub lr: Option<f64>,
    /// Maximum gradient-descent epochs [default: 1000].
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Gradient-norm stopping threshold [default: 1e-6].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Run on one thread.
    #[arg(long)]
    pub sequential: bool,
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    data: Option<PathBuf>,
    format: Option<String>,
    method: Option<String>,
    compare: Option<Vec<String>>,
    dim: Option<usize>,
    window: Option<usize>,
    fill: Option<f64>,
    multiset: Option<bool>,
    folds: Option<usize>,
    stratified: Option<bool>,
    seed: Option<u64>,
    stopwords: Option<PathBuf>,
    rules: Option<PathBuf>,
    vectors: Option<PathBuf>,
    keep_digits: Option<bool>,
    script: Option<String>,
    normalizer: Option<String>,
    l2: Option<f64>,
    lr: Option<f64>,
    epochs: Option<usize>,
    tol: Option<f64>,
    sequential: Option<bool>,
    out: Option<PathBuf>,
}

/// Fully resolved settings: flags, then config file, then defaults.
#[derive(Debug)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub format: Option<DataFormat>,
    pub method: EmbeddingKind,
    pub compare: Vec<EmbeddingKind>,
    pub dim: usize,
    pub window: usize,
    pub fill: f64,
    pub averaging: Averaging,
    pub folds: usize,
    pub strategy: FoldStrategy,
    pub seed: u64,
    pub vectors: Option<PathBuf>,
    pub preprocess: PreprocessConfig,
    pub hyperparams: Hyperparams,
    pub exec: Exec,
    pub out: Option<PathBuf>,
}

fn parse_opt<T: std::str::FromStr<Err = qembed::Error>>(value: Option<String>) -> Result<Option<T>, CliError> {
    value.map(|v| v.parse::<T>()).transpose().map_err(CliError::from)
}

impl RunConfig {
    pub fn resolve(args: RunArgs, compare: Vec<EmbeddingKind>, out: Option<PathBuf>) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let file_compare = file
            .compare
            .unwrap_or_default()
            .into_iter()
            .map(|m| m.parse::<EmbeddingKind>())
            .collect::<Result<Vec<_>, _>>()?;

        let mut preprocess = PreprocessConfig::default();
        if let Some(path) = args.stopwords.or(file.stopwords) {
            preprocess.stopwords = load_stopwords(path)?;
        }
        if let Some(path) = args.rules.or(file.rules) {
            preprocess.rules = load_rules(path)?;
        }
        preprocess.drop_digit_tokens = !(args.keep_digits || file.keep_digits.unwrap_or(false));
        preprocess.allowed_script = args.script.or(parse_opt(file.script)?);
        if let Some(n) = args.normalizer.or(parse_opt(file.normalizer)?) {
            preprocess.normalizer = n;
        }

        let seed = args.seed.or(file.seed).unwrap_or(42);
        let defaults = Hyperparams::default();
        let hyperparams = Hyperparams {
            l2: args.l2.or(file.l2).unwrap_or(defaults.l2),
            learning_rate: args.lr.or(file.lr).unwrap_or(defaults.learning_rate),
            max_epochs: args.epochs.or(file.epochs).unwrap_or(defaults.max_epochs),
            tol: args.tol.or(file.tol).unwrap_or(defaults.tol),
            seed,
            init_scale: defaults.init_scale,
        };
        hyperparams.validate()?;

        let config = RunConfig {
            data: args.data.or(file.data),
            format: args.format.or(parse_opt(file.format)?),
            method: args.method.or(parse_opt(file.method)?).unwrap_or(EmbeddingKind::Entropy),
            compare: if compare.is_empty() { file_compare } else { compare },
            dim: args.dim.or(file.dim).unwrap_or(200),
            window: args.window.or(file.window).unwrap_or(DEFAULT_WINDOW),
            fill: args.fill.or(file.fill).unwrap_or(ENTROPY_FILL),
            averaging: if args.multiset || file.multiset.unwrap_or(false) {
                Averaging::Multiset
            } else {
                Averaging::Set
            },
            folds: args.folds.or(file.folds).unwrap_or(5),
            strategy: if args.stratified || file.stratified.unwrap_or(false) {
                FoldStrategy::Stratified
            } else {
                FoldStrategy::Shuffled
            },
            seed,
            vectors: args.vectors.or(file.vectors),
            preprocess,
            hyperparams,
            exec: if args.sequential || file.sequential.unwrap_or(false) {
                Exec::Sequential
            } else {
                Exec::Parallel
            },
            out: out.or(file.out),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let uses_external = self.methods().contains(&EmbeddingKind::External);
        if uses_external && self.vectors.is_none() {
            return Err(CliError::usage("method `external` requires --vectors <path>"));
        }
        if self.dim == 0 {
            return Err(CliError::usage("--dim must be at least 1"));
        }
        if self.window == 0 {
            return Err(CliError::usage("--window must be at least 1"));
        }
        if self.folds < 2 {
            return Err(CliError::usage("--folds must be at least 2"));
        }
        if !self.fill.is_finite() {
            return Err(CliError::usage("--fill must be finite"));
        }
        Ok(())
    }

    /// Primary method followed by the comparison methods, without repeats.
    pub fn methods(&self) -> Vec<EmbeddingKind> {
        let mut methods = vec![self.method];
        for &m in &self.compare {
            if !methods.contains(&m) {
                methods.push(m);
            }
        }
        methods
    }

    pub fn data_path(&self) -> Result<&Path, CliError> {
        self.data
            .as_deref()
            .ok_or_else(|| CliError::usage("--data <path> is required"))
    }

    pub fn data_format(&self) -> DataFormat {
        self.format
            .unwrap_or_else(|| self.data.as_deref().map_or(DataFormat::Tsv, format_from_extension))
    }
}

pub fn format_from_extension(path: &Path) -> DataFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => DataFormat::Csv,
        _ => DataFormat::Tsv,
    }
}
