//! `qembed`: cross-validated evaluation, training, prediction, embedding
//! export and 2D projection for labeled question corpora.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qembed::corpus::DataFormat;
use qembed::embed::EmbeddingKind;
use qembed::Exec;

use commands::QuestionSource;
use config::{RunArgs, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(qembed::Error),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    /// 2 usage/config, 3 data or model format, 4 numeric failure.
    fn exit_code(&self) -> u8 {
        use qembed::Error as E;
        match self {
            CliError::Usage(_) | CliError::Core(E::InvalidArgument(_)) => 2,
            CliError::Core(E::Io { .. } | E::Parse { .. } | E::Version(_) | E::Shape(_)) => 3,
            CliError::Core(E::Numeric(_) | E::NonFinite(_)) => 4,
        }
    }
}

impl From<qembed::Error> for CliError {
    fn from(e: qembed::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qembed", version, about = "Entropy-based question embeddings and baselines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cross-validate one or more methods and report per-class F1.
    Eval {
        #[command(flatten)]
        run: RunArgs,
        /// Extra methods to evaluate alongside --method, comma separated.
        #[arg(long, value_delimiter = ',')]
        compare: Vec<EmbeddingKind>,
        /// Directory for report.txt and report.tsv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit embedding and classifier on the whole corpus and save them.
    Train {
        #[command(flatten)]
        run: RunArgs,
        /// Model directory to create.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print `label<TAB>score` for each question.
    Predict {
        #[command(flatten)]
        model: ModelArgs,
        /// Question text; repeatable. Without it, reads --data or stdin lines.
        #[arg(long)]
        question: Vec<String>,
        /// Corpus whose `text` column is classified.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Write question vectors (and word vectors when available).
    Embed {
        #[command(flatten)]
        model: ModelArgs,
        /// Corpus to embed.
        #[arg(long)]
        data: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write `id<TAB>x<TAB>y` 2D coordinates of question vectors.
    Project {
        #[command(flatten)]
        model: ModelArgs,
        /// Corpus to embed.
        #[arg(long)]
        data: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for the projection sketch.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Directory written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long)]
    format: Option<DataFormat>,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

impl ModelArgs {
    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Eval { run, compare, out } => commands::eval(RunConfig::resolve(run, compare, out)?),
        Command::Train { run, out } => commands::train(RunConfig::resolve(run, Vec::new(), out)?),
        Command::Predict { model, question, data } => commands::predict_cmd(
            &model.model,
            QuestionSource {
                questions: question,
                data,
                format: model.format,
            },
            model.exec(),
        ),
        Command::Embed { model, data, out } => {
            commands::embed_cmd(&model.model, &data, model.format, &out, model.exec())
        }
        Command::Project { model, data, out, seed } => {
            commands::project_cmd(&model.model, &data, model.format, out.as_deref(), seed, model.exec())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `qembed --help` for usage");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
