use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use qembed::classify::{predict, LogRegModel};
use qembed::corpus::{class_distribution, load_corpus, Corpus, DataFormat};
use qembed::embed::{embed_batch, load_external_vectors, project_2d, write_word_vectors, EmbeddingKind, EmbeddingModel};
use qembed::evaluate::{
    cross_validate, render_detail, render_f1_table, render_tsv, CvConfig, CvResult, MethodConfig, TrainedPipeline,
};
use qembed::preprocess::{PreprocessConfig, Preprocessor};
use qembed::Exec;

use crate::config::{format_from_extension, RunConfig};
use crate::CliError;

const EMBEDDING_FILE: &str = "embedding.model";
const CLASSIFIER_FILE: &str = "classifier.model";
const PREPROCESS_FILE: &str = "preprocess.toml";

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| qembed::Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| qembed::Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

fn load_checked_corpus(config: &RunConfig) -> Result<Corpus, CliError> {
    let corpus = load_corpus(config.data_path()?, config.data_format())?;
    let distribution = class_distribution(&corpus);
    eprintln!("{distribution}");
    for label in distribution.underrepresented() {
        eprintln!("warning: class {label} has fewer than half the mean number of questions");
    }
    Ok(corpus)
}

fn method_config(config: &RunConfig, kind: EmbeddingKind, external: Option<Arc<EmbeddingModel>>) -> MethodConfig {
    MethodConfig {
        dim: config.dim,
        window: config.window,
        fill: config.fill,
        averaging: config.averaging,
        external,
        ..MethodConfig::new(kind)
    }
}

fn load_external(config: &RunConfig) -> Result<Option<Arc<EmbeddingModel>>, CliError> {
    if !config.methods().contains(&EmbeddingKind::External) {
        return Ok(None);
    }
    let path = config.vectors.as_deref().expect("validated with the config");
    Ok(Some(Arc::new(load_external_vectors(path)?)))
}

fn fold_notes(name: &str, result: &CvResult) {
    for fold in &result.folds {
        if !fold.missing_classes.is_empty() {
            eprintln!(
                "warning: {name} fold {}: no training questions for {}",
                fold.fold + 1,
                fold.missing_classes.join(", ")
            );
        }
        if fold.empty_embeddings > 0 {
            eprintln!(
                "note: {name} fold {}: {} test questions had no known words",
                fold.fold + 1,
                fold.empty_embeddings
            );
        }
    }
}

pub fn eval(config: RunConfig) -> Result<(), CliError> {
    let corpus = load_checked_corpus(&config)?;
    let external = load_external(&config)?;
    let cv = CvConfig {
        folds: config.folds,
        seed: config.seed,
        strategy: config.strategy,
        exec: config.exec,
    };
    let mut results = Vec::new();
    for kind in config.methods() {
        let method = method_config(&config, kind, external.clone());
        let result = cross_validate(&corpus, &config.preprocess, &method, &config.hyperparams, &cv)?;
        fold_notes(kind.name(), &result);
        results.push((kind.name(), result));
    }

    let pooled: Vec<(&str, _)> = results.iter().map(|(n, r)| (*n, &r.pooled)).collect();
    let mut text = format!(
        "{} questions, {} classes, {}-fold {} cross-validation, seed {}\n\n",
        corpus.len(),
        corpus.labels().len(),
        config.folds,
        config.strategy,
        config.seed
    );
    text.push_str(&render_f1_table(&pooled));
    for (name, result) in &results {
        text.push('\n');
        text.push_str(&render_detail(name, &result.pooled));
        let per_fold: Vec<String> = result.folds.iter().map(|f| format!("{:.4}", f.report.weighted_f1)).collect();
        let _ = writeln!(
            text,
            "per-fold weighted F1: {} (mean {:.4})",
            per_fold.join(" "),
            result.mean_fold_weighted_f1()
        );
    }
    print!("{text}");

    if let Some(out) = &config.out {
        create_dir(out)?;
        let tsv_input: Vec<(&str, &CvResult)> = results.iter().map(|(n, r)| (*n, r)).collect();
        write_file(&out.join("report.txt"), &text)?;
        write_file(&out.join("report.tsv"), &render_tsv(&tsv_input))?;
    }
    Ok(())
}

pub fn train(config: RunConfig) -> Result<(), CliError> {
    let out = config
        .out
        .clone()
        .ok_or_else(|| CliError::usage("train requires --out <model dir>"))?;
    let corpus = load_checked_corpus(&config)?;
    let external = load_external(&config)?;
    let method = method_config(&config, config.method, external);
    let pipeline = TrainedPipeline::fit(
        &corpus,
        &config.preprocess,
        &method,
        &config.hyperparams,
        config.seed,
        config.exec,
    )?;
    create_dir(&out)?;
    pipeline.embedding.save(out.join(EMBEDDING_FILE))?;
    pipeline.classifier.save(out.join(CLASSIFIER_FILE))?;
    pipeline.preprocess.save(out.join(PREPROCESS_FILE))?;
    eprintln!(
        "trained {} model: {} words, dimension {}, {} classes -> {}",
        config.method,
        pipeline.embedding.vocabulary().len(),
        pipeline.embedding.dim(),
        pipeline.classifier.classes().len(),
        out.display()
    );
    Ok(())
}

struct SavedModel {
    preprocess: PreprocessConfig,
    embedding: EmbeddingModel,
    classifier: LogRegModel,
}

fn load_model(dir: &Path) -> Result<SavedModel, CliError> {
    let model = SavedModel {
        preprocess: PreprocessConfig::load(dir.join(PREPROCESS_FILE))?,
        embedding: EmbeddingModel::load(dir.join(EMBEDDING_FILE))?,
        classifier: LogRegModel::load(dir.join(CLASSIFIER_FILE))?,
    };
    if model.embedding.dim() != model.classifier.dim() {
        return Err(qembed::Error::Shape(format!(
            "embedding dimension {} does not match classifier dimension {}",
            model.embedding.dim(),
            model.classifier.dim()
        ))
        .into());
    }
    Ok(model)
}

/// Questions to score: `--question` values, else a corpus file, else stdin lines.
pub struct QuestionSource {
    pub questions: Vec<String>,
    pub data: Option<PathBuf>,
    pub format: Option<DataFormat>,
}

fn read_corpus(path: &Path, format: Option<DataFormat>) -> Result<Corpus, CliError> {
    Ok(load_corpus(path, format.unwrap_or_else(|| format_from_extension(path)))?)
}

fn gather_questions(source: QuestionSource) -> Result<Vec<String>, CliError> {
    if !source.questions.is_empty() {
        return Ok(source.questions);
    }
    if let Some(path) = &source.data {
        let corpus = read_corpus(path, source.format)?;
        return Ok(corpus.questions().iter().map(|q| q.text.clone()).collect());
    }
    let mut lines = Vec::new();
    for line in io::stdin().lock().lines() {
        let line = line.map_err(|source| qembed::Error::Io {
            path: PathBuf::from("<stdin>"),
            source,
        })?;
        if !line.trim().is_empty() {
            lines.push(line);
        }
    }
    Ok(lines)
}

fn embed_texts<S: AsRef<str> + Sync>(model: &SavedModel, texts: &[S], exec: Exec) -> Result<qembed::numerics::Matrix, CliError> {
    let tokens = Preprocessor::new(model.preprocess.clone())?.process_all(texts, exec);
    let (x, empty) = embed_batch(&model.embedding, &tokens, exec);
    let unknown = empty.iter().filter(|&&e| e).count();
    if unknown > 0 {
        eprintln!("note: {unknown} questions had no known words");
    }
    Ok(x)
}

pub fn predict_cmd(model_dir: &Path, source: QuestionSource, exec: Exec) -> Result<(), CliError> {
    let model = load_model(model_dir)?;
    let texts = gather_questions(source)?;
    if texts.is_empty() {
        return Err(CliError::usage("no questions given"));
    }
    let x = embed_texts(&model, &texts, exec)?;
    let mut out = String::new();
    for i in 0..x.rows() {
        let p = predict(&model.classifier, x.row(i))?;
        let _ = writeln!(out, "{}\t{:.6}", p.label, p.scores[p.index]);
    }
    print!("{out}");
    Ok(())
}

pub fn embed_cmd(model_dir: &Path, data: &Path, format: Option<DataFormat>, out: &Path, exec: Exec) -> Result<(), CliError> {
    let model = load_model(model_dir)?;
    let corpus = read_corpus(data, format)?;
    let x = embed_texts(&model, &corpus.texts(), exec)?;
    let ids: Vec<String> = corpus.questions().iter().map(|q| format!("q{}", q.id)).collect();
    create_dir(out)?;
    write_file(&out.join("questions.vec"), &write_word_vectors(&ids, &x)?)?;
    match model.embedding.word_vectors() {
        Some(vectors) => {
            let words = model.embedding.vocabulary().words();
            write_file(&out.join("words.vec"), &write_word_vectors(words, vectors)?)?;
        }
        None => eprintln!("note: {} models have no word vectors; wrote questions.vec only", model.embedding.kind()),
    }
    Ok(())
}

pub fn project_cmd(
    model_dir: &Path,
    data: &Path,
    format: Option<DataFormat>,
    out: Option<&Path>,
    seed: u64,
    exec: Exec,
) -> Result<(), CliError> {
    let model = load_model(model_dir)?;
    let corpus = read_corpus(data, format)?;
    let x = embed_texts(&model, &corpus.texts(), exec)?;
    let points = project_2d(&x, seed)?;
    let mut text = String::new();
    for (q, [px, py]) in corpus.questions().iter().zip(points) {
        let _ = writeln!(text, "q{}\t{px:.6}\t{py:.6}", q.id);
    }
    match out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}
