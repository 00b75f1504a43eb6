//! Labeled question corpora: ingestion, class statistics and fold planning.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledQuestion {
    /// 0-based position among the data rows of the source file.
    pub id: usize,
    pub text: String,
    pub label: String,
}

/// Ordered questions plus the label set in first-occurrence order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    questions: Vec<LabeledQuestion>,
    labels: Vec<String>,
}

impl Corpus {
    /// Builds a corpus from `(text, label)` pairs. Ids follow input order.
    pub fn new<I, T, L>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, L)>,
        T: Into<String>,
        L: Into<String>,
    {
        let mut questions = Vec::new();
        let mut labels: Vec<String> = Vec::new();
        for (id, (text, label)) in rows.into_iter().enumerate() {
            let text = text.into();
            let label = label.into();
            validate_row(&text, &label).map_err(|msg| Error::invalid(format!("row {id}: {msg}")))?;
            if !labels.contains(&label) {
                labels.push(label.clone());
            }
            questions.push(LabeledQuestion { id, text, label });
        }
        if questions.is_empty() {
            return Err(Error::invalid("corpus has no questions"));
        }
        Ok(Corpus { questions, labels })
    }

    pub fn questions(&self) -> &[LabeledQuestion] {
        &self.questions
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.questions.iter().map(|q| q.text.as_str()).collect()
    }

    pub fn question_labels(&self) -> Vec<&str> {
        self.questions.iter().map(|q| q.label.as_str()).collect()
    }

    /// Per-question index into [`Corpus::labels`].
    pub fn label_indices(&self) -> Vec<usize> {
        let index: HashMap<&str, usize> = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        self.questions.iter().map(|q| index[q.label.as_str()]).collect()
    }

    /// Same questions with a different label per row; the label set is rebuilt.
    pub fn relabeled<S: AsRef<str>>(&self, labels: &[S]) -> Result<Corpus> {
        if labels.len() != self.len() {
            return Err(Error::Shape(format!(
                "{} labels for {} questions",
                labels.len(),
                self.len()
            )));
        }
        Corpus::new(
            self.questions
                .iter()
                .zip(labels)
                .map(|(q, l)| (q.text.clone(), l.as_ref().to_string())),
        )
    }

    /// Subset in the given order, re-numbered from 0.
    pub fn select(&self, indices: &[usize]) -> Result<Corpus> {
        Corpus::new(indices.iter().map(|&i| {
            let q = &self.questions[i];
            (q.text.clone(), q.label.clone())
        }))
    }
}

fn validate_row(text: &str, label: &str) -> std::result::Result<(), &'static str> {
    if text.trim().is_empty() {
        return Err("empty text field");
    }
    if label.trim().is_empty() {
        return Err("empty label field");
    }
    if label.contains(['\t', '\n', '\r']) {
        return Err("label contains a tab or line break");
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DataFormat {
    #[default]
    Tsv,
    Csv,
}

impl FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(DataFormat::Tsv),
            "csv" => Ok(DataFormat::Csv),
            other => Err(Error::invalid(format!("unknown data format `{other}` (tsv|csv)"))),
        }
    }
}

impl fmt::Display for DataFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataFormat::Tsv => "tsv",
            DataFormat::Csv => "csv",
        })
    }
}

pub fn load_corpus(path: impl AsRef<Path>, format: DataFormat) -> Result<Corpus> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let origin = path.display().to_string();
    let text = String::from_utf8(bytes).map_err(|e| {
        Error::parse(&origin, 0, format!("not valid UTF-8: {e}"))
    })?;
    parse_corpus(&text, format, &origin)
}

/// Parses corpus text. `origin` names the source in error messages.
pub fn parse_corpus(input: &str, format: DataFormat, origin: &str) -> Result<Corpus> {
    let rows = match format {
        DataFormat::Tsv => parse_tsv(input, origin)?,
        DataFormat::Csv => parse_csv(input, origin)?,
    };
    if rows.is_empty() {
        return Err(Error::parse(origin, 0, "no data rows"));
    }
    let mut labels: Vec<String> = Vec::new();
    let mut questions = Vec::with_capacity(rows.len());
    for (id, (line, text, label)) in rows.into_iter().enumerate() {
        validate_row(&text, &label).map_err(|msg| Error::parse(origin, line, msg))?;
        if !labels.contains(&label) {
            labels.push(label.clone());
        }
        questions.push(LabeledQuestion { id, text, label });
    }
    Ok(Corpus { questions, labels })
}

/// Column positions of `text` and `label` in a header row.
fn header_columns<'a>(
    fields: impl Iterator<Item = &'a str>,
    origin: &str,
    line: usize,
) -> Result<(usize, usize)> {
    let fields: Vec<&str> = fields.map(|f| f.trim()).collect();
    let find = |name: &str| fields.iter().position(|f| *f == name);
    match (find("text"), find("label")) {
        (Some(t), Some(l)) if fields.len() == 2 => Ok((t, l)),
        (Some(_), Some(_)) => Err(Error::parse(
            origin,
            line,
            format!("expected exactly the columns `text` and `label`, found {}", fields.len()),
        )),
        _ => Err(Error::parse(
            origin,
            line,
            "header must name the columns `text` and `label`",
        )),
    }
}

type Row = (usize, String, String);

fn parse_tsv(input: &str, origin: &str) -> Result<Vec<Row>> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::parse(origin, 0, "empty file"))?;
    let (text_col, label_col) = header_columns(header.split('\t'), origin, header_line)?;
    let mut rows = Vec::new();
    for (line, raw) in lines {
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::parse(
                origin,
                line,
                format!("expected 2 tab-separated fields, found {}", fields.len()),
            ));
        }
        rows.push((
            line,
            fields[text_col].to_string(),
            fields[label_col].trim().to_string(),
        ));
    }
    Ok(rows)
}

fn parse_csv(input: &str, origin: &str) -> Result<Vec<Row>> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input.as_bytes());
    let csv_err = |e: csv::Error| {
        let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
        Error::parse(origin, line, e.to_string())
    };
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.is_empty() {
        return Err(Error::parse(origin, 0, "empty file"));
    }
    let (text_col, label_col) = header_columns(header.iter(), origin, 1)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() == 1 && record[0].trim().is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::parse(
                origin,
                line,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        rows.push((
            line,
            record[text_col].to_string(),
            record[label_col].trim().to_string(),
        ));
    }
    Ok(rows)
}

/// Per-class question counts in label order.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassDistribution {
    pub counts: Vec<(String, usize)>,
}

impl ClassDistribution {
    pub fn total(&self) -> usize {
        self.counts.iter().map(|(_, c)| c).sum()
    }

    pub fn mean(&self) -> f64 {
        self.total() as f64 / self.counts.len() as f64
    }

    pub fn count(&self, label: &str) -> Option<usize> {
        self.counts.iter().find(|(l, _)| l == label).map(|(_, c)| *c)
    }

    /// Classes holding fewer than half the mean per-class count.
    pub fn underrepresented(&self) -> Vec<&str> {
        let threshold = self.mean() / 2.0;
        self.counts
            .iter()
            .filter(|(_, c)| (*c as f64) < threshold)
            .map(|(l, _)| l.as_str())
            .collect()
    }
}

impl fmt::Display for ClassDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.counts.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(5).max(5);
        let total = self.total().max(1) as f64;
        let low = self.underrepresented();
        writeln!(f, "{:<width$}  {:>7}  {:>6}", "class", "count", "share")?;
        for (label, count) in &self.counts {
            let flag = if low.contains(&label.as_str()) { "  < mean/2" } else { "" };
            writeln!(
                f,
                "{:<width$}  {:>7}  {:>5.1}%{}",
                label,
                count,
                100.0 * *count as f64 / total,
                flag
            )?;
        }
        write!(f, "{:<width$}  {:>7}  mean {:.1}", "total", self.total(), self.mean())
    }
}

pub fn class_distribution(corpus: &Corpus) -> ClassDistribution {
    let indices = corpus.label_indices();
    let mut counts = vec![0usize; corpus.labels().len()];
    for i in indices {
        counts[i] += 1;
    }
    ClassDistribution {
        counts: corpus.labels().iter().cloned().zip(counts).collect(),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FoldStrategy {
    #[default]
    Shuffled,
    Stratified,
}

impl fmt::Display for FoldStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FoldStrategy::Shuffled => "shuffled",
            FoldStrategy::Stratified => "stratified",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    /// Fold index in `[0, k)` for every question.
    pub assignment: Vec<usize>,
    pub seed: u64,
    pub strategy: FoldStrategy,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Assigns `n` questions to `k` folds.
///
/// Shuffled: a seeded permutation dealt round-robin. Stratified: each class
/// (in order of first appearance in `labels`) is shuffled and dealt
/// round-robin, continuing the deal position across classes so both the
/// per-class and the overall fold sizes stay within one of each other.
pub fn split_folds<L: PartialEq>(
    n: usize,
    labels: &[L],
    k: usize,
    seed: u64,
    strategy: FoldStrategy,
) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::invalid(format!("fold count must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::invalid(format!(
            "fold count {k} exceeds question count {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; n];
    match strategy {
        FoldStrategy::Shuffled => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            for (pos, &q) in order.iter().enumerate() {
                assignment[q] = pos % k;
            }
        }
        FoldStrategy::Stratified => {
            if labels.len() != n {
                return Err(Error::Shape(format!(
                    "{} labels for {n} questions",
                    labels.len()
                )));
            }
            let mut classes: Vec<&L> = Vec::new();
            let mut members: Vec<Vec<usize>> = Vec::new();
            for (i, label) in labels.iter().enumerate() {
                match classes.iter().position(|c| *c == label) {
                    Some(c) => members[c].push(i),
                    None => {
                        classes.push(label);
                        members.push(vec![i]);
                    }
                }
            }
            let mut pos = 0usize;
            for mut group in members {
                group.shuffle(&mut rng);
                for q in group {
                    assignment[q] = pos % k;
                    pos += 1;
                }
            }
        }
    }
    Ok(FoldPlan {
        k,
        assignment,
        seed,
        strategy,
    })
}
