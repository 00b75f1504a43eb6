//! Fitted-model container: a versioned header, `key value` fields, then one
//! line per vocabulary word holding its vector (or its idf for TF-IDF).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Averaging, EmbeddingKind, EmbeddingModel, ModelWeights, Vocabulary};
use crate::error::{Error, Result};
use crate::numerics::Matrix;

pub const MODEL_HEADER: &str = "qembed-embedding-model";
const VERSION: &str = "v1";

impl EmbeddingModel {
    pub fn to_text(&self) -> String {
        let mut out = format!("{MODEL_HEADER} {VERSION}\n");
        let _ = writeln!(out, "kind {}", self.kind);
        let _ = writeln!(out, "averaging {}", self.averaging.name());
        let _ = writeln!(out, "words {}", self.vocabulary.len());
        let _ = writeln!(out, "dim {}", self.dim());
        for (i, word) in self.vocabulary.words().iter().enumerate() {
            out.push_str(word);
            match &self.weights {
                ModelWeights::WordVectors(m) => {
                    for x in m.row(i) {
                        let _ = write!(out, " {x}");
                    }
                }
                ModelWeights::Idf(idf) => {
                    let _ = write!(out, " {}", idf[i]);
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(input: &str, origin: &str) -> Result<Self> {
        let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
        check_header(lines.next().map(|(_, l)| l), MODEL_HEADER, VERSION, origin)?;

        let mut field = |name: &str| -> Result<(usize, String)> {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| Error::parse(origin, 0, format!("missing `{name}` field")))?;
            match line.split_once(' ') {
                Some((key, value)) if key == name => Ok((ln, value.trim().to_string())),
                _ => Err(Error::parse(origin, ln, format!("expected `{name} <value>`"))),
            }
        };
        let (ln, kind) = field("kind")?;
        let kind: EmbeddingKind = kind.parse().map_err(|e: Error| Error::parse(origin, ln, e.to_string()))?;
        let (ln, averaging) = field("averaging")?;
        let averaging = match averaging.as_str() {
            "set" => Averaging::Set,
            "multiset" => Averaging::Multiset,
            other => return Err(Error::parse(origin, ln, format!("unknown averaging `{other}`"))),
        };
        let (ln, words) = field("words")?;
        let count: usize = words.parse().map_err(|_| Error::parse(origin, ln, "invalid word count"))?;
        let (ln, dim) = field("dim")?;
        let dim: usize = dim.parse().map_err(|_| Error::parse(origin, ln, "invalid dimension"))?;
        let width = if kind == EmbeddingKind::Tfidf { 1 } else { dim };

        let mut vocab = Vec::with_capacity(count);
        let mut data = Vec::with_capacity(count * width);
        for (ln, line) in lines.by_ref().take(count) {
            let mut parts = line.split(' ');
            let word = parts.next().unwrap_or_default();
            let values: Vec<f64> = parts
                .map(|p| p.parse::<f64>().map_err(|_| Error::parse(origin, ln, format!("invalid number `{p}`"))))
                .collect::<Result<_>>()?;
            if word.is_empty() || values.len() != width {
                return Err(Error::parse(origin, ln, format!("expected a word and {width} values")));
            }
            vocab.push(word.to_string());
            data.extend(values);
        }
        if vocab.len() != count {
            return Err(Error::parse(origin, 0, format!("expected {count} word rows, found {}", vocab.len())));
        }
        let vocabulary = Vocabulary::from_words(vocab).map_err(|e| Error::parse(origin, 0, e.to_string()))?;
        let weights = if kind == EmbeddingKind::Tfidf {
            if dim != count {
                return Err(Error::parse(origin, 0, "tfidf dimension must equal the word count"));
            }
            ModelWeights::Idf(data)
        } else {
            ModelWeights::WordVectors(Matrix::from_vec(count, dim, data)?)
        };
        Ok(EmbeddingModel::new(kind, vocabulary, weights)?.with_averaging(averaging))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }
}

/// Validates a `<magic> <version>` first line.
pub(crate) fn check_header(line: Option<&str>, magic: &str, version: &str, origin: &str) -> Result<()> {
    let line = line.ok_or_else(|| Error::parse(origin, 0, "empty model file"))?;
    match line.trim().split_once(' ') {
        Some((m, v)) if m == magic => {
            if v == version {
                Ok(())
            } else {
                Err(Error::Version(format!("{origin}: {magic} {v} (supported: {version})")))
            }
        }
        _ => Err(Error::parse(origin, 1, format!("not a {magic} file"))),
    }
}
