//! Vectorizers mapping token lists to fixed-length question vectors.
//!
//! Four kinds share one model type: entropy embeddings (per-question
//! Shannon entropy of each word, reduced by truncated SVD), TF-IDF,
//! positive-PMI co-occurrence vectors reduced by SVD, and pretrained
//! vectors read from a text file. Vector-based kinds embed a question as
//! the mean of its word vectors; TF-IDF embeds it as its weight vector.

mod entropy;
mod persist;
mod pmi;
mod project;
mod tfidf;
mod vectors;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numerics::Matrix;
pub use crate::vocab::Vocabulary;

pub use entropy::{
    build_entropy_matrix, build_entropy_matrix_with_fill, entropy_value, entropy_value_with_fill,
    fit_entropy_embedding, fit_entropy_embedding_with, EntropyMatrix, EntropyOptions, ENTROPY_FILL,
    ENTROPY_TERM_MAX,
};
pub(crate) use persist::check_header;
pub use persist::MODEL_HEADER;
pub use pmi::{cooccurrence_counts, fit_pmi_vsm, fit_pmi_vsm_with, positive_pmi, DEFAULT_WINDOW};
pub use project::project_2d;
pub use tfidf::{fit_tfidf, tfidf_weight};
pub use vectors::{load_external_vectors, parse_word_vectors, write_word_vectors};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EmbeddingKind {
    Entropy,
    Tfidf,
    PmiVsm,
    External,
}

impl EmbeddingKind {
    pub const ALL: [EmbeddingKind; 4] = [
        EmbeddingKind::Entropy,
        EmbeddingKind::Tfidf,
        EmbeddingKind::PmiVsm,
        EmbeddingKind::External,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EmbeddingKind::Entropy => "entropy",
            EmbeddingKind::Tfidf => "tfidf",
            EmbeddingKind::PmiVsm => "pmi-vsm",
            EmbeddingKind::External => "external",
        }
    }
}

impl fmt::Display for EmbeddingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EmbeddingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EmbeddingKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::invalid(format!("unknown method `{s}` (entropy|tfidf|pmi-vsm|external)"))
            })
    }
}

/// How repeated words inside one question contribute to the mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Averaging {
    /// Each distinct word counts once.
    #[default]
    Set,
    /// Every occurrence counts.
    Multiset,
}

impl Averaging {
    pub fn name(self) -> &'static str {
        match self {
            Averaging::Set => "set",
            Averaging::Multiset => "multiset",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelWeights {
    /// One row per vocabulary word.
    WordVectors(Matrix),
    /// Inverse document frequency per vocabulary word.
    Idf(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    kind: EmbeddingKind,
    vocabulary: Vocabulary,
    weights: ModelWeights,
    averaging: Averaging,
}

impl EmbeddingModel {
    pub fn new(kind: EmbeddingKind, vocabulary: Vocabulary, weights: ModelWeights) -> Result<Self> {
        match (&weights, kind) {
            (ModelWeights::Idf(idf), EmbeddingKind::Tfidf) => {
                if idf.len() != vocabulary.len() {
                    return Err(Error::Shape(format!(
                        "{} idf values for {} words",
                        idf.len(),
                        vocabulary.len()
                    )));
                }
                if idf.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return Err(Error::invalid("idf values must be finite and non-negative"));
                }
            }
            (ModelWeights::WordVectors(m), k) if k != EmbeddingKind::Tfidf => {
                if m.rows() != vocabulary.len() {
                    return Err(Error::Shape(format!(
                        "{} word vectors for {} words",
                        m.rows(),
                        vocabulary.len()
                    )));
                }
            }
            _ => {
                return Err(Error::invalid(format!("weights do not match model kind {kind}")));
            }
        }
        Ok(EmbeddingModel {
            kind,
            vocabulary,
            weights,
            averaging: Averaging::Set,
        })
    }

    pub fn with_averaging(mut self, averaging: Averaging) -> Self {
        self.averaging = averaging;
        self
    }

    pub fn kind(&self) -> EmbeddingKind {
        self.kind
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn weights(&self) -> &ModelWeights {
        &self.weights
    }

    pub fn averaging(&self) -> Averaging {
        self.averaging
    }

    /// Length of every question vector this model produces.
    pub fn dim(&self) -> usize {
        match &self.weights {
            ModelWeights::WordVectors(m) => m.cols(),
            ModelWeights::Idf(idf) => idf.len(),
        }
    }

    pub fn word_vectors(&self) -> Option<&Matrix> {
        match &self.weights {
            ModelWeights::WordVectors(m) => Some(m),
            ModelWeights::Idf(_) => None,
        }
    }

    pub fn word_vector(&self, word: &str) -> Option<&[f64]> {
        let i = self.vocabulary.index_of(word)?;
        self.word_vectors().map(|m| m.row(i))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuestionVector {
    pub values: Vec<f64>,
    /// No token of the question was in the vocabulary; `values` is all zeros.
    pub empty: bool,
}

pub fn embed_question<S: AsRef<str>>(model: &EmbeddingModel, tokens: &[S]) -> QuestionVector {
    let dim = model.dim();
    let mut counts: HashMap<usize, usize> = HashMap::new();
    let mut order = Vec::new();
    for token in tokens {
        if let Some(i) = model.vocabulary.index_of(token.as_ref()) {
            let c = counts.entry(i).or_insert(0);
            if *c == 0 {
                order.push(i);
            }
            *c += 1;
        }
    }
    let mut values = vec![0.0; dim];
    if order.is_empty() {
        return QuestionVector { values, empty: true };
    }
    match &model.weights {
        ModelWeights::Idf(idf) => {
            for &i in &order {
                values[i] = tfidf_weight(counts[&i], idf[i]);
            }
        }
        ModelWeights::WordVectors(m) => {
            // Fixed summation order (first occurrence) keeps results reproducible.
            let mut total = 0usize;
            for &i in &order {
                let weight = match model.averaging {
                    Averaging::Set => 1,
                    Averaging::Multiset => counts[&i],
                };
                for (v, x) in values.iter_mut().zip(m.row(i)) {
                    *v += weight as f64 * x;
                }
                total += weight;
            }
            for v in &mut values {
                *v /= total as f64;
            }
        }
    }
    QuestionVector { values, empty: false }
}

/// Embeds every token list; row `i` of the result is question `i`.
pub fn embed_batch<S: AsRef<str> + Sync>(
    model: &EmbeddingModel,
    token_lists: &[Vec<S>],
    exec: Exec,
) -> (Matrix, Vec<bool>) {
    let vectors = exec.map(token_lists, |tokens| embed_question(model, tokens));
    let dim = model.dim();
    let mut out = Matrix::zeros(token_lists.len(), dim);
    let mut empty = Vec::with_capacity(vectors.len());
    for (i, qv) in vectors.into_iter().enumerate() {
        out.row_mut(i).copy_from_slice(&qv.values);
        empty.push(qv.empty);
    }
    (out, empty)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_model() -> EmbeddingModel {
        let vocab = Vocabulary::from_words(["a", "b"]).unwrap();
        let vectors = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        EmbeddingModel::new(EmbeddingKind::External, vocab, ModelWeights::WordVectors(vectors)).unwrap()
    }

    #[test]
    fn two_vector_mean() {
        let m = toy_model();
        assert_eq!(embed_question(&m, &["a", "b"]).values, vec![0.5, 0.5]);
    }

    #[test]
    fn set_semantics_ignores_repeats() {
        let m = toy_model();
        assert_eq!(embed_question(&m, &["a", "a", "b"]).values, vec![0.5, 0.5]);
        let multi = toy_model().with_averaging(Averaging::Multiset);
        let v = embed_question(&multi, &["a", "a", "b"]).values;
        assert!((v[0] - 2.0 / 3.0).abs() < 1e-15 && (v[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn oov_tokens_skipped() {
        let m = toy_model();
        let v = embed_question(&m, &["a", "zzz"]);
        assert_eq!(v.values, vec![1.0, 0.0]);
        assert!(!v.empty);
        let v = embed_question(&m, &["zzz"]);
        assert!(v.empty);
        assert_eq!(v.values, vec![0.0, 0.0]);
        let none: [&str; 0] = [];
        assert!(embed_question(&m, &none).empty);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in EmbeddingKind::ALL {
            assert_eq!(k.name().parse::<EmbeddingKind>().unwrap(), k);
        }
        assert!("word2vec".parse::<EmbeddingKind>().is_err());
    }

    #[test]
    fn weights_must_match_kind() {
        let vocab = Vocabulary::from_words(["a"]).unwrap();
        assert!(EmbeddingModel::new(EmbeddingKind::Entropy, vocab.clone(), ModelWeights::Idf(vec![1.0])).is_err());
        assert!(EmbeddingModel::new(EmbeddingKind::Tfidf, vocab.clone(), ModelWeights::Idf(vec![-1.0])).is_err());
        assert!(EmbeddingModel::new(EmbeddingKind::Tfidf, vocab, ModelWeights::Idf(vec![1.0, 2.0])).is_err());
    }

    #[test]
    fn batch_matches_single() {
        let m = toy_model();
        let lists = vec![vec!["a"], vec!["b", "a"], vec!["c"]];
        let (x, empty) = embed_batch(&m, &lists, Exec::Parallel);
        assert_eq!(x.row(1), [0.5, 0.5]);
        assert_eq!(empty, vec![false, false, true]);
    }
}
