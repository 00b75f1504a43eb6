use std::collections::HashMap;

use super::{EmbeddingKind, EmbeddingModel, ModelWeights, Vocabulary};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numerics::{truncated_svd_with, Matrix, SvdOptions};

/// Value stored for a word absent from a question.
pub const ENTROPY_FILL: f64 = -0.0001;

/// Maximum of `-p·log2(p)` on `(0, 1]`, reached at `p = 1/e`.
pub const ENTROPY_TERM_MAX: f64 = std::f64::consts::LOG2_E / std::f64::consts::E;

/// Entropy term of a word occurring `count` times in a question of `length` tokens.
pub fn entropy_value(count: usize, length: usize) -> Result<f64> {
    entropy_value_with_fill(count, length, ENTROPY_FILL)
}

pub fn entropy_value_with_fill(count: usize, length: usize, fill: f64) -> Result<f64> {
    if length == 0 {
        return Err(Error::invalid("question length must be at least 1"));
    }
    if count > length {
        return Err(Error::invalid(format!(
            "occurrence count {count} exceeds question length {length}"
        )));
    }
    if count == 0 {
        return Ok(fill);
    }
    let p = count as f64 / length as f64;
    // `+ 0.0` maps the -0.0 produced at p = 1 to +0.0.
    Ok(-p * p.log2() + 0.0)
}

/// Questions × words matrix of entropy terms.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyMatrix {
    pub matrix: Matrix,
    pub fill: f64,
    /// Questions with no tokens; their rows hold only the fill value.
    pub empty_rows: Vec<usize>,
}

pub fn build_entropy_matrix<S: AsRef<str> + Sync>(
    token_lists: &[Vec<S>],
    vocab: &Vocabulary,
) -> Result<EntropyMatrix> {
    build_entropy_matrix_with_fill(token_lists, vocab, ENTROPY_FILL, Exec::default())
}

/// Question length counts every token, including any outside `vocab`.
pub fn build_entropy_matrix_with_fill<S: AsRef<str> + Sync>(
    token_lists: &[Vec<S>],
    vocab: &Vocabulary,
    fill: f64,
    exec: Exec,
) -> Result<EntropyMatrix> {
    if token_lists.is_empty() {
        return Err(Error::invalid("no questions"));
    }
    if !fill.is_finite() {
        return Err(Error::NonFinite("entropy fill value".into()));
    }
    let width = vocab.len();
    let mut data = vec![fill; token_lists.len() * width];
    exec.for_each_row(&mut data, width, |i, row| {
        let tokens = &token_lists[i];
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for t in tokens {
            if let Some(j) = vocab.index_of(t.as_ref()) {
                *counts.entry(j).or_insert(0) += 1;
            }
        }
        for (j, count) in counts {
            row[j] = entropy_value_with_fill(count, tokens.len(), fill)
                .expect("count never exceeds question length");
        }
    });
    let empty_rows = token_lists
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_empty())
        .map(|(i, _)| i)
        .collect();
    Ok(EntropyMatrix {
        matrix: Matrix::from_vec(token_lists.len(), width, data)?,
        fill,
        empty_rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyOptions {
    pub fill: f64,
    pub svd: SvdOptions,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            fill: ENTROPY_FILL,
            svd: SvdOptions::default(),
        }
    }
}

pub fn fit_entropy_embedding<S: AsRef<str> + Sync>(
    token_lists: &[Vec<S>],
    vocab: &Vocabulary,
    k: usize,
    seed: u64,
) -> Result<EmbeddingModel> {
    let options = EntropyOptions {
        svd: SvdOptions {
            seed,
            ..SvdOptions::default()
        },
        ..EntropyOptions::default()
    };
    fit_entropy_embedding_with(token_lists, vocab, k, &options)
}

/// Word vectors are the rows of `U_k·Σ_k` from the SVD of the transposed
/// (words × questions) entropy matrix, with `k` clamped to `min(k, V, N)`.
pub fn fit_entropy_embedding_with<S: AsRef<str> + Sync>(
    token_lists: &[Vec<S>],
    vocab: &Vocabulary,
    k: usize,
    options: &EntropyOptions,
) -> Result<EmbeddingModel> {
    if k == 0 {
        return Err(Error::invalid("embedding dimension must be at least 1"));
    }
    let entropy = build_entropy_matrix_with_fill(token_lists, vocab, options.fill, options.svd.exec)?;
    let words_by_questions = entropy.matrix.transpose();
    let rank = k.min(vocab.len()).min(token_lists.len());
    let factors = truncated_svd_with(&words_by_questions, rank, &options.svd)?;
    EmbeddingModel::new(
        EmbeddingKind::Entropy,
        vocab.clone(),
        ModelWeights::WordVectors(factors.scaled_left()),
    )
}
