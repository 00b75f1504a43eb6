use super::{EmbeddingKind, EmbeddingModel, ModelWeights, Vocabulary};
use crate::error::{Error, Result};
use crate::numerics::{truncated_svd_with, Matrix, SvdOptions};

pub const DEFAULT_WINDOW: usize = 2;

/// Symmetric word × word counts of pairs at distance `1..=window` inside a question.
pub fn cooccurrence_counts<S: AsRef<str>>(
    token_lists: &[Vec<S>],
    vocab: &Vocabulary,
    window: usize,
) -> Result<Matrix> {
    if window == 0 {
        return Err(Error::invalid("co-occurrence window must be at least 1"));
    }
    let v = vocab.len();
    let mut counts = Matrix::zeros(v, v);
    for tokens in token_lists {
        let ids: Vec<Option<usize>> = tokens.iter().map(|t| vocab.index_of(t.as_ref())).collect();
        for (i, a) in ids.iter().enumerate() {
            let Some(a) = *a else { continue };
            let hi = (i + window + 1).min(ids.len());
            for b in ids[i + 1..hi].iter().flatten() {
                counts[(a, *b)] += 1.0;
                counts[(*b, a)] += 1.0;
            }
        }
    }
    Ok(counts)
}

/// `max(0, ln(p_ij / (p_i· · p_·j)))` from a count matrix; zero counts map to 0.
pub fn positive_pmi(counts: &Matrix) -> Result<Matrix> {
    let (rows, cols) = counts.shape();
    let total: f64 = counts.as_slice().iter().sum();
    if total <= 0.0 {
        return Err(Error::Numeric("co-occurrence matrix is all zeros".into()));
    }
    let row_sums: Vec<f64> = (0..rows).map(|i| counts.row(i).iter().sum()).collect();
    let mut col_sums = vec![0.0; cols];
    for i in 0..rows {
        for (s, x) in col_sums.iter_mut().zip(counts.row(i)) {
            *s += x;
        }
    }
    Ok(Matrix::from_fn(rows, cols, |i, j| {
        let f = counts[(i, j)];
        if f <= 0.0 {
            return 0.0;
        }
        let pmi = (f * total / (row_sums[i] * col_sums[j])).ln();
        if pmi > 0.0 {
            pmi
        } else {
            0.0
        }
    }))
}

pub fn fit_pmi_vsm<S: AsRef<str>>(
    token_lists: &[Vec<S>],
    vocab: &Vocabulary,
    window: usize,
    k: usize,
    seed: u64,
) -> Result<EmbeddingModel> {
    let options = SvdOptions {
        seed,
        ..SvdOptions::default()
    };
    fit_pmi_vsm_with(token_lists, vocab, window, k, &options)
}

/// Word vectors are the rows of `U_k·Σ_k` of the positive-PMI matrix, `k` clamped to `V`.
pub fn fit_pmi_vsm_with<S: AsRef<str>>(
    token_lists: &[Vec<S>],
    vocab: &Vocabulary,
    window: usize,
    k: usize,
    options: &SvdOptions,
) -> Result<EmbeddingModel> {
    if k == 0 {
        return Err(Error::invalid("embedding dimension must be at least 1"));
    }
    let ppmi = positive_pmi(&cooccurrence_counts(token_lists, vocab, window)?)?;
    let factors = truncated_svd_with(&ppmi, k.min(vocab.len()), options)?;
    EmbeddingModel::new(
        EmbeddingKind::PmiVsm,
        vocab.clone(),
        ModelWeights::WordVectors(factors.scaled_left()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::build_vocabulary;

    #[test]
    fn independent_words_have_zero_pmi() {
        // joint counts equal the product of marginals
        let counts = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let x = positive_pmi(&counts).unwrap();
        assert!(x.as_slice().iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn negative_association_is_clipped() {
        let counts = Matrix::from_rows(&[[10.0, 1.0], [1.0, 10.0]]).unwrap();
        let x = positive_pmi(&counts).unwrap();
        assert_eq!(x[(0, 1)], 0.0);
        assert!(x[(0, 0)] > 0.0);
    }

    #[test]
    fn window_limits_pairs() {
        let lists = vec![vec!["a", "b", "c", "d"]];
        let vocab = build_vocabulary(&lists).unwrap();
        let c = cooccurrence_counts(&lists, &vocab, 1).unwrap();
        assert_eq!(c[(0, 1)], 1.0);
        assert_eq!(c[(0, 2)], 0.0);
        let c = cooccurrence_counts(&lists, &vocab, 2).unwrap();
        assert_eq!(c[(0, 2)], 1.0);
        assert_eq!(c[(0, 3)], 0.0);
        assert!(cooccurrence_counts(&lists, &vocab, 0).is_err());
    }

    #[test]
    fn degenerate_corpus() {
        let lists = vec![vec!["a"], vec!["b"]];
        let vocab = build_vocabulary(&lists).unwrap();
        assert!(matches!(fit_pmi_vsm(&lists, &vocab, 2, 2, 0), Err(Error::Numeric(_))));
    }

    #[test]
    fn model_shape() {
        let lists = vec![vec!["a", "b", "c"], vec!["b", "c", "d"], vec!["a", "d"]];
        let vocab = build_vocabulary(&lists).unwrap();
        let m = fit_pmi_vsm(&lists, &vocab, 2, 3, 0).unwrap();
        assert_eq!(m.word_vectors().unwrap().shape(), (4, 3));
        let m = fit_pmi_vsm(&lists, &vocab, 2, 50, 0).unwrap();
        assert_eq!(m.dim(), 4);
    }
}
