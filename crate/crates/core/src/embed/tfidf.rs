use super::{EmbeddingKind, EmbeddingModel, ModelWeights, Vocabulary};
use crate::error::{Error, Result};

/// `tf · idf` for one word in one question.
pub fn tfidf_weight(term_count: usize, idf: f64) -> f64 {
    term_count as f64 * idf
}

/// Fits `idf(w) = ln(|D| / f_{w,D})` over the given questions.
pub fn fit_tfidf<S: AsRef<str>>(token_lists: &[Vec<S>], vocab: &Vocabulary) -> Result<EmbeddingModel> {
    if token_lists.is_empty() {
        return Err(Error::invalid("no questions"));
    }
    let mut doc_freq = vec![0usize; vocab.len()];
    let mut seen = vec![usize::MAX; vocab.len()];
    for (d, tokens) in token_lists.iter().enumerate() {
        for t in tokens {
            if let Some(j) = vocab.index_of(t.as_ref()) {
                if seen[j] != d {
                    seen[j] = d;
                    doc_freq[j] += 1;
                }
            }
        }
    }
    let n_docs = token_lists.len() as f64;
    let idf = doc_freq
        .iter()
        .enumerate()
        .map(|(j, &df)| {
            if df == 0 {
                Err(Error::invalid(format!(
                    "vocabulary word `{}` never occurs in the corpus",
                    vocab.word(j).unwrap_or_default()
                )))
            } else {
                Ok((n_docs / df as f64).ln())
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    EmbeddingModel::new(EmbeddingKind::Tfidf, vocab.clone(), ModelWeights::Idf(idf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::embed_question;
    use crate::vocab::build_vocabulary;

    #[test]
    fn ubiquitous_word_has_zero_weight() {
        let lists = vec![vec!["the", "a"], vec!["the", "b"], vec!["the"]];
        let vocab = build_vocabulary(&lists).unwrap();
        let model = fit_tfidf(&lists, &vocab).unwrap();
        let the = vocab.index_of("the").unwrap();
        for tokens in &lists {
            assert_eq!(embed_question(&model, tokens).values[the], 0.0);
        }
        assert_eq!(model.dim(), vocab.len());
    }

    #[test]
    fn hand_weight() {
        // f_{w,d} = 3, |D| = 100, f_{w,D} = 10
        let w = tfidf_weight(3, (100.0f64 / 10.0).ln());
        assert!((w - 6.907755278982137).abs() < 1e-12);
    }

    #[test]
    fn idf_from_document_frequency() {
        let mut lists: Vec<Vec<&str>> = vec![vec!["x"]; 90];
        for list in lists.iter_mut().take(10) {
            list.push("rare");
        }
        let vocab = build_vocabulary(&lists).unwrap();
        let model = fit_tfidf(&lists, &vocab).unwrap();
        let q = embed_question(&model, &["rare", "rare", "rare"]);
        assert!((q.values[vocab.index_of("rare").unwrap()] - 3.0 * 9.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn unseen_vocabulary_word_rejected() {
        let vocab = Vocabulary::from_words(["a", "b"]).unwrap();
        assert!(fit_tfidf(&[vec!["a"]], &vocab).is_err());
    }
}
