use std::sync::Arc;

use super::metrics::{classification_report_indices, EvalReport};
use crate::classify::{predict_batch, train_ovr_logreg_with, Hyperparams, LogRegModel};
use crate::corpus::{split_folds, Corpus, FoldStrategy};
use crate::embed::{
    embed_batch, fit_entropy_embedding_with, fit_pmi_vsm_with, fit_tfidf, Averaging, EmbeddingKind,
    EmbeddingModel, EntropyOptions, DEFAULT_WINDOW, ENTROPY_FILL,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numerics::{SvdMethod, SvdOptions};
use crate::preprocess::{PreprocessConfig, Preprocessor};
use crate::vocab::build_vocabulary;

/// Which vectorizer to fit and its settings.
#[derive(Clone, Debug)]
pub struct MethodConfig {
    pub kind: EmbeddingKind,
    /// Target dimension for the SVD-reduced kinds.
    pub dim: usize,
    /// Co-occurrence window radius for PMI.
    pub window: usize,
    /// Entropy value for absent words.
    pub fill: f64,
    pub averaging: Averaging,
    pub svd: SvdMethod,
    /// Pretrained vectors, required for [`EmbeddingKind::External`].
    pub external: Option<Arc<EmbeddingModel>>,
}

impl MethodConfig {
    pub fn new(kind: EmbeddingKind) -> Self {
        MethodConfig {
            kind,
            dim: 200,
            window: DEFAULT_WINDOW,
            fill: ENTROPY_FILL,
            averaging: Averaging::Set,
            svd: SvdMethod::Auto,
            external: None,
        }
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if self.window == 0 {
            return Err(Error::invalid("window must be at least 1"));
        }
        if !self.fill.is_finite() {
            return Err(Error::invalid("fill value must be finite"));
        }
        if self.kind == EmbeddingKind::External && self.external.is_none() {
            return Err(Error::invalid("method `external` requires a word-vector file"));
        }
        Ok(())
    }
}

/// Fits the configured vectorizer on preprocessed training questions.
/// External vectors are used as given.
pub fn fit_embedding<S: AsRef<str> + Sync>(
    method: &MethodConfig,
    token_lists: &[Vec<S>],
    seed: u64,
    exec: Exec,
) -> Result<EmbeddingModel> {
    method.validate()?;
    let svd = SvdOptions {
        method: method.svd,
        seed,
        exec,
    };
    let model = match method.kind {
        EmbeddingKind::External => {
            return Ok(method
                .external
                .as_deref()
                .expect("validated")
                .clone()
                .with_averaging(method.averaging))
        }
        EmbeddingKind::Entropy => {
            let vocab = build_vocabulary(token_lists)?;
            let options = EntropyOptions { fill: method.fill, svd };
            fit_entropy_embedding_with(token_lists, &vocab, method.dim, &options)?
        }
        EmbeddingKind::Tfidf => fit_tfidf(token_lists, &build_vocabulary(token_lists)?)?,
        EmbeddingKind::PmiVsm => {
            let vocab = build_vocabulary(token_lists)?;
            fit_pmi_vsm_with(token_lists, &vocab, method.window, method.dim, &svd)?
        }
    };
    Ok(model.with_averaging(method.averaging))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CvConfig {
    pub folds: usize,
    pub seed: u64,
    pub strategy: FoldStrategy,
    pub exec: Exec,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 5,
            seed: 42,
            strategy: FoldStrategy::Shuffled,
            exec: Exec::default(),
        }
    }
}

/// Settings that identify a cross-validation run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub method: EmbeddingKind,
    pub dim: usize,
    pub seed: u64,
    pub folds: usize,
    pub strategy: FoldStrategy,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoldOutcome {
    pub fold: usize,
    pub test_indices: Vec<usize>,
    /// Predicted class index per test question, aligned with `test_indices`.
    pub predicted: Vec<usize>,
    pub report: EvalReport,
    /// Dimension of the embedding fitted on this fold's training part.
    pub embedding_dim: usize,
    /// Classes with no training question in this fold.
    pub missing_classes: Vec<String>,
    /// Test questions with no in-vocabulary token.
    pub empty_embeddings: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvResult {
    pub classes: Vec<String>,
    pub folds: Vec<FoldOutcome>,
    /// Report over all out-of-fold predictions together.
    pub pooled: EvalReport,
    /// Out-of-fold predicted class index for every corpus question.
    pub predictions: Vec<usize>,
    pub fingerprint: Fingerprint,
}

impl CvResult {
    pub fn mean_fold_weighted_f1(&self) -> f64 {
        self.folds.iter().map(|f| f.report.weighted_f1).sum::<f64>() / self.folds.len() as f64
    }
}

/// k-fold cross-validation of preprocess → embed → one-vs-rest classifier.
///
/// Vocabulary, embedding and classifier are fitted on the training folds
/// only. Fold `f` seeds its SVD and classifier with `seed + f`.
pub fn cross_validate(
    corpus: &Corpus,
    preprocess: &PreprocessConfig,
    method: &MethodConfig,
    hp: &Hyperparams,
    cv: &CvConfig,
) -> Result<CvResult> {
    method.validate()?;
    hp.validate()?;
    let labels = corpus.label_indices();
    let plan = split_folds(corpus.len(), &labels, cv.folds, cv.seed, cv.strategy)?;
    let preprocessor = Preprocessor::new(preprocess.clone())?;
    let tokens = preprocessor.process_all(&corpus.texts(), cv.exec);
    let classes = corpus.labels().to_vec();

    let outcomes = cv.exec.try_map_range(plan.k, |fold| {
        let train = plan.train_indices(fold);
        let test = plan.test_indices(fold);
        let fold_seed = cv.seed.wrapping_add(fold as u64);
        let train_tokens: Vec<&Vec<String>> = train.iter().map(|&i| &tokens[i]).collect();
        let train_tokens: Vec<Vec<&str>> = train_tokens
            .iter()
            .map(|t| t.iter().map(String::as_str).collect())
            .collect();
        let test_tokens: Vec<Vec<&str>> = test
            .iter()
            .map(|&i| tokens[i].iter().map(String::as_str).collect())
            .collect();

        let model = fit_embedding(method, &train_tokens, fold_seed, cv.exec)?;
        let (x_train, _) = embed_batch(&model, &train_tokens, cv.exec);
        let train_labels: Vec<&str> = train.iter().map(|&i| classes[labels[i]].as_str()).collect();
        let fold_hp = Hyperparams {
            seed: fold_seed,
            ..*hp
        };
        let (classifier, _) = train_ovr_logreg_with(&x_train, &train_labels, &classes, &fold_hp, cv.exec)?;

        let (x_test, empty) = embed_batch(&model, &test_tokens, cv.exec);
        let predicted = predict_batch(&classifier, &x_test, cv.exec)?;
        let truth: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
        let report = classification_report_indices(&truth, &predicted, &classes)?;
        let missing_classes = classes
            .iter()
            .enumerate()
            .filter(|(c, _)| !train.iter().any(|&i| labels[i] == *c))
            .map(|(_, name)| name.clone())
            .collect();
        Ok::<_, Error>(FoldOutcome {
            fold,
            test_indices: test,
            predicted,
            report,
            embedding_dim: model.dim(),
            missing_classes,
            empty_embeddings: empty.iter().filter(|&&e| e).count(),
        })
    })?;

    let mut predictions = vec![0usize; corpus.len()];
    for outcome in &outcomes {
        for (&q, &p) in outcome.test_indices.iter().zip(&outcome.predicted) {
            predictions[q] = p;
        }
    }
    let pooled = classification_report_indices(&labels, &predictions, &classes)?;
    Ok(CvResult {
        classes,
        folds: outcomes,
        pooled,
        predictions,
        fingerprint: Fingerprint {
            method: method.kind,
            dim: method.dim,
            seed: cv.seed,
            folds: cv.folds,
            strategy: cv.strategy,
        },
    })
}

/// Embedding and classifier fitted on a whole corpus.
#[derive(Clone, Debug)]
pub struct TrainedPipeline {
    pub preprocess: PreprocessConfig,
    pub embedding: EmbeddingModel,
    pub classifier: LogRegModel,
}

impl TrainedPipeline {
    pub fn fit(
        corpus: &Corpus,
        preprocess: &PreprocessConfig,
        method: &MethodConfig,
        hp: &Hyperparams,
        seed: u64,
        exec: Exec,
    ) -> Result<Self> {
        let preprocessor = Preprocessor::new(preprocess.clone())?;
        let tokens = preprocessor.process_all(&corpus.texts(), exec);
        let embedding = fit_embedding(method, &tokens, seed, exec)?;
        let (x, _) = embed_batch(&embedding, &tokens, exec);
        let hp = Hyperparams { seed, ..*hp };
        let (classifier, _) =
            train_ovr_logreg_with(&x, &corpus.question_labels(), corpus.labels(), &hp, exec)?;
        Ok(TrainedPipeline {
            preprocess: preprocess.clone(),
            embedding,
            classifier,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{keyword_corpus, KeywordCorpusSpec};

    #[test]
    fn external_requires_vectors() {
        let m = MethodConfig::new(EmbeddingKind::External);
        assert!(m.validate().is_err());
    }

    #[test]
    fn folds_cover_corpus_once() {
        let corpus = keyword_corpus(&KeywordCorpusSpec {
            questions: 60,
            ..Default::default()
        });
        let method = MethodConfig::new(EmbeddingKind::Tfidf);
        let r = cross_validate(&corpus, &PreprocessConfig::default(), &method, &Hyperparams::default(), &CvConfig::default())
            .unwrap();
        assert_eq!(r.folds.len(), 5);
        assert_eq!(r.pooled.total, 60);
        let mut seen: Vec<usize> = r.folds.iter().flat_map(|f| f.test_indices.clone()).collect();
        seen.sort();
        assert_eq!(seen, (0..60).collect::<Vec<_>>());
    }

    #[test]
    fn exec_modes_give_identical_results() {
        let corpus = keyword_corpus(&KeywordCorpusSpec {
            questions: 60,
            ..Default::default()
        });
        let method = MethodConfig::new(EmbeddingKind::Entropy).with_dim(8);
        let hp = Hyperparams::default();
        let seq = CvConfig {
            exec: Exec::Sequential,
            ..Default::default()
        };
        let par = CvConfig {
            exec: Exec::Parallel,
            ..Default::default()
        };
        let a = cross_validate(&corpus, &PreprocessConfig::default(), &method, &hp, &seq).unwrap();
        let b = cross_validate(&corpus, &PreprocessConfig::default(), &method, &hp, &par).unwrap();
        assert_eq!(a, b);
    }
}
