use qembed::classify::{predict, train_ovr_logreg_with, Hyperparams};
use qembed::corpus::{Corpus, FoldStrategy};
use qembed::embed::{embed_batch, EmbeddingKind};
use qembed::evaluate::{cross_validate, fit_embedding, CvConfig, MethodConfig};
use qembed::preprocess::{PreprocessConfig, Preprocessor};
use qembed::synth::{keyword_corpus, KeywordCorpusSpec};
use qembed::Exec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shuffled_labels(corpus: &Corpus, seed: u64) -> Corpus {
    let mut labels: Vec<String> = corpus.question_labels().iter().map(|s| s.to_string()).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    corpus.relabeled(&labels).unwrap()
}

#[test]
fn leave_one_out_matches_hand_loop() {
    let corpus = keyword_corpus(&KeywordCorpusSpec {
        questions: 10,
        classes: 2,
        ..KeywordCorpusSpec::default()
    });
    let preprocess = PreprocessConfig::default();
    let hp = Hyperparams::default();
    let cv = CvConfig {
        folds: 10,
        seed: 5,
        strategy: FoldStrategy::Shuffled,
        exec: Exec::Sequential,
    };
    for kind in [EmbeddingKind::Entropy, EmbeddingKind::Tfidf, EmbeddingKind::PmiVsm] {
        let method = MethodConfig::new(kind).with_dim(4);
        let result = cross_validate(&corpus, &preprocess, &method, &hp, &cv).unwrap();

        let tokens = Preprocessor::new(preprocess.clone()).unwrap().process_all(&corpus.texts(), Exec::Sequential);
        let labels = corpus.question_labels();
        for fold in &result.folds {
            assert_eq!(fold.test_indices.len(), 1);
            let held = fold.test_indices[0];
            let seed = 5 + fold.fold as u64;
            let train_tokens: Vec<Vec<String>> = (0..10).filter(|&i| i != held).map(|i| tokens[i].clone()).collect();
            let train_labels: Vec<&str> = (0..10).filter(|&i| i != held).map(|i| labels[i]).collect();
            let model = fit_embedding(&method, &train_tokens, seed, Exec::Sequential).unwrap();
            let (x, _) = embed_batch(&model, &train_tokens, Exec::Sequential);
            let hp = Hyperparams { seed, ..hp };
            let (clf, _) = train_ovr_logreg_with(&x, &train_labels, corpus.labels(), &hp, Exec::Sequential).unwrap();
            let (xt, _) = embed_batch(&model, &[tokens[held].clone()], Exec::Sequential);
            let p = predict(&clf, xt.row(0)).unwrap();
            assert_eq!(result.predictions[held], p.index, "{kind} question {held}");
        }
    }
}

#[test]
fn keyword_corpus_is_learned_and_shuffled_labels_are_not() {
    let corpus = keyword_corpus(&KeywordCorpusSpec::default());
    let method = MethodConfig::new(EmbeddingKind::Entropy).with_dim(20);
    let cv = CvConfig::default();
    let hp = Hyperparams::default();
    let real = cross_validate(&corpus, &PreprocessConfig::default(), &method, &hp, &cv).unwrap();
    assert!(real.pooled.weighted_f1 >= 0.9, "{}", real.pooled.weighted_f1);
    for seed in [1, 2, 3] {
        let control = cross_validate(&shuffled_labels(&corpus, seed), &PreprocessConfig::default(), &method, &hp, &cv).unwrap();
        let f1 = control.pooled.weighted_f1;
        assert!((f1 - 1.0 / 6.0).abs() <= 0.1, "seed {seed}: {f1}");
    }
}

#[test]
fn row_order_changes_folds_but_not_quality() {
    let corpus = keyword_corpus(&KeywordCorpusSpec::default());
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(17));
    let permuted = corpus.select(&order).unwrap();
    let method = MethodConfig::new(EmbeddingKind::Entropy).with_dim(20);
    let cv = CvConfig::default();
    let a = cross_validate(&corpus, &PreprocessConfig::default(), &method, &Hyperparams::default(), &cv).unwrap();
    let b = cross_validate(&permuted, &PreprocessConfig::default(), &method, &Hyperparams::default(), &cv).unwrap();
    let moved = order.iter().enumerate().filter(|(new, &old)| {
        a.folds.iter().position(|f| f.test_indices.contains(&old)) != b.folds.iter().position(|f| f.test_indices.contains(new))
    });
    assert!(moved.count() > 0);
    assert!((a.pooled.weighted_f1 - b.pooled.weighted_f1).abs() < 0.05);
}

#[test]
fn stratified_folds_see_every_class() {
    let corpus = keyword_corpus(&KeywordCorpusSpec {
        questions: 60,
        ..KeywordCorpusSpec::default()
    });
    let cv = CvConfig {
        strategy: FoldStrategy::Stratified,
        ..CvConfig::default()
    };
    let method = MethodConfig::new(EmbeddingKind::Tfidf);
    let result = cross_validate(&corpus, &PreprocessConfig::default(), &method, &Hyperparams::default(), &cv).unwrap();
    for fold in &result.folds {
        assert!(fold.missing_classes.is_empty());
        assert_eq!(fold.report.classes.iter().map(|c| c.support).sum::<usize>(), 12);
    }
    assert_eq!(result.fingerprint.strategy, FoldStrategy::Stratified);
}
