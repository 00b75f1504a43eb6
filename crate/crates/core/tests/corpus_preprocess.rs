use proptest::prelude::*;
use qembed::corpus::{load_corpus, split_folds, DataFormat, FoldStrategy};
use qembed::preprocess::{apply_substitution_rules, preprocess_question, NormalizerSpec, PreprocessConfig, Script, SubstitutionRule};
use qembed::vocab::build_vocabulary;
use qembed_oracles::apply_rules_oracle;

fn strategy() -> impl Strategy<Value = FoldStrategy> {
    prop_oneof![Just(FoldStrategy::Shuffled), Just(FoldStrategy::Stratified)]
}

proptest! {
    #[test]
    fn folds_partition_questions(n in 2usize..120, k_raw in 2usize..12, seed: u64, strat in strategy(), classes in 1usize..5) {
        let k = k_raw.min(n);
        let labels: Vec<usize> = (0..n).map(|i| (i * 7 + i / 3) % classes).collect();
        let plan = split_folds(n, &labels, k, seed, strat).unwrap();
        let mut seen = vec![0usize; n];
        for f in 0..k {
            for i in plan.test_indices(f) {
                seen[i] += 1;
            }
            let train = plan.train_indices(f);
            prop_assert_eq!(train.len() + plan.test_indices(f).len(), n);
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        let sizes = plan.fold_sizes();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn seeds_only_permute_fold_sizes(n in 2usize..200, k_raw in 2usize..10, a: u64, b: u64) {
        let k = k_raw.min(n);
        let labels = vec![0u8; n];
        let mut x = split_folds(n, &labels, k, a, FoldStrategy::Shuffled).unwrap().fold_sizes();
        let mut y = split_folds(n, &labels, k, b, FoldStrategy::Shuffled).unwrap().fold_sizes();
        x.sort();
        y.sort();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn vocabulary_is_a_bijection(lists in prop::collection::vec(prop::collection::vec("[a-eа-г]{1,4}", 0..8), 1..10)) {
        prop_assume!(lists.iter().any(|l| !l.is_empty()));
        let vocab = build_vocabulary(&lists).unwrap();
        for i in 0..vocab.len() {
            prop_assert_eq!(vocab.index_of(vocab.word(i).unwrap()), Some(i));
        }
        for w in lists.iter().flatten() {
            prop_assert!(vocab.contains(w));
        }
        let words = vocab.words();
        prop_assert!(words.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn preprocessing_is_idempotent(
        text in "[a-zA-Zа-яА-Я0-9 .,!?-]{0,60}",
        keep_digits: bool,
        script in prop::option::of(prop_oneof![Just(Script::Latin), Just(Script::Cyrillic)]),
        prefix in prop::option::of(2usize..6),
    ) {
        let mut config = PreprocessConfig::default().with_stopwords(["the", "и", "a"]);
        config.drop_digit_tokens = !keep_digits;
        config.allowed_script = script;
        if let Some(n) = prefix {
            config.normalizer = NormalizerSpec::Prefix(n);
        }
        let once = preprocess_question(&text, &config).unwrap();
        let twice = preprocess_question(&once.join(" "), &config).unwrap();
        prop_assert_eq!(&once, &twice);
        for token in &once {
            prop_assert!(!token.is_empty() && !token.chars().any(char::is_whitespace));
            prop_assert!(!config.stopwords.contains(&token.to_lowercase()));
            if !keep_digits {
                prop_assert!(!token.chars().any(char::is_numeric));
            }
            if let Some(s) = script {
                prop_assert!(s.admits(token));
            }
        }
    }

    #[test]
    fn rules_match_enumeration_oracle(
        text in "[abAB .]{0,30}",
        rules in prop::collection::vec(("[ab]{1,3}( [ab]{1,2})?\\*?", "[XYZ]{1,2}"), 0..5),
    ) {
        let parsed: Vec<SubstitutionRule> = rules
            .iter()
            .map(|(p, r)| SubstitutionRule::new(p.clone(), r.clone()).unwrap())
            .collect();
        prop_assert_eq!(apply_substitution_rules(&text, &parsed).unwrap(), apply_rules_oracle(&text, &rules));
    }
}

#[test]
fn overlapping_patterns_take_the_longest() {
    let rules = vec![
        SubstitutionRule::new("в суббот*", "weekend").unwrap(),
        SubstitutionRule::new("суббот*", "saturday").unwrap(),
    ];
    assert_eq!(apply_substitution_rules("Работаете в субботу?", &rules).unwrap(), "Работаете weekend?");
    assert_eq!(apply_substitution_rules("субботам", &rules).unwrap(), "saturday");
}

#[test]
fn reloading_gives_identical_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.tsv");
    std::fs::write(&path, "text\tlabel\nкогда открыто?\tHOST\nгде офис\tORG\n\nкак подать документы\tDOC\n").unwrap();
    let a = load_corpus(&path, DataFormat::Tsv).unwrap();
    let b = load_corpus(&path, DataFormat::Tsv).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 3);
    assert_eq!(a.labels(), ["HOST", "ORG", "DOC"]);
}

#[test]
fn cyrillic_pipeline_example() {
    let config = PreprocessConfig {
        allowed_script: Some(Script::Cyrillic),
        ..PreprocessConfig::default()
    };
    assert_eq!(
        preprocess_question("подать 123 abc документы", &config).unwrap(),
        ["подать", "документы"]
    );
    assert_eq!(qembed::preprocess::tokenize("можно ли 123"), ["можно", "ли", "123"]);
}
