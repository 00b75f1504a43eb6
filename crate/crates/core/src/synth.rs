//! Seeded synthetic corpora for tests, benchmarks and demos.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Corpus;

const CLASS_NAMES: [&str; 6] = ["DOC", "ENTER", "ORG", "PRIV", "RANG", "HOST"];

/// Letters-only word `prefix` + base-26 encoding of `i`.
pub fn pseudo_word(prefix: &str, i: usize) -> String {
    let mut suffix = Vec::new();
    let mut n = i;
    loop {
        suffix.push(b'a' + (n % 26) as u8);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    suffix.reverse();
    format!("{prefix}{}", String::from_utf8(suffix).expect("ascii"))
}

pub fn class_name(c: usize) -> String {
    CLASS_NAMES
        .get(c)
        .map_or_else(|| pseudo_word("CLASS", c).to_uppercase(), |s| s.to_string())
}

/// Questions made of class-exclusive keywords and shared filler words.
#[derive(Clone, Debug)]
pub struct KeywordCorpusSpec {
    pub questions: usize,
    pub classes: usize,
    pub keywords_per_class: usize,
    /// Distinct keywords drawn for each question.
    pub keywords_per_question: usize,
    pub filler_words: usize,
    /// Inclusive range of filler tokens per question.
    pub filler_per_question: (usize, usize),
    pub seed: u64,
}

impl Default for KeywordCorpusSpec {
    fn default() -> Self {
        KeywordCorpusSpec {
            questions: 200,
            classes: 6,
            keywords_per_class: 5,
            keywords_per_question: 2,
            filler_words: 40,
            filler_per_question: (2, 4),
            seed: 42,
        }
    }
}

/// Question `i` belongs to class `i mod classes`, so classes are balanced.
pub fn keyword_corpus(spec: &KeywordCorpusSpec) -> Corpus {
    assert!(spec.classes > 0 && spec.questions >= spec.classes, "need at least one question per class");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let keywords: Vec<Vec<String>> = (0..spec.classes)
        .map(|c| {
            (0..spec.keywords_per_class)
                .map(|j| pseudo_word(&format!("kw{}", pseudo_word("", c)), j))
                .collect()
        })
        .collect();
    let fillers: Vec<String> = (0..spec.filler_words).map(|j| pseudo_word("filler", j)).collect();
    let rows: Vec<(String, String)> = (0..spec.questions)
        .map(|i| {
            let c = i % spec.classes;
            let mut words: Vec<&str> = keywords[c]
                .choose_multiple(&mut rng, spec.keywords_per_question)
                .map(String::as_str)
                .collect();
            if !fillers.is_empty() {
                let (lo, hi) = spec.filler_per_question;
                for _ in 0..rng.random_range(lo..=hi) {
                    words.push(fillers[rng.random_range(0..fillers.len())].as_str());
                }
            }
            words.shuffle(&mut rng);
            (words.join(" "), class_name(c))
        })
        .collect();
    Corpus::new(rows).expect("generated corpus is valid")
}

/// Questions drawn uniformly from a large word pool; labels carry no signal.
pub fn wide_vocabulary_corpus(questions: usize, pool: usize, tokens_per_question: usize, classes: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<(String, String)> = (0..questions)
        .map(|i| {
            let words: Vec<String> = (0..tokens_per_question)
                .map(|_| pseudo_word("w", rng.random_range(0..pool)))
                .collect();
            (words.join(" "), class_name(i % classes))
        })
        .collect();
    Corpus::new(rows).expect("generated corpus is valid")
}
