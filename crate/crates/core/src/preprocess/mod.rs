//! Raw question text to filtered token lists.
//!
//! The pipeline runs in a fixed order: substitution rules on the raw text,
//! tokenization into letter/digit runs, per-token filters, then the
//! normalizer. Stopword checks look at the normalized lowercase form.

mod rules;
mod script;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use rules::{apply_substitution_rules, parse_rules, RuleSet, SubstitutionRule};
pub use script::Script;

/// Token-to-token normalization step (stemmer, lemmatizer, case folding).
pub trait Normalizer: Send + Sync {
    fn name(&self) -> String;
    fn normalize(&self, token: &str) -> String;
}

/// Built-in normalizers selectable by name: `lowercase`, `identity`, `prefix:N`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NormalizerSpec {
    #[default]
    Lowercase,
    Identity,
    /// Lowercase and keep at most the first `N` characters (a crude stemmer).
    Prefix(usize),
}

impl Normalizer for NormalizerSpec {
    fn name(&self) -> String {
        self.to_string()
    }

    fn normalize(&self, token: &str) -> String {
        match *self {
            NormalizerSpec::Lowercase => token.to_lowercase(),
            NormalizerSpec::Identity => token.to_string(),
            NormalizerSpec::Prefix(n) => token.to_lowercase().chars().take(n).collect(),
        }
    }
}

impl FromStr for NormalizerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowercase" => Ok(NormalizerSpec::Lowercase),
            "identity" => Ok(NormalizerSpec::Identity),
            _ => match s.strip_prefix("prefix:").map(str::parse::<usize>) {
                Some(Ok(n)) if n > 0 => Ok(NormalizerSpec::Prefix(n)),
                _ => Err(Error::invalid(format!(
                    "unknown normalizer `{s}` (lowercase|identity|prefix:N)"
                ))),
            },
        }
    }
}

impl TryFrom<String> for NormalizerSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<NormalizerSpec> for String {
    fn from(spec: NormalizerSpec) -> String {
        spec.to_string()
    }
}

impl fmt::Display for NormalizerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalizerSpec::Lowercase => f.write_str("lowercase"),
            NormalizerSpec::Identity => f.write_str("identity"),
            NormalizerSpec::Prefix(n) => write!(f, "prefix:{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessConfig {
    pub rules: Vec<SubstitutionRule>,
    pub stopwords: BTreeSet<String>,
    pub custom_stopwords: BTreeSet<String>,
    pub drop_digit_tokens: bool,
    /// When set, tokens containing letters outside this script are dropped.
    pub allowed_script: Option<Script>,
    pub normalizer: NormalizerSpec,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            rules: Vec::new(),
            stopwords: BTreeSet::new(),
            custom_stopwords: BTreeSet::new(),
            drop_digit_tokens: true,
            allowed_script: None,
            normalizer: NormalizerSpec::Lowercase,
        }
    }
}

impl PreprocessConfig {
    /// No rules, no filters, lowercase normalizer.
    pub fn identity() -> Self {
        PreprocessConfig {
            drop_digit_tokens: false,
            ..Default::default()
        }
    }

    pub fn with_stopwords<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.stopwords
            .extend(words.into_iter().map(|w| w.as_ref().to_lowercase()));
        self
    }

    pub fn with_custom_stopwords<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.custom_stopwords
            .extend(words.into_iter().map(|w| w.as_ref().to_lowercase()));
        self
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::invalid(format!("cannot serialize config: {e}")))
    }

    pub fn from_toml(input: &str, origin: &str) -> Result<Self> {
        let mut config: PreprocessConfig =
            toml::from_str(input).map_err(|e| Error::parse(origin, 0, e.to_string()))?;
        for rule in &config.rules {
            rule.validate().map_err(|e| Error::parse(origin, 0, e.to_string()))?;
        }
        config.stopwords = config.stopwords.iter().map(|w| w.to_lowercase()).collect();
        config.custom_stopwords = config.custom_stopwords.iter().map(|w| w.to_lowercase()).collect();
        Ok(config)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_toml()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, &path.display().to_string())
    }
}

/// One word per line; `#` starts a comment. Words are lowercased.
pub fn parse_stopwords(input: &str) -> BTreeSet<String> {
    input
        .lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn load_stopwords(path: impl AsRef<Path>) -> Result<BTreeSet<String>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}

pub fn load_rules(path: impl AsRef<Path>) -> Result<Vec<SubstitutionRule>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_rules(&text, &path.display().to_string())
}

/// Maximal runs of letters and digits, in order. Everything else separates.
pub fn tokenize(text: &str) -> Vec<&str> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .collect()
}

/// Compiled form of a [`PreprocessConfig`], optionally with a custom normalizer.
#[derive(Clone)]
pub struct Preprocessor {
    config: PreprocessConfig,
    rules: RuleSet,
    normalizer: Arc<dyn Normalizer>,
}

impl fmt::Debug for Preprocessor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Preprocessor")
            .field("config", &self.config)
            .field("normalizer", &self.normalizer.name())
            .finish()
    }
}

impl Preprocessor {
    pub fn new(config: PreprocessConfig) -> Result<Self> {
        let rules = RuleSet::new(&config.rules)?;
        let normalizer: Arc<dyn Normalizer> = Arc::new(config.normalizer);
        Ok(Preprocessor {
            config,
            rules,
            normalizer,
        })
    }

    /// Replaces the configured normalizer.
    pub fn with_normalizer(mut self, normalizer: Arc<dyn Normalizer>) -> Self {
        self.normalizer = normalizer;
        self
    }

    pub fn config(&self) -> &PreprocessConfig {
        &self.config
    }

    pub fn process(&self, text: &str) -> Vec<String> {
        let substituted = self.rules.apply(text);
        tokenize(&substituted)
            .into_iter()
            .filter(|token| self.keeps_raw(token))
            .map(|token| self.normalizer.normalize(token))
            .filter(|norm| !norm.is_empty() && !norm.chars().any(char::is_whitespace))
            .filter(|norm| {
                let lower = norm.to_lowercase();
                !self.config.stopwords.contains(&lower) && !self.config.custom_stopwords.contains(&lower)
            })
            .collect()
    }

    pub fn process_all<S: AsRef<str> + Sync>(&self, texts: &[S], exec: crate::Exec) -> Vec<Vec<String>> {
        exec.map(texts, |t| self.process(t.as_ref()))
    }

    fn keeps_raw(&self, token: &str) -> bool {
        if self.config.drop_digit_tokens && token.chars().any(char::is_numeric) {
            return false;
        }
        match self.config.allowed_script {
            Some(script) => script.admits(token),
            None => true,
        }
    }
}

pub fn preprocess_question(text: &str, config: &PreprocessConfig) -> Result<Vec<String>> {
    Ok(Preprocessor::new(config.clone())?.process(text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_splits_on_punctuation() {
        assert_eq!(tokenize("Hello, world!"), ["Hello", "world"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("можно ли 123"), ["можно", "ли", "123"]);
        assert_eq!(tokenize("e-mail: x_y"), ["e", "mail", "x", "y"]);
    }

    #[test]
    fn only_stopwords() {
        let config = PreprocessConfig::default().with_stopwords(["когда", "ли"]);
        assert!(preprocess_question("Когда ли?", &config).unwrap().is_empty());
    }

    #[test]
    fn digit_and_foreign_tokens_dropped() {
        let config = PreprocessConfig {
            allowed_script: Some(Script::Cyrillic),
            ..Default::default()
        };
        let out = preprocess_question("подать 123 abc документы", &config).unwrap();
        assert_eq!(out, ["подать", "документы"]);
    }

    #[test]
    fn identity_config_lowercases() {
        let out = preprocess_question("Open Doors DAY 2024", &PreprocessConfig::identity()).unwrap();
        assert_eq!(out, ["open", "doors", "day", "2024"]);
    }

    #[test]
    fn stopwords_checked_after_normalization() {
        let config = PreprocessConfig {
            normalizer: NormalizerSpec::Prefix(4),
            ..Default::default()
        }
        .with_custom_stopwords(["доку"]);
        let out = preprocess_question("Документы нужны", &config).unwrap();
        assert_eq!(out, ["нужн"]);
    }

    #[test]
    fn rules_run_before_tokenizing() {
        let config = PreprocessConfig {
            rules: vec![SubstitutionRule::new("open doors day", "OPENDAY").unwrap()],
            ..Default::default()
        };
        let out = preprocess_question("When is open doors day?", &config).unwrap();
        assert_eq!(out, ["when", "is", "openday"]);
    }

    struct Reverse;
    impl Normalizer for Reverse {
        fn name(&self) -> String {
            "reverse".into()
        }
        fn normalize(&self, token: &str) -> String {
            token.chars().rev().collect()
        }
    }

    #[test]
    fn custom_normalizer_plugs_in() {
        let p = Preprocessor::new(PreprocessConfig::default())
            .unwrap()
            .with_normalizer(Arc::new(Reverse));
        assert_eq!(p.process("abc de"), ["cba", "ed"]);
    }

    #[test]
    fn config_toml_round_trip() {
        let config = PreprocessConfig {
            rules: vec![SubstitutionRule::new("суббот*", "WEEKDAY").unwrap()],
            drop_digit_tokens: false,
            allowed_script: Some(Script::Cyrillic),
            normalizer: NormalizerSpec::Prefix(5),
            ..Default::default()
        }
        .with_stopwords(["и", "в"])
        .with_custom_stopwords(["пожалуйста"]);
        let text = config.to_toml().unwrap();
        assert_eq!(PreprocessConfig::from_toml(&text, "t").unwrap(), config);
    }

    #[test]
    fn normalizer_names_parse() {
        for name in ["lowercase", "identity", "prefix:6"] {
            assert_eq!(name.parse::<NormalizerSpec>().unwrap().to_string(), name);
        }
        assert!("prefix:0".parse::<NormalizerSpec>().is_err());
        assert!("porter".parse::<NormalizerSpec>().is_err());
    }

    #[test]
    fn stopword_file_comments() {
        let words = parse_stopwords("# header\nИ\nв  # preposition\n\n");
        assert_eq!(words.into_iter().collect::<Vec<_>>(), ["в", "и"]);
    }
}
