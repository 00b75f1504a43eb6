use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Bijection between words and dense indices `0..V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Keeps the given order. Rejects duplicates and empty input.
    pub fn from_words<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let words: Vec<String> = words.into_iter().map(Into::into).collect();
        if words.is_empty() {
            return Err(Error::invalid("vocabulary is empty"));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate vocabulary word `{w}`")));
            }
        }
        Ok(Vocabulary { words, index })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, index: usize) -> Option<&str> {
        self.words.get(index).map(String::as_str)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }
}

/// Vocabulary over the distinct tokens, ordered by code point.
pub fn build_vocabulary<S: AsRef<str>>(token_lists: &[Vec<S>]) -> Result<Vocabulary> {
    let distinct: BTreeSet<&str> = token_lists
        .iter()
        .flat_map(|list| list.iter().map(AsRef::as_ref))
        .collect();
    if distinct.is_empty() {
        return Err(Error::invalid("all token lists are empty"));
    }
    Vocabulary::from_words(distinct)
}
