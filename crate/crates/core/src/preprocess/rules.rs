use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rewrites every match of `pattern` to the single token `replacement`.
///
/// Patterns are matched case-insensitively on word boundaries. A `*` matches
/// the rest of the current word (zero or more letters or digits), so
/// `суббот*` covers every inflection sharing that stem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionRule {
    pub pattern: String,
    pub replacement: String,
}

impl SubstitutionRule {
    pub fn new(pattern: impl Into<String>, replacement: impl Into<String>) -> Result<Self> {
        let rule = SubstitutionRule {
            pattern: pattern.into(),
            replacement: replacement.into(),
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pattern.is_empty() {
            return Err(Error::invalid("substitution pattern is empty"));
        }
        if self.replacement.is_empty() || self.replacement.chars().any(char::is_whitespace) {
            return Err(Error::invalid(format!(
                "replacement `{}` must be a single non-empty token",
                self.replacement
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Element {
    Char(char),
    Wild,
}

impl Element {
    fn is_wordlike(self) -> bool {
        match self {
            Element::Char(c) => c.is_alphanumeric(),
            Element::Wild => true,
        }
    }
}

fn fold_case(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

/// Rule set compiled for matching; rules are ordered longest pattern first
/// (ties keep their original order).
#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    compiled: Vec<(Vec<Element>, String)>,
}

impl RuleSet {
    pub fn new(rules: &[SubstitutionRule]) -> Result<Self> {
        let mut compiled = Vec::with_capacity(rules.len());
        for rule in rules {
            rule.validate()?;
            let pattern: Vec<Element> = rule
                .pattern
                .chars()
                .map(|c| if c == '*' { Element::Wild } else { Element::Char(fold_case(c)) })
                .collect();
            compiled.push((pattern, rule.replacement.clone()));
        }
        compiled.sort_by_key(|c| std::cmp::Reverse(c.0.len()));
        Ok(RuleSet { compiled })
    }

    pub fn is_empty(&self) -> bool {
        self.compiled.is_empty()
    }

    /// Single left-to-right pass; replaced text is never rescanned.
    pub fn apply(&self, text: &str) -> String {
        if self.compiled.is_empty() {
            return text.to_string();
        }
        let chars: Vec<char> = text.chars().collect();
        let mut out = String::with_capacity(text.len());
        let mut i = 0;
        while i < chars.len() {
            let hit = self
                .compiled
                .iter()
                .find_map(|(pattern, replacement)| match_at(pattern, &chars, i).map(|end| (end, replacement)));
            match hit {
                Some((end, replacement)) => {
                    out.push_str(replacement);
                    i = end;
                }
                None => {
                    out.push(chars[i]);
                    i += 1;
                }
            }
        }
        out
    }
}

/// End position of a non-empty match of `pattern` starting at `start`.
fn match_at(pattern: &[Element], text: &[char], start: usize) -> Option<usize> {
    let first = *pattern.first()?;
    if first.is_wordlike() && start > 0 && text[start - 1].is_alphanumeric() {
        return None;
    }
    let mut pos = start;
    for &element in pattern {
        match element {
            Element::Char(c) => {
                if pos >= text.len() || fold_case(text[pos]) != c {
                    return None;
                }
                pos += 1;
            }
            Element::Wild => {
                while pos < text.len() && text[pos].is_alphanumeric() {
                    pos += 1;
                }
            }
        }
    }
    let last = *pattern.last()?;
    if last.is_wordlike() && pos < text.len() && text[pos].is_alphanumeric() {
        return None;
    }
    (pos > start).then_some(pos)
}

pub fn apply_substitution_rules(text: &str, rules: &[SubstitutionRule]) -> Result<String> {
    Ok(RuleSet::new(rules)?.apply(text))
}

/// Parses `pattern<TAB>replacement` lines; blank lines and `#` comment lines are skipped.
pub fn parse_rules(input: &str, origin: &str) -> Result<Vec<SubstitutionRule>> {
    let mut rules = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (pattern, replacement) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(origin, i + 1, "expected `pattern<TAB>replacement`"))?;
        let rule = SubstitutionRule::new(pattern.trim(), replacement.trim())
            .map_err(|e| Error::parse(origin, i + 1, e.to_string()))?;
        rules.push(rule);
    }
    Ok(rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(p: &str, r: &str) -> SubstitutionRule {
        SubstitutionRule::new(p, r).unwrap()
    }

    #[test]
    fn empty_rule_set_is_identity() {
        assert_eq!(apply_substitution_rules("open doors day", &[]).unwrap(), "open doors day");
    }

    #[test]
    fn literal_rule() {
        let out = apply_substitution_rules("submit on saturday", &[rule("saturday", "WEEKDAY")]).unwrap();
        assert_eq!(out, "submit on WEEKDAY");
    }

    #[test]
    fn longest_pattern_wins() {
        let rules = [rule("open", "X"), rule("open doors", "EVENT")];
        assert_eq!(RuleSet::new(&rules).unwrap().apply("open doors day"), "EVENT day");
        assert_eq!(RuleSet::new(&rules).unwrap().apply("open day"), "X day");
    }

    #[test]
    fn word_boundaries_and_case() {
        let rules = [rule("day", "D")];
        let set = RuleSet::new(&rules).unwrap();
        assert_eq!(set.apply("Day, someday, day."), "D, someday, D.");
    }

    #[test]
    fn wildcard_matches_stem() {
        let set = RuleSet::new(&[rule("суббот*", "WEEKDAY")]).unwrap();
        assert_eq!(set.apply("в субботу или Суббота?"), "в WEEKDAY или WEEKDAY?");
    }

    #[test]
    fn replacements_are_not_rescanned() {
        let set = RuleSet::new(&[rule("a", "b"), rule("b", "c")]).unwrap();
        assert_eq!(set.apply("a b"), "b c");
    }

    #[test]
    fn rules_file() {
        let rules = parse_rules("# comment\nсуббот*\tWEEKDAY\n\nday\tDAY\n", "r").unwrap();
        assert_eq!(rules.len(), 2);
        assert!(parse_rules("nopattern\n", "r").is_err());
        let err = parse_rules("x\ttwo words\n", "r").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
