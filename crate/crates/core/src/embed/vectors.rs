//! Word-vector text format: a `V d` header, then `word v1 … vd` per line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{EmbeddingKind, EmbeddingModel, ModelWeights, Vocabulary};
use crate::error::{Error, Result};
use crate::numerics::Matrix;

pub fn parse_word_vectors(input: &str, origin: &str) -> Result<(Vocabulary, Matrix)> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (hl, header) = lines.next().ok_or_else(|| Error::parse(origin, 0, "empty file"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let (count, dim) = match dims[..] {
        [v, d] => match (v.parse::<usize>(), d.parse::<usize>()) {
            (Ok(v), Ok(d)) if v > 0 && d > 0 => (v, d),
            _ => return Err(Error::parse(origin, hl, "header must be two positive integers `V d`")),
        },
        _ => return Err(Error::parse(origin, hl, "header must be `V d`")),
    };

    let mut words = Vec::with_capacity(count);
    let mut data = Vec::with_capacity(count * dim);
    let mut seen = std::collections::HashSet::with_capacity(count);
    for (ln, line) in lines {
        let mut fields = line.split_whitespace();
        let word = fields.next().expect("line is not blank");
        let values: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::parse(origin, ln, format!("invalid number `{f}`")))
            })
            .collect::<Result<_>>()?;
        if values.len() != dim {
            return Err(Error::parse(
                origin,
                ln,
                format!("`{word}` has {} values, header says {dim}", values.len()),
            ));
        }
        if !seen.insert(word.to_string()) {
            return Err(Error::parse(origin, ln, format!("duplicate word `{word}`")));
        }
        if words.len() == count {
            return Err(Error::parse(origin, ln, format!("more than {count} rows")));
        }
        words.push(word.to_string());
        data.extend(values);
    }
    if words.len() != count {
        return Err(Error::parse(
            origin,
            0,
            format!("header announces {count} rows, found {}", words.len()),
        ));
    }
    Ok((Vocabulary::from_words(words)?, Matrix::from_vec(count, dim, data)?))
}

pub fn load_external_vectors(path: impl AsRef<Path>) -> Result<EmbeddingModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (vocab, vectors) = parse_word_vectors(&text, &path.display().to_string())?;
    EmbeddingModel::new(EmbeddingKind::External, vocab, ModelWeights::WordVectors(vectors))
}

/// Serializes `(word, row)` pairs. Values use the shortest exact decimal form.
pub fn write_word_vectors<S: AsRef<str>>(words: &[S], vectors: &Matrix) -> Result<String> {
    if words.len() != vectors.rows() {
        return Err(Error::Shape(format!(
            "{} words for {} vectors",
            words.len(),
            vectors.rows()
        )));
    }
    let mut out = format!("{} {}\n", vectors.rows(), vectors.cols());
    for (i, word) in words.iter().enumerate() {
        let word = word.as_ref();
        if word.is_empty() || word.chars().any(char::is_whitespace) {
            return Err(Error::invalid(format!("word `{word}` cannot be written in this format")));
        }
        out.push_str(word);
        for x in vectors.row(i) {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn read_back() {
        let (vocab, m) = parse_word_vectors("2 3\nfoo 1 2 3\nbar -1 0.5 1e-3\n", "t").unwrap();
        assert_eq!(vocab.words(), ["foo", "bar"]);
        assert_eq!(m.shape(), (2, 3));
        assert_eq!(m[(1, 2)], 1e-3);
    }

    #[test]
    fn short_row_names_line() {
        let err = parse_word_vectors("2 3\nfoo 1 2 3\nbar 1 2\n", "t").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_word_vectors("", "t").is_err());
        assert!(parse_word_vectors("2\nfoo 1\n", "t").is_err());
        assert!(parse_word_vectors("x 2\nfoo 1 2\n", "t").is_err());
        assert!(parse_word_vectors("2 1\nfoo 1\nfoo 2\n", "t").is_err());
        assert!(parse_word_vectors("1 1\nfoo 1\nbar 2\n", "t").is_err());
        assert!(parse_word_vectors("2 1\nfoo 1\n", "t").is_err());
        assert!(parse_word_vectors("1 1\nfoo nan\n", "t").is_err());
    }

    #[test]
    fn export_round_trip() {
        let m = Matrix::from_rows(&[[0.1, -2.0 / 3.0], [1e-300, 12345.678]]).unwrap();
        let text = write_word_vectors(&["x", "y"], &m).unwrap();
        let (vocab, back) = parse_word_vectors(&text, "t").unwrap();
        assert_eq!(vocab.words(), ["x", "y"]);
        assert_eq!(back, m);
        assert!(write_word_vectors(&["a b", "c"], &m).is_err());
    }
}
