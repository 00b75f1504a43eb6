//! Slow, direct reference implementations for checking qembed.
//!
//! Nothing here depends on qembed; matrices are plain nested vectors.

/// Entropy matrix by a double loop over questions and vocabulary words.
pub fn naive_entropy_matrix(questions: &[Vec<String>], vocab: &[String], fill: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(questions.len());
    for q in questions {
        let mut row = Vec::with_capacity(vocab.len());
        for w in vocab {
            let mut count = 0usize;
            for t in q {
                if t == w {
                    count += 1;
                }
            }
            if count == 0 {
                row.push(fill);
            } else {
                let p = count as f64 / q.len() as f64;
                row.push(-p * p.log2() + 0.0);
            }
        }
        out.push(row);
    }
    out
}

pub fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|t| row[t] * b[t][j]).sum())
                .collect()
        })
        .collect()
}

/// Eigen-decomposition of a symmetric matrix by cyclic two-sided Jacobi
/// rotations. Eigenvalues are returned in descending order; column `i` of
/// the second value is the eigenvector of eigenvalue `i`.
#[allow(clippy::needless_range_loop)] // index form mirrors the textbook rotation
pub fn symmetric_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let total: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[y][y].total_cmp(&a[x][x]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = (0..n).map(|r| order.iter().map(|&i| v[r][i]).collect()).collect();
    (values, vectors)
}

/// All `min(m, n)` singular values, descending, from the eigenvalues of
/// the smaller Gram matrix.
pub fn singular_values(m: &[Vec<f64>]) -> Vec<f64> {
    let t = transpose(m);
    let gram = if m.len() >= t.len() { matmul(&t, m) } else { matmul(m, &t) };
    symmetric_eigen(&gram).0.into_iter().map(|l| l.max(0.0).sqrt()).collect()
}

/// `sqrt(Σ_{i>k} σ_i²)`: the best possible rank-`k` Frobenius error.
pub fn discarded_norm(m: &[Vec<f64>], k: usize) -> f64 {
    let t = transpose(m);
    let gram = if m.len() >= t.len() { matmul(&t, m) } else { matmul(m, &t) };
    let values = symmetric_eigen(&gram).0;
    values[k..].iter().map(|l| l.max(0.0)).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    /// `(precision, recall, f1, support)` per class.
    pub classes: Vec<(f64, f64, f64, usize)>,
    pub macro_f1: f64,
    pub weighted_f1: f64,
}

pub fn confusion_matrix(y_true: &[usize], y_pred: &[usize], classes: usize) -> Vec<Vec<usize>> {
    let mut cm = vec![vec![0usize; classes]; classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        cm[t][p] += 1;
    }
    cm
}

/// Per-class metrics read off a confusion matrix (rows true, columns predicted).
pub fn confusion_report(y_true: &[usize], y_pred: &[usize], classes: usize) -> OracleReport {
    let cm = confusion_matrix(y_true, y_pred, classes);
    let mut rows = Vec::new();
    for k in 0..classes {
        let tp = cm[k][k];
        let row_sum: usize = cm[k].iter().sum();
        let col_sum: usize = cm.iter().map(|r| r[k]).sum();
        let precision = if col_sum == 0 { 0.0 } else { tp as f64 / col_sum as f64 };
        let recall = if row_sum == 0 { 0.0 } else { tp as f64 / row_sum as f64 };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        rows.push((precision, recall, f1, row_sum));
    }
    let macro_f1 = rows.iter().map(|r| r.2).sum::<f64>() / classes as f64;
    let total: usize = rows.iter().map(|r| r.3).sum();
    let weighted_f1 = rows.iter().map(|r| r.2 * r.3 as f64).sum::<f64>() / total as f64;
    OracleReport {
        classes: rows,
        macro_f1,
        weighted_f1,
    }
}

/// Central-difference gradient of `f` at `x`.
pub fn numeric_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn lower(c: char) -> char {
    let mut l = c.to_lowercase();
    match (l.next(), l.next()) {
        (Some(x), None) => x,
        _ => c,
    }
}

/// End of a match of `pattern` at `start`, where `pattern` is a literal
/// optionally followed by one trailing `*`.
fn match_end(pattern: &str, text: &[char], start: usize) -> Option<usize> {
    let (literal, wild) = match pattern.strip_suffix('*') {
        Some(l) => (l, true),
        None => (pattern, false),
    };
    let lit: Vec<char> = literal.chars().collect();
    if start + lit.len() > text.len() {
        return None;
    }
    if !text[start..start + lit.len()]
        .iter()
        .zip(&lit)
        .all(|(a, b)| lower(*a) == lower(*b))
    {
        return None;
    }
    let mut end = start + lit.len();
    if wild {
        while end < text.len() && text[end].is_alphanumeric() {
            end += 1;
        }
    }
    let starts_wordlike = lit.first().map_or(wild, |c| c.is_alphanumeric());
    let ends_wordlike = wild || lit.last().is_some_and(|c| c.is_alphanumeric());
    if starts_wordlike && start > 0 && text[start - 1].is_alphanumeric() {
        return None;
    }
    if ends_wordlike && end < text.len() && text[end].is_alphanumeric() {
        return None;
    }
    (end > start).then_some(end)
}

/// Applies substitution rules by first listing every `(rule, start, end)`
/// match in the original text, then walking left to right and taking, at
/// each position, the match whose pattern is longest (earliest rule on ties).
pub fn apply_rules_oracle(text: &str, rules: &[(String, String)]) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut matches: Vec<(usize, usize, usize)> = Vec::new();
    for (r, (pattern, _)) in rules.iter().enumerate() {
        for start in 0..chars.len() {
            if let Some(end) = match_end(pattern, &chars, start) {
                matches.push((start, r, end));
            }
        }
    }
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        let best = matches
            .iter()
            .filter(|m| m.0 == i)
            .max_by(|a, b| {
                let la = rules[a.1].0.chars().count();
                let lb = rules[b.1].0.chars().count();
                la.cmp(&lb).then(b.1.cmp(&a.1))
            });
        match best {
            Some(&(_, r, end)) => {
                out.push_str(&rules[r].1);
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
