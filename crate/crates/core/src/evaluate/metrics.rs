use crate::error::{Error, Result};

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&precision) || !(0.0..=1.0).contains(&recall) {
        return Err(Error::invalid(format!(
            "precision {precision} and recall {recall} must lie in [0, 1]"
        )));
    }
    let sum = precision + recall;
    Ok(if sum == 0.0 { 0.0 } else { 2.0 * precision * recall / sum })
}

pub fn macro_average(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Support-weighted mean; 0 when the supports sum to 0.
pub fn weighted_average(values: &[f64], supports: &[usize]) -> f64 {
    let total: usize = supports.iter().sum();
    if total == 0 {
        return 0.0;
    }
    values
        .iter()
        .zip(supports)
        .map(|(v, &s)| v * s as f64)
        .sum::<f64>()
        / total as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// Per-class precision, recall, F1 and support with macro and
/// support-weighted F1 averages.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub classes: Vec<ClassMetrics>,
    pub macro_f1: f64,
    pub weighted_f1: f64,
    pub accuracy: f64,
    pub total: usize,
}

impl EvalReport {
    pub fn class(&self, label: &str) -> Option<&ClassMetrics> {
        self.classes.iter().find(|c| c.label == label)
    }

    pub fn f1_scores(&self) -> Vec<f64> {
        self.classes.iter().map(|c| c.f1).collect()
    }
}

pub fn classification_report<S: AsRef<str>>(
    y_true: &[S],
    y_pred: &[S],
    classes: &[String],
) -> Result<EvalReport> {
    let index = |label: &S| -> Result<usize> {
        classes
            .iter()
            .position(|c| c == label.as_ref())
            .ok_or_else(|| Error::invalid(format!("unknown label `{}`", label.as_ref())))
    };
    if y_true.len() != y_pred.len() {
        return Err(Error::Shape(format!(
            "{} true labels vs {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    let t: Vec<usize> = y_true.iter().map(index).collect::<Result<_>>()?;
    let p: Vec<usize> = y_pred.iter().map(index).collect::<Result<_>>()?;
    classification_report_indices(&t, &p, classes)
}

/// Same as [`classification_report`] with labels given as class indices.
pub fn classification_report_indices(y_true: &[usize], y_pred: &[usize], classes: &[String]) -> Result<EvalReport> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Shape(format!(
            "{} true labels vs {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::invalid("no predictions to evaluate"));
    }
    let c = classes.len();
    if let Some(&bad) = y_true.iter().chain(y_pred).find(|&&i| i >= c) {
        return Err(Error::invalid(format!("class index {bad} out of range for {c} classes")));
    }
    let mut tp = vec![0usize; c];
    let mut predicted = vec![0usize; c];
    let mut support = vec![0usize; c];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        support[t] += 1;
        predicted[p] += 1;
        if t == p {
            tp[t] += 1;
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let metrics: Vec<ClassMetrics> = (0..c)
        .map(|k| {
            let precision = ratio(tp[k], predicted[k]);
            let recall = ratio(tp[k], support[k]);
            ClassMetrics {
                label: classes[k].clone(),
                precision,
                recall,
                f1: f1_score(precision, recall).expect("ratios lie in [0, 1]"),
                support: support[k],
            }
        })
        .collect();
    let f1s: Vec<f64> = metrics.iter().map(|m| m.f1).collect();
    Ok(EvalReport {
        macro_f1: macro_average(&f1s),
        weighted_f1: weighted_average(&f1s, &support),
        accuracy: ratio(tp.iter().sum(), y_true.len()),
        total: y_true.len(),
        classes: metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn f1_cases() {
        for p in [0.1, 0.5, 0.93, 1.0] {
            assert!((f1_score(p, p).unwrap() - p).abs() < 1e-15);
        }
        assert!((f1_score(0.5, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f1_score(0.0, 0.0).unwrap(), 0.0);
        assert!(f1_score(1.1, 0.5).is_err());
        assert!(f1_score(0.5, -0.1).is_err());
    }

    #[test]
    fn perfect_predictions() {
        let y = ["A", "B", "C", "A"];
        let r = classification_report(&y, &y, &names(&["A", "B", "C"])).unwrap();
        assert!(r.classes.iter().all(|c| c.f1 == 1.0));
        assert_eq!((r.macro_f1, r.weighted_f1, r.accuracy), (1.0, 1.0, 1.0));
    }

    #[test]
    fn two_class_hand_arithmetic() {
        let r = classification_report(&["A", "A", "B", "B"], &["A", "B", "B", "B"], &names(&["A", "B"])).unwrap();
        let a = r.class("A").unwrap();
        let b = r.class("B").unwrap();
        assert_eq!((a.precision, a.recall), (1.0, 0.5));
        assert!((a.f1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((b.precision - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(b.recall, 1.0);
        assert!((b.f1 - 0.8).abs() < 1e-12);
        assert!((r.macro_f1 - 0.7333333333333334).abs() < 1e-12);
        assert!((r.weighted_f1 - 0.7333333333333334).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let classes = names(&["A", "B"]);
        assert!(classification_report(&["A"], &["A", "B"], &classes).is_err());
        assert!(classification_report(&["A", "Z"], &["A", "B"], &classes).is_err());
        let empty: [&str; 0] = [];
        assert!(classification_report(&empty, &empty, &classes).is_err());
    }

    #[test]
    fn absent_class_scores_zero() {
        let r = classification_report(&["A", "A"], &["A", "A"], &names(&["A", "B"])).unwrap();
        let b = r.class("B").unwrap();
        assert_eq!((b.precision, b.recall, b.f1, b.support), (0.0, 0.0, 0.0, 0));
        assert_eq!(r.weighted_f1, 1.0);
        assert_eq!(r.macro_f1, 0.5);
    }
}
