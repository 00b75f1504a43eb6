use std::fmt::Write as _;

use super::cv::CvResult;
use super::metrics::EvalReport;

/// F1 per class (rows) and method (columns), followed by the
/// support-weighted average and the macro average.
pub fn render_f1_table(methods: &[(&str, &EvalReport)]) -> String {
    let mut out = String::new();
    let Some((_, first)) = methods.first() else {
        return out;
    };
    let label_width = first
        .classes
        .iter()
        .map(|c| c.label.len())
        .chain(["Macro avg".len()])
        .max()
        .unwrap_or(0);
    let col = |name: &str| name.len().max(8);

    let _ = write!(out, "{:<label_width$}", "F1-score");
    for (name, _) in methods {
        let _ = write!(out, "  {:>w$}", name, w = col(name));
    }
    out.push('\n');
    for (i, class) in first.classes.iter().enumerate() {
        let _ = write!(out, "{:<label_width$}", class.label);
        for (name, report) in methods {
            let f1 = report.classes.get(i).map_or(f64::NAN, |c| c.f1);
            let _ = write!(out, "  {:>w$.2}", f1, w = col(name));
        }
        out.push('\n');
    }
    let _ = write!(out, "{:<label_width$}", "Average");
    for (name, report) in methods {
        let _ = write!(out, "  {:>w$.2}", report.weighted_f1, w = col(name));
    }
    out.push('\n');
    let _ = write!(out, "{:<label_width$}", "Macro avg");
    for (name, report) in methods {
        let _ = write!(out, "  {:>w$.2}", report.macro_f1, w = col(name));
    }
    out.push('\n');
    let _ = writeln!(
        out,
        "\nAverage is weighted by class support (N = {}); Macro avg is the unweighted mean.",
        first.total
    );
    out
}

/// Precision, recall, F1 and support for one method.
pub fn render_detail(name: &str, report: &EvalReport) -> String {
    let mut out = String::new();
    let label_width = report
        .classes
        .iter()
        .map(|c| c.label.len())
        .chain(["weighted avg".len()])
        .max()
        .unwrap_or(0);
    let _ = writeln!(out, "{name}");
    let _ = writeln!(
        out,
        "{:<label_width$}  {:>9}  {:>9}  {:>9}  {:>7}",
        "class", "precision", "recall", "f1", "support"
    );
    for c in &report.classes {
        let _ = writeln!(
            out,
            "{:<label_width$}  {:>9.4}  {:>9.4}  {:>9.4}  {:>7}",
            c.label, c.precision, c.recall, c.f1, c.support
        );
    }
    let _ = writeln!(out, "{:<label_width$}  {:>9}  {:>9}  {:>9.4}  {:>7}", "macro avg", "", "", report.macro_f1, report.total);
    let _ = writeln!(
        out,
        "{:<label_width$}  {:>9}  {:>9}  {:>9.4}  {:>7}",
        "weighted avg", "", "", report.weighted_f1, report.total
    );
    let _ = writeln!(out, "{:<label_width$}  {:>9}  {:>9}  {:>9.4}  {:>7}", "accuracy", "", "", report.accuracy, report.total);
    out
}

fn push_report_rows(out: &mut String, method: &str, fold: &str, report: &EvalReport) {
    for c in &report.classes {
        for (metric, value) in [
            ("precision", c.precision),
            ("recall", c.recall),
            ("f1", c.f1),
            ("support", c.support as f64),
        ] {
            let _ = writeln!(out, "{method}\t{fold}\t{}\t{metric}\t{value:.6}", c.label);
        }
    }
    let _ = writeln!(out, "{method}\t{fold}\tmacro_avg\tf1\t{:.6}", report.macro_f1);
    let _ = writeln!(out, "{method}\t{fold}\tweighted_avg\tf1\t{:.6}", report.weighted_f1);
    let _ = writeln!(out, "{method}\t{fold}\tall\taccuracy\t{:.6}", report.accuracy);
}

/// Long-format TSV with one value per line: per-fold reports numbered from
/// 1, then the pooled out-of-fold report under fold `pooled`.
pub fn render_tsv(results: &[(&str, &CvResult)]) -> String {
    let mut out = String::from("method\tfold\tclass\tmetric\tvalue\n");
    for (method, result) in results {
        for fold in &result.folds {
            push_report_rows(&mut out, method, &(fold.fold + 1).to_string(), &fold.report);
        }
        push_report_rows(&mut out, method, "pooled", &result.pooled);
    }
    out
}
