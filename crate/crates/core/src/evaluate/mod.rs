//! Classification metrics, k-fold cross-validation and report rendering.

mod cv;
mod metrics;
mod report;

pub use cv::{cross_validate, fit_embedding, CvConfig, CvResult, Fingerprint, FoldOutcome, MethodConfig, TrainedPipeline};
pub use metrics::{
    classification_report, classification_report_indices, f1_score, macro_average, weighted_average, ClassMetrics,
    EvalReport,
};
pub use report::{render_detail, render_f1_table, render_tsv};
