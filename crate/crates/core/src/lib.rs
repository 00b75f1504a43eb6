//! Question classification with entropy-based embeddings.
//!
//! The pipeline is: preprocess question text into tokens, fit a vectorizer
//! on training questions, embed each question as a fixed-length vector,
//! and classify with one-vs-rest logistic regression. [`evaluate`] runs
//! the whole pipeline under k-fold cross-validation.
//!
//! Work that splits into independent pieces (folds, classes, questions,
//! matrix rows) runs on rayon when the `parallel` feature is enabled and
//! [`Exec::Parallel`] is selected. Both modes produce identical results.

pub mod classify;
pub mod corpus;
pub mod embed;
mod error;
pub mod evaluate;
mod exec;
pub mod numerics;
pub mod preprocess;
pub mod synth;
pub mod vocab;

pub use error::{Error, Result};
pub use exec::Exec;
