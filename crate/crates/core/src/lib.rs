//! Readability assessment toolkit for Filipino texts.
//!
//! The crate covers the full modelling loop: ingesting leveled reading
//! materials, extracting surface, lexical, language-model, syllable-pattern
//! and morphological predictors, training logistic regression, linear SVM and
//! random forest classifiers, and interpreting them globally (Spearman
//! ranking, learned weights, impurity importance) and locally (perturbation
//! surrogates with discretized feature boundaries).
//!
//! Tokenization, syllabification and the morphological affix table are
//! rule-based approximations of Filipino orthography; see the module docs of
//! [`corpus`] and [`features::morph`] for the exact rules.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod explain;
pub mod features;
pub mod interpret;
pub mod lexicon;
pub mod lm;
pub mod models;
pub mod synth;

mod level;
mod matrix;

pub use error::{Error, Result};
pub use level::Level;
pub use matrix::FeatureMatrix;
