//! Acquisition of verb subcategorization lexicons from corpora.
//!
//! The pipeline runs in stages: [`ingest`] tags and lemmatizes, [`parser`]
//! returns ranked shallow analyses, [`patterns`] extracts and classifies
//! subcategorization patterns, [`statfilter`] builds binomially filtered
//! lexicon entries, [`eval`] scores lexicons and parses, and [`rerank`]
//! lexicalizes parse ranking with the acquired frequencies.

pub mod error;
pub mod eval;
pub mod ingest;
pub mod parser;
pub mod patterns;
pub mod rerank;
pub mod statfilter;
pub mod sexpr;

pub use error::{Error, Result};
