//! Evaluation toolkit for page-level chemical information extraction.
//!
//! * [`chem`]: molecular graphs, normalization, canonical keys, fingerprints
//! * [`io`]: MOLfile V2000 and SMILES
//! * [`detection`]: box geometry, COCO AP/AR, overlap suppression
//! * [`combined`]: detection plus structure-conversion scoring
//! * [`reaction`]: soft and hard reaction matching
//! * [`corpus`]: annotation files, statistics and synthetic fixtures

pub mod chem;
pub mod combined;
pub mod corpus;
pub mod detection;
pub mod evaluate;
pub mod io;
pub mod matching;
pub mod reaction;

pub use detection::MetricError;
