//! Annotation and prediction corpora, statistics and synthetic fixtures.

pub mod fixture;
mod load;
pub mod random;
pub mod schema;
mod stats;

use thiserror::Error;

pub use fixture::{generate_fixture, Expected, Fixture, FixtureError, FixtureParams, Perturbation};
pub use load::{
    align, file_json, load_ground_truth, load_predictions, parse_ground_truth, parse_predictions,
    read_structure, Corpus, GroundTruth, GtEntry, PageAnnotation, PagePrediction, PredEntry,
    Predictions, ScoredReaction,
};
pub use stats::{corpus_stats, stats_table, thousands, CorpusStats};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {source}")]
    InFile {
        path: String,
        source: Box<CorpusError>,
    },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("duplicate page_id '{0}'")]
    DuplicatePage(String),
    #[error("page {page}: {reason}")]
    InvalidPage { page: String, reason: String },
    #[error("page {page}: duplicate molecule id '{id}'")]
    DuplicateMolecule { page: String, id: String },
    #[error("page {page}, {item}: {reason}")]
    InvalidBox {
        page: String,
        item: String,
        reason: String,
    },
    #[error("page {page}, {item}: box {bbox:?} exceeds the {width} x {height} page")]
    OutOfBounds {
        page: String,
        item: String,
        bbox: [f64; 4],
        width: f64,
        height: f64,
    },
    #[error("page {page}, molecule {molecule}: {reason}")]
    InvalidStructure {
        page: String,
        molecule: String,
        reason: String,
    },
    #[error("page {page}, reaction {reaction}: unknown molecule reference '{reference}'")]
    UnknownReference {
        page: String,
        reaction: usize,
        reference: String,
    },
    #[error("page {page}, reaction {reaction}: {reason}")]
    InvalidReaction {
        page: String,
        reaction: usize,
        reason: String,
    },
    #[error("page {page}, {item}: score {score} outside [0, 1]")]
    ScoreOutOfRange {
        page: String,
        item: String,
        score: f64,
    },
    #[error("pages differ between files; without predictions: {missing:?}; without ground truth: {unexpected:?}")]
    PageMismatch {
        missing: Vec<String>,
        unexpected: Vec<String>,
    },
    #[error("page {page}: prediction for unknown molecule id '{id}'")]
    UnknownMolecule { page: String, id: String },
}
