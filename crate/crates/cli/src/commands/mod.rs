use std::path::PathBuf;

use chemeval_core::corpus::PagePrediction;
use clap::Args;

use crate::report::Format;

pub mod combined;
pub mod convert;
pub mod detect;
pub mod fixture;
pub mod reactions;
pub mod stats;

/// Inputs shared by the evaluation commands.
#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Ground-truth file; repeat for several datasets.
    #[arg(long, required = true)]
    pub gt: Vec<PathBuf>,
    /// Prediction file, paired with the --gt in the same position.
    #[arg(long, required = true)]
    pub pred: Vec<PathBuf>,
    /// Report path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

/// Prediction id, or `#index` for predictions without one.
pub fn pred_label(page: &PagePrediction, index: usize) -> String {
    match &page.molecules[index].id {
        Some(id) => id.clone(),
        None => format!("#{index}"),
    }
}
