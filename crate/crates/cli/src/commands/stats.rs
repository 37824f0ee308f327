use std::path::PathBuf;

use chemeval_core::corpus::{corpus_stats, stats_table, CorpusStats};
use clap::Args;
use serde::Serialize;

use crate::error::CliError;
use crate::inputs::ground_truth;
use crate::report::{emit, to_csv, to_json, Format, Meta};

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Ground-truth file; repeat for several datasets.
    #[arg(long, required = true)]
    pub gt: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Serialize)]
struct Report {
    meta: Meta<()>,
    datasets: Vec<CorpusStats>,
}

pub fn run(args: &StatsArgs) -> Result<(), CliError> {
    let mut rows = Vec::with_capacity(args.gt.len());
    let mut inputs = Vec::with_capacity(args.gt.len());
    for path in &args.gt {
        let (corpus, digest) = ground_truth(path)?;
        rows.push(corpus_stats(&corpus));
        inputs.push(digest);
    }
    let text = match args.format {
        Format::Json => to_json(&Report {
            meta: Meta::new("stats", (), inputs),
            datasets: rows,
        })?,
        Format::Csv => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.dataset.clone(),
                        r.n_pages.to_string(),
                        r.n_molecules.to_string(),
                        r.n_reactions.to_string(),
                    ]
                })
                .collect();
            to_csv(&["dataset", "pages", "molecules", "reactions"], &cells)?
        }
        Format::Table => stats_table(&rows),
    };
    emit(args.out.as_deref(), &text)
}
