use chemeval_core::detection::Prf;
use chemeval_core::evaluate::reaction_pages;
use chemeval_core::reaction::{pair_reactions, reaction_prf, MatchMode, Reaction, ReactionCounts};
use clap::{Args, ValueEnum};
use serde::Serialize;

use super::EvalArgs;
use crate::error::CliError;
use crate::inputs::datasets;
use crate::report::{emit, num, to_csv, to_json, unsupported, Format, Meta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Soft,
    Hard,
    Both,
}

impl ModeArg {
    fn modes(self) -> Vec<MatchMode> {
        match self {
            ModeArg::Soft => vec![MatchMode::Soft],
            ModeArg::Hard => vec![MatchMode::Hard],
            ModeArg::Both => vec![MatchMode::Soft, MatchMode::Hard],
        }
    }
}

#[derive(Debug, Args)]
pub struct ReactionArgs {
    #[command(flatten)]
    pub eval: EvalArgs,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeArg,
}

#[derive(Serialize)]
struct Parameters {
    mode: ModeArg,
    entity_iou: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct ModeScores {
    matched: usize,
    n_pred: usize,
    n_gt: usize,
    precision: f64,
    recall: f64,
    f1: f64,
}

impl ModeScores {
    fn new(c: ReactionCounts) -> ModeScores {
        let prf = Prf::from_counts(c.matched, c.n_pred, c.n_gt);
        ModeScores {
            matched: c.matched,
            n_pred: c.n_pred,
            n_gt: c.n_gt,
            precision: prf.precision,
            recall: prf.recall,
            f1: prf.f1,
        }
    }
}

#[derive(Serialize)]
struct PageMode {
    matched: usize,
    /// Indices into the page's reaction lists.
    unmatched_gt: Vec<usize>,
    unmatched_pred: Vec<usize>,
}

#[derive(Serialize)]
struct PageRow {
    page_id: String,
    n_gt: usize,
    n_pred: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    soft: Option<PageMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hard: Option<PageMode>,
}

#[derive(Serialize)]
struct Blocks {
    #[serde(skip_serializing_if = "Option::is_none")]
    soft: Option<ModeScores>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hard: Option<ModeScores>,
}

#[derive(Serialize)]
struct DatasetBlock {
    dataset: String,
    #[serde(flatten)]
    scores: Blocks,
    pages: Vec<PageRow>,
}

#[derive(Serialize)]
struct Report {
    meta: Meta<Parameters>,
    datasets: Vec<DatasetBlock>,
    overall: Blocks,
}

fn page_mode(gt: &[Reaction], pred: &[Reaction], mode: MatchMode) -> PageMode {
    let pairs = pair_reactions(gt, pred, mode);
    PageMode {
        matched: pairs.len(),
        unmatched_gt: (0..gt.len()).filter(|g| pairs.iter().all(|p| p.0 != *g)).collect(),
        unmatched_pred: (0..pred.len()).filter(|q| pairs.iter().all(|p| p.1 != *q)).collect(),
    }
}

fn slot(blocks: &mut Blocks, mode: MatchMode) -> &mut Option<ModeScores> {
    match mode {
        MatchMode::Soft => &mut blocks.soft,
        MatchMode::Hard => &mut blocks.hard,
    }
}

pub fn run(args: &ReactionArgs) -> Result<(), CliError> {
    let eval = &args.eval;
    if eval.format == Format::Table {
        return Err(unsupported("reactions", eval.format));
    }
    let modes = args.mode.modes();
    let (sets, inputs) = datasets(&eval.gt, &eval.pred)?;
    let mut blocks = Vec::with_capacity(sets.len());
    let mut totals: Vec<ReactionCounts> = vec![ReactionCounts::default(); modes.len()];
    for set in &sets {
        let aligned = set.pages()?;
        let rxn = reaction_pages(&aligned);
        let refs: Vec<(&[Reaction], &[Reaction])> = rxn.iter().map(|(g, p)| (g.as_slice(), p.as_slice())).collect();
        let mut scores = Blocks { soft: None, hard: None };
        for (k, &mode) in modes.iter().enumerate() {
            let report = reaction_prf(&refs, mode).map_err(|e| CliError::from(e).in_dataset(&set.label))?;
            totals[k] = totals[k] + report.counts;
            *slot(&mut scores, mode) = Some(ModeScores::new(report.counts));
        }
        let pages = aligned
            .iter()
            .zip(&rxn)
            .map(|((g, _), (gr, pr))| {
                let per = |mode: MatchMode| modes.contains(&mode).then(|| page_mode(gr, pr, mode));
                PageRow {
                    page_id: g.page_id.clone(),
                    n_gt: gr.len(),
                    n_pred: pr.len(),
                    soft: per(MatchMode::Soft),
                    hard: per(MatchMode::Hard),
                }
            })
            .collect();
        blocks.push(DatasetBlock {
            dataset: set.label.clone(),
            scores,
            pages,
        });
    }
    let mut overall = Blocks { soft: None, hard: None };
    for (k, &mode) in modes.iter().enumerate() {
        *slot(&mut overall, mode) = Some(ModeScores::new(totals[k]));
    }

    let text = match eval.format {
        Format::Json => to_json(&Report {
            meta: Meta::new(
                "reactions",
                Parameters {
                    mode: args.mode,
                    entity_iou: chemeval_core::reaction::ENTITY_IOU,
                },
                inputs,
            ),
            datasets: blocks,
            overall,
        })?,
        _ => {
            let cells = |s: Option<ModeScores>| match s {
                Some(s) => vec![s.matched.to_string(), num(s.precision), num(s.recall), num(s.f1)],
                None => vec![String::new(); 4],
            };
            let row = |label: &str, b: &Blocks| {
                let first = b.soft.or(b.hard);
                let mut r = vec![
                    label.to_string(),
                    first.map(|s| s.n_gt.to_string()).unwrap_or_default(),
                    first.map(|s| s.n_pred.to_string()).unwrap_or_default(),
                ];
                r.extend(cells(b.soft));
                r.extend(cells(b.hard));
                r
            };
            let mut rows: Vec<Vec<String>> = blocks.iter().map(|b| row(&b.dataset, &b.scores)).collect();
            rows.push(row("overall", &overall));
            to_csv(
                &[
                    "dataset",
                    "gt",
                    "pred",
                    "soft_matched",
                    "soft_precision",
                    "soft_recall",
                    "soft_f1",
                    "hard_matched",
                    "hard_precision",
                    "hard_recall",
                    "hard_f1",
                ],
                &rows,
            )?
        }
    };
    emit(eval.out.as_deref(), &text)
}
