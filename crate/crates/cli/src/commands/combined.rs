use chemeval_core::combined::{combined_prf, CombinedCounts};
use chemeval_core::detection::iou;
use chemeval_core::evaluate::combined_pages;
use clap::Args;
use serde::Serialize;

use super::{pred_label, EvalArgs};
use crate::error::CliError;
use crate::inputs::datasets;
use crate::report::{emit, num, to_csv, to_json, unsupported, Format, Meta, Scored};

#[derive(Debug, Args)]
pub struct CombinedArgs {
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Minimum IoU for a prediction to count as locating a molecule.
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
}

#[derive(Serialize)]
struct Parameters {
    tau: f64,
}

#[derive(Serialize)]
struct PageRow {
    page_id: String,
    tp: usize,
    fp: usize,
    #[serde(rename = "fn")]
    fn_: usize,
}

/// A box that counted as an error. `kind` is "mismatch" when it overlapped a
/// box of the other side whose structure differed, otherwise "spurious" or
/// "missed".
#[derive(Serialize)]
struct ErrorItem {
    page_id: String,
    id: String,
    kind: &'static str,
    counterpart: Option<String>,
    iou: Option<f64>,
    gt_key: Option<String>,
    pred_key: Option<String>,
}

#[derive(Serialize)]
struct DatasetBlock {
    dataset: String,
    #[serde(flatten)]
    scores: Scored,
    pages: Vec<PageRow>,
    false_positives: Vec<ErrorItem>,
    false_negatives: Vec<ErrorItem>,
}

#[derive(Serialize)]
struct Report {
    meta: Meta<Parameters>,
    datasets: Vec<DatasetBlock>,
    overall: Scored,
}

pub fn run(args: &CombinedArgs) -> Result<(), CliError> {
    let eval = &args.eval;
    if eval.format == Format::Table {
        return Err(unsupported("combined", eval.format));
    }
    let (sets, inputs) = datasets(&eval.gt, &eval.pred)?;
    let mut blocks = Vec::with_capacity(sets.len());
    let mut total = CombinedCounts::default();
    for set in &sets {
        let aligned = set.pages()?;
        let pages = combined_pages(&aligned);
        let report = combined_prf(&pages, args.tau).map_err(|e| CliError::from(e).in_dataset(&set.label))?;
        total = total + report.counts;

        let mut rows = Vec::with_capacity(aligned.len());
        let mut fps = Vec::new();
        let mut fns = Vec::new();
        for (((g, p), page), (m, c)) in aligned.iter().zip(&pages).zip(report.pages.iter().zip(&report.page_counts)) {
            rows.push(PageRow {
                page_id: g.page_id.clone(),
                tp: c.tp,
                fp: c.fp,
                fn_: c.fn_,
            });
            let gt_key = |i: usize| Some(page.gt[i].key.as_str().to_string());
            let pred_key = |i: usize| page.pred[i].key.as_ref().map(|k| k.as_str().to_string());
            for &(gi, pi) in &m.mismatched {
                let overlap = Some(iou(&page.gt[gi].bbox, &page.pred[pi].bbox.bbox));
                fps.push(ErrorItem {
                    page_id: g.page_id.clone(),
                    id: pred_label(p, pi),
                    kind: "mismatch",
                    counterpart: Some(g.molecules[gi].id.clone()),
                    iou: overlap,
                    gt_key: gt_key(gi),
                    pred_key: pred_key(pi),
                });
                fns.push(ErrorItem {
                    page_id: g.page_id.clone(),
                    id: g.molecules[gi].id.clone(),
                    kind: "mismatch",
                    counterpart: Some(pred_label(p, pi)),
                    iou: overlap,
                    gt_key: gt_key(gi),
                    pred_key: pred_key(pi),
                });
            }
            for &pi in &m.spurious {
                fps.push(ErrorItem {
                    page_id: g.page_id.clone(),
                    id: pred_label(p, pi),
                    kind: "spurious",
                    counterpart: None,
                    iou: None,
                    gt_key: None,
                    pred_key: pred_key(pi),
                });
            }
            for &gi in &m.missed {
                fns.push(ErrorItem {
                    page_id: g.page_id.clone(),
                    id: g.molecules[gi].id.clone(),
                    kind: "missed",
                    counterpart: None,
                    iou: None,
                    gt_key: gt_key(gi),
                    pred_key: None,
                });
            }
        }
        blocks.push(DatasetBlock {
            dataset: set.label.clone(),
            scores: Scored::new(report.counts, report.prf),
            pages: rows,
            false_positives: fps,
            false_negatives: fns,
        });
    }
    let overall = Scored::from_counts(total);

    let text = match eval.format {
        Format::Json => to_json(&Report {
            meta: Meta::new("combined", Parameters { tau: args.tau }, inputs),
            datasets: blocks,
            overall,
        })?,
        _ => {
            let row = |label: &str, s: &Scored| {
                vec![
                    label.to_string(),
                    s.tp.to_string(),
                    s.fp.to_string(),
                    s.fn_.to_string(),
                    num(s.precision),
                    num(s.recall),
                    num(s.f1),
                ]
            };
            let mut rows: Vec<Vec<String>> = blocks.iter().map(|b| row(&b.dataset, &b.scores)).collect();
            rows.push(row("overall", &overall));
            to_csv(&["dataset", "tp", "fp", "fn", "precision", "recall", "f1"], &rows)?
        }
    };
    emit(eval.out.as_deref(), &text)
}
