use chemeval_core::combined::{localization_matching, CombinedCounts};
use chemeval_core::detection::{coco_ap, coco_ar, f1, iou_thresholds, PageDetections};
use chemeval_core::evaluate::{detection_pages, AlignedPage};
use serde::Serialize;

use super::{pred_label, EvalArgs};
use crate::error::CliError;
use crate::inputs::datasets;
use crate::report::{emit, num, to_csv, to_json, unsupported, Format, Meta, Scored};

/// Fixed IoU for the thresholded precision/recall block.
const POINT_IOU: f64 = 0.5;

#[derive(Serialize)]
struct Parameters {
    iou_thresholds: Vec<f64>,
    point_iou: f64,
}

#[derive(Serialize)]
struct Scores {
    n_pages: usize,
    n_gt: usize,
    n_pred: usize,
    ap: f64,
    ar: f64,
    /// Harmonic mean of AP and AR.
    f1: f64,
    at_point_iou: Scored,
}

#[derive(Serialize)]
struct PageRow {
    page_id: String,
    n_gt: usize,
    n_pred: usize,
    tp: usize,
    unmatched_gt: Vec<String>,
    unmatched_pred: Vec<String>,
}

#[derive(Serialize)]
struct DatasetBlock {
    dataset: String,
    #[serde(flatten)]
    scores: Scores,
    pages: Vec<PageRow>,
}

#[derive(Serialize)]
struct Report {
    meta: Meta<Parameters>,
    datasets: Vec<DatasetBlock>,
    overall: Scores,
}

fn page_rows(aligned: &[AlignedPage<'_>], det: &[PageDetections]) -> Result<(Vec<PageRow>, CombinedCounts), CliError> {
    let mut rows = Vec::with_capacity(aligned.len());
    let mut total = CombinedCounts::default();
    for ((g, p), d) in aligned.iter().zip(det) {
        let gts = &d.gts;
        let preds: Vec<_> = d.preds.iter().map(|s| s.bbox).collect();
        let pairs = localization_matching(gts, &preds, POINT_IOU)?;
        let mut gt_hit = vec![false; gts.len()];
        let mut pred_hit = vec![false; preds.len()];
        for &(gi, pi) in &pairs {
            gt_hit[gi] = true;
            pred_hit[pi] = true;
        }
        total = total + CombinedCounts::from_tp(pairs.len(), preds.len(), gts.len());
        rows.push(PageRow {
            page_id: g.page_id.clone(),
            n_gt: gts.len(),
            n_pred: preds.len(),
            tp: pairs.len(),
            unmatched_gt: (0..gts.len()).filter(|&i| !gt_hit[i]).map(|i| g.molecules[i].id.clone()).collect(),
            unmatched_pred: (0..preds.len()).filter(|&i| !pred_hit[i]).map(|i| pred_label(p, i)).collect(),
        });
    }
    Ok((rows, total))
}

fn scores(det: &[PageDetections], point: CombinedCounts) -> Result<Scores, CliError> {
    let ap = coco_ap(det)?;
    let ar = coco_ar(det)?;
    Ok(Scores {
        n_pages: det.len(),
        n_gt: det.iter().map(|d| d.gts.len()).sum(),
        n_pred: det.iter().map(|d| d.preds.len()).sum(),
        ap,
        ar,
        f1: f1(ap, ar),
        at_point_iou: Scored::from_counts(point),
    })
}

pub fn run(args: &EvalArgs) -> Result<(), CliError> {
    if args.format == Format::Table {
        return Err(unsupported("detect", args.format));
    }
    let (sets, inputs) = datasets(&args.gt, &args.pred)?;
    let mut blocks = Vec::with_capacity(sets.len());
    let mut all_det = Vec::new();
    let mut all_point = CombinedCounts::default();
    for set in &sets {
        let aligned = set.pages()?;
        let det = detection_pages(&aligned);
        let (pages, point) = page_rows(&aligned, &det).map_err(|e| e.in_dataset(&set.label))?;
        let scores = scores(&det, point).map_err(|e| e.in_dataset(&set.label))?;
        all_point = all_point + point;
        all_det.extend(det);
        blocks.push(DatasetBlock {
            dataset: set.label.clone(),
            scores,
            pages,
        });
    }
    let overall = scores(&all_det, all_point)?;

    let text = match args.format {
        Format::Json => to_json(&Report {
            meta: Meta::new(
                "detect",
                Parameters {
                    iou_thresholds: iou_thresholds().to_vec(),
                    point_iou: POINT_IOU,
                },
                inputs,
            ),
            datasets: blocks,
            overall,
        })?,
        _ => {
            let row = |label: &str, s: &Scores| {
                let p = &s.at_point_iou;
                vec![
                    label.to_string(),
                    s.n_pages.to_string(),
                    s.n_gt.to_string(),
                    s.n_pred.to_string(),
                    num(s.ap),
                    num(s.ar),
                    num(s.f1),
                    num(p.precision),
                    num(p.recall),
                    num(p.f1),
                ]
            };
            let mut rows: Vec<Vec<String>> = blocks.iter().map(|b| row(&b.dataset, &b.scores)).collect();
            rows.push(row("overall", &overall));
            to_csv(
                &["dataset", "pages", "gt", "pred", "ap", "ar", "f1", "precision_iou50", "recall_iou50", "f1_iou50"],
                &rows,
            )?
        }
    };
    emit(args.out.as_deref(), &text)
}
