//! Box geometry, detection matching, COCO-style AP/AR and overlap suppression.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("undefined metric: {0}")]
    Undefined(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid box [{x1}, {y1}, {x2}, {y2}]: {reason}")]
pub struct BoxError {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    pub reason: &'static str,
}

/// Axis-aligned rectangle in page pixels, origin at the top left.
/// Serialized as `[x1, y1, x2, y2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
}

impl BBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<BBox, BoxError> {
        let reason = if ![x1, y1, x2, y2].iter().all(|v| v.is_finite()) {
            Some("coordinates must be finite")
        } else if x1 < 0.0 || y1 < 0.0 {
            Some("coordinates must be non-negative")
        } else if x2 <= x1 || y2 <= y1 {
            Some("x2 > x1 and y2 > y1 required")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(BoxError {
                x1,
                y1,
                x2,
                y2,
                reason,
            }),
            None => Ok(BBox { x1, y1, x2, y2 }),
        }
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn y1(&self) -> f64 {
        self.y1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn y2(&self) -> f64 {
        self.y2
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn fits_within(&self, width: f64, height: f64) -> bool {
        self.x2 <= width && self.y2 <= height
    }
}

impl TryFrom<[f64; 4]> for BBox {
    type Error = BoxError;

    fn try_from(v: [f64; 4]) -> Result<BBox, BoxError> {
        BBox::new(v[0], v[1], v[2], v[3])
    }
}

impl From<BBox> for [f64; 4] {
    fn from(b: BBox) -> [f64; 4] {
        [b.x1, b.y1, b.x2, b.y2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredBox {
    pub bbox: BBox,
    pub score: f64,
}

impl ScoredBox {
    pub fn new(bbox: BBox, score: f64) -> Option<ScoredBox> {
        (0.0..=1.0).contains(&score).then_some(ScoredBox { bbox, score })
    }
}

pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let w = (a.x2.min(b.x2) - a.x1.max(b.x1)).max(0.0);
    let h = (a.y2.min(b.y2) - a.y1.max(b.y1)).max(0.0);
    let inter = w * h;
    if inter <= 0.0 {
        return 0.0;
    }
    inter / (a.area() + b.area() - inter)
}

/// The ten COCO thresholds 0.50, 0.55, ..., 0.95.
pub fn iou_thresholds() -> [f64; 10] {
    std::array::from_fn(|i| (50 + 5 * i) as f64 / 100.0)
}

/// Prediction indices by descending score; equal scores keep input order.
fn score_order(preds: &[ScoredBox]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| preds[b].score.total_cmp(&preds[a].score));
    order
}

/// Greedy COCO matching: predictions in descending score order each take the
/// unmatched ground-truth box of highest IoU (lowest index on ties) provided
/// that IoU reaches `threshold`. Returns `(pred, gt)` pairs in visiting order.
pub fn match_detections(preds: &[ScoredBox], gts: &[BBox], threshold: f64) -> Vec<(usize, usize)> {
    let mut taken = vec![false; gts.len()];
    let mut pairs = Vec::new();
    for p in score_order(preds) {
        let mut best: Option<(usize, f64)> = None;
        for (g, gt) in gts.iter().enumerate() {
            if taken[g] {
                continue;
            }
            let v = iou(&preds[p].bbox, gt);
            if v >= threshold && best.is_none_or(|(_, b)| v > b) {
                best = Some((g, v));
            }
        }
        if let Some((g, _)) = best {
            taken[g] = true;
            pairs.push((p, g));
        }
    }
    pairs
}

/// Predictions and ground truth of one page.
#[derive(Debug, Clone, Default)]
pub struct PageDetections {
    pub preds: Vec<ScoredBox>,
    pub gts: Vec<BBox>,
}

/// Per-threshold outcome of every prediction, in corpus order (page order,
/// then input order within the page).
struct ThresholdTally {
    scored: Vec<(f64, bool)>,
    n_gt: usize,
    matched: usize,
}

fn tally(pages: &[PageDetections], threshold: f64) -> ThresholdTally {
    let per_page: Vec<Vec<(f64, bool)>> = pages
        .par_iter()
        .map(|page| {
            let mut hit = vec![false; page.preds.len()];
            for (p, _) in match_detections(&page.preds, &page.gts, threshold) {
                hit[p] = true;
            }
            page.preds.iter().zip(hit).map(|(b, h)| (b.score, h)).collect()
        })
        .collect();
    let scored: Vec<(f64, bool)> = per_page.into_iter().flatten().collect();
    ThresholdTally {
        matched: scored.iter().filter(|(_, h)| *h).count(),
        n_gt: pages.iter().map(|p| p.gts.len()).sum(),
        scored,
    }
}

fn ground_truth_total(pages: &[PageDetections]) -> Result<usize, MetricError> {
    match pages.iter().map(|p| p.gts.len()).sum() {
        0 => Err(MetricError::Undefined("corpus has no ground-truth boxes".into())),
        n => Ok(n),
    }
}

/// 101-point interpolated average precision at one threshold.
fn interpolated_ap(mut t: ThresholdTally) -> f64 {
    t.scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut precision = Vec::with_capacity(t.scored.len());
    let mut recall = Vec::with_capacity(t.scored.len());
    let (mut tp, mut fp) = (0usize, 0usize);
    for (_, hit) in &t.scored {
        if *hit {
            tp += 1;
        } else {
            fp += 1;
        }
        precision.push(tp as f64 / (tp + fp) as f64);
        recall.push(tp as f64 / t.n_gt as f64);
    }
    for i in (1..precision.len()).rev() {
        if precision[i] > precision[i - 1] {
            precision[i - 1] = precision[i];
        }
    }
    let mut sum = 0.0;
    for k in 0..=100 {
        let r = k as f64 / 100.0;
        let idx = recall.partition_point(|&x| x < r);
        if idx < precision.len() {
            sum += precision[idx];
        }
    }
    sum / 101.0
}

/// COCO average precision, averaged over the ten IoU thresholds.
pub fn coco_ap(pages: &[PageDetections]) -> Result<f64, MetricError> {
    ground_truth_total(pages)?;
    let total: f64 = iou_thresholds()
        .iter()
        .map(|&t| interpolated_ap(tally(pages, t)))
        .sum();
    Ok(total / 10.0)
}

/// COCO average recall without a detection cap, averaged over the ten IoU
/// thresholds.
pub fn coco_ar(pages: &[PageDetections]) -> Result<f64, MetricError> {
    let n_gt = ground_truth_total(pages)?;
    let total: f64 = iou_thresholds()
        .iter()
        .map(|&t| tally(pages, t).matched as f64 / n_gt as f64)
        .sum();
    Ok(total / 10.0)
}

/// Harmonic mean, 0 when both inputs are 0.
pub fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Precision, recall and F1 from match counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    /// Ratios with a zero denominator are 0.
    pub fn from_counts(tp: usize, n_pred: usize, n_gt: usize) -> Prf {
        let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
        let precision = ratio(tp, n_pred);
        let recall = ratio(tp, n_gt);
        Prf {
            precision,
            recall,
            f1: f1(precision, recall),
        }
    }
}

/// Drops boxes smaller than `min_area`, then keeps boxes in descending score
/// order whenever their IoU with every box kept so far is below
/// `iou_threshold`. The result is in descending score order.
pub fn suppress_overlaps(boxes: &[ScoredBox], iou_threshold: f64, min_area: f64) -> Vec<ScoredBox> {
    let mut kept: Vec<ScoredBox> = Vec::new();
    for i in score_order(boxes) {
        let b = boxes[i];
        if b.bbox.area() < min_area {
            continue;
        }
        if kept.iter().all(|k| iou(&k.bbox, &b.bbox) < iou_threshold) {
            kept.push(b);
        }
    }
    kept
}
