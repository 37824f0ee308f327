//! Brute-force reference evaluators.
//!
//! Everything here is written directly from the metric definitions and
//! favours obviousness over speed. Only domain types are borrowed from
//! `chemeval-core`; geometry, matching and curve construction are
//! reimplemented so that a bug in the production path cannot hide itself.

use chemeval_core::combined::{CombinedCounts, GtMolecule, PredMolecule};
use chemeval_core::detection::{BBox, PageDetections};
use chemeval_core::reaction::{EntityKind, MatchMode, Reaction, Role, RxnEntity};

pub mod cases;

pub const MAX_COMBINED_BOXES: usize = 8;
pub const MAX_REACTION_GROUP: usize = 6;
pub const MAX_AP_BOXES: usize = 200;
pub const MAX_PAIRING_REACTIONS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityExceeded {
    pub what: &'static str,
    pub size: usize,
    pub limit: usize,
}

impl std::fmt::Display for CapacityExceeded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} has {} items, oracle limit is {}", self.what, self.size, self.limit)
    }
}

impl std::error::Error for CapacityExceeded {}

fn cap(what: &'static str, size: usize, limit: usize) -> Result<(), CapacityExceeded> {
    if size > limit {
        Err(CapacityExceeded { what, size, limit })
    } else {
        Ok(())
    }
}

pub fn box_iou(a: &BBox, b: &BBox) -> f64 {
    let ix1 = a.x1().max(b.x1());
    let iy1 = a.y1().max(b.y1());
    let ix2 = a.x2().min(b.x2());
    let iy2 = a.y2().min(b.y2());
    if ix2 <= ix1 || iy2 <= iy1 {
        return 0.0;
    }
    let inter = (ix2 - ix1) * (iy2 - iy1);
    let area = |r: &BBox| (r.x2() - r.x1()) * (r.y2() - r.y1());
    inter / (area(a) + area(b) - inter)
}

/// Maximum true positives over every one-to-one assignment of ground truth to
/// predictions, where a pair scores when IoU ≥ tau and keys are equal.
pub fn oracle_combined(gt: &[GtMolecule], pred: &[PredMolecule], tau: f64) -> Result<CombinedCounts, CapacityExceeded> {
    cap("ground-truth page", gt.len(), MAX_COMBINED_BOXES)?;
    cap("prediction page", pred.len(), MAX_COMBINED_BOXES)?;
    fn best(g: usize, gt: &[GtMolecule], pred: &[PredMolecule], tau: f64, used: &mut Vec<bool>) -> usize {
        if g == gt.len() {
            return 0;
        }
        // leave gt[g] unassigned
        let mut top = best(g + 1, gt, pred, tau, used);
        for p in 0..pred.len() {
            if used[p] {
                continue;
            }
            let scores = box_iou(&gt[g].bbox, &pred[p].bbox.bbox) >= tau && pred[p].key.as_ref() == Some(&gt[g].key);
            used[p] = true;
            let total = usize::from(scores) + best(g + 1, gt, pred, tau, used);
            used[p] = false;
            top = top.max(total);
        }
        top
    }
    let tp = best(0, gt, pred, tau, &mut vec![false; pred.len()]);
    Ok(CombinedCounts {
        tp,
        fp: pred.len() - tp,
        fn_: gt.len() - tp,
    })
}

fn entities_correspond(a: &RxnEntity, b: &RxnEntity, with_role: bool) -> bool {
    a.kind == b.kind && (!with_role || a.role == b.role) && box_iou(&a.bbox, &b.bbox) > 0.5
}

/// Tries every bijection between the two lists.
fn permutation_match(a: &[RxnEntity], b: &[RxnEntity], with_role: bool) -> bool {
    if a.len() != b.len() {
        return false;
    }
    fn search(i: usize, a: &[RxnEntity], b: &[RxnEntity], with_role: bool, used: &mut Vec<bool>) -> bool {
        if i == a.len() {
            return true;
        }
        for j in 0..b.len() {
            if !used[j] && entities_correspond(&a[i], &b[j], with_role) {
                used[j] = true;
                if search(i + 1, a, b, with_role, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    search(0, a, b, with_role, &mut vec![false; b.len()])
}

fn soft_groups(r: &Reaction) -> [Vec<RxnEntity>; 2] {
    let molecules = r.entities().iter().filter(|e| e.kind == EntityKind::Molecule);
    [
        molecules.clone().filter(|e| e.role != Role::Product).copied().collect(),
        molecules.filter(|e| e.role == Role::Product).copied().collect(),
    ]
}

/// Reaction match by exhaustive search over entity pairings.
pub fn oracle_reaction_match(gt: &Reaction, pred: &Reaction, mode: MatchMode) -> Result<bool, CapacityExceeded> {
    match mode {
        MatchMode::Hard => {
            cap("reaction", gt.entities().len(), MAX_REACTION_GROUP)?;
            cap("reaction", pred.entities().len(), MAX_REACTION_GROUP)?;
            Ok(permutation_match(gt.entities(), pred.entities(), true))
        }
        MatchMode::Soft => {
            let (g, p) = (soft_groups(gt), soft_groups(pred));
            for group in g.iter().chain(&p) {
                cap("entity group", group.len(), MAX_REACTION_GROUP)?;
            }
            Ok(permutation_match(&g[0], &p[0], false) && permutation_match(&g[1], &p[1], false))
        }
    }
}

/// Largest number of one-to-one (gt, pred) reaction pairs that match, over
/// every possible pairing.
pub fn oracle_reaction_pairs(gt: &[Reaction], pred: &[Reaction], mode: MatchMode) -> Result<usize, CapacityExceeded> {
    cap("ground-truth reactions", gt.len(), MAX_PAIRING_REACTIONS)?;
    cap("predicted reactions", pred.len(), MAX_PAIRING_REACTIONS)?;
    let mut ok = vec![vec![false; pred.len()]; gt.len()];
    for (g, gr) in gt.iter().enumerate() {
        for (p, pr) in pred.iter().enumerate() {
            ok[g][p] = oracle_reaction_match(gr, pr, mode)?;
        }
    }
    fn best(g: usize, ok: &[Vec<bool>], used: &mut Vec<bool>) -> usize {
        if g == ok.len() {
            return 0;
        }
        let mut top = best(g + 1, ok, used);
        for p in 0..used.len() {
            if ok[g][p] && !used[p] {
                used[p] = true;
                top = top.max(1 + best(g + 1, ok, used));
                used[p] = false;
            }
        }
        top
    }
    Ok(best(0, &ok, &mut vec![false; pred.len()]))
}

fn thresholds() -> Vec<f64> {
    (0..10).map(|i| f64::from(50 + 5 * i) / 100.0).collect()
}

/// Per-prediction hit flags at one threshold, predictions listed as
/// (score, page, index) in the global order used for the curve.
fn evaluate(pages: &[PageDetections], t: f64) -> Vec<(f64, bool)> {
    let mut all: Vec<(f64, usize, usize)> = Vec::new();
    for (pi, page) in pages.iter().enumerate() {
        for (i, p) in page.preds.iter().enumerate() {
            all.push((p.score, pi, i));
        }
    }
    let mut hits = vec![Vec::new(); pages.len()];
    for (pi, page) in pages.iter().enumerate() {
        hits[pi] = vec![false; page.preds.len()];
        let mut order: Vec<usize> = (0..page.preds.len()).collect();
        // descending score, input order among equals
        for i in 1..order.len() {
            let mut j = i;
            while j > 0 && page.preds[order[j - 1]].score < page.preds[order[j]].score {
                order.swap(j - 1, j);
                j -= 1;
            }
        }
        let mut taken = vec![false; page.gts.len()];
        for p in order {
            let mut pick: Option<usize> = None;
            let mut pick_iou = -1.0;
            for (g, gt) in page.gts.iter().enumerate() {
                let v = box_iou(&page.preds[p].bbox, gt);
                if !taken[g] && v >= t && v > pick_iou {
                    pick = Some(g);
                    pick_iou = v;
                }
            }
            if let Some(g) = pick {
                taken[g] = true;
                hits[pi][p] = true;
            }
        }
    }
    // stable global ordering by descending score
    let mut ordered: Vec<(f64, bool)> = Vec::with_capacity(all.len());
    let mut remaining = all;
    while !remaining.is_empty() {
        let mut best = 0;
        for k in 1..remaining.len() {
            if remaining[k].0 > remaining[best].0 {
                best = k;
            }
        }
        let (s, pi, i) = remaining.remove(best);
        ordered.push((s, hits[pi][i]));
    }
    ordered
}

/// COCO AP: per threshold, the precision at each of the 101 recall levels is
/// the best precision reached at any recall at or above that level.
pub fn oracle_ap(pages: &[PageDetections]) -> Result<Option<f64>, CapacityExceeded> {
    let n_boxes: usize = pages.iter().map(|p| p.preds.len() + p.gts.len()).sum();
    cap("corpus", n_boxes, MAX_AP_BOXES)?;
    let n_gt: usize = pages.iter().map(|p| p.gts.len()).sum();
    if n_gt == 0 {
        return Ok(None);
    }
    let mut total = 0.0;
    for t in thresholds() {
        let ordered = evaluate(pages, t);
        let mut curve: Vec<(f64, f64)> = Vec::new();
        let mut tp = 0;
        for (k, (_, hit)) in ordered.iter().enumerate() {
            tp += usize::from(*hit);
            curve.push((tp as f64 / n_gt as f64, tp as f64 / (k + 1) as f64));
        }
        let mut sum = 0.0;
        for level in 0..=100 {
            let r = f64::from(level) / 100.0;
            let best = curve
                .iter()
                .filter(|(rec, _)| *rec >= r)
                .map(|(_, prec)| *prec)
                .fold(0.0, f64::max);
            sum += best;
        }
        total += sum / 101.0;
    }
    Ok(Some(total / 10.0))
}

/// COCO AR without a detection cap.
pub fn oracle_ar(pages: &[PageDetections]) -> Result<Option<f64>, CapacityExceeded> {
    let n_boxes: usize = pages.iter().map(|p| p.preds.len() + p.gts.len()).sum();
    cap("corpus", n_boxes, MAX_AP_BOXES)?;
    let n_gt: usize = pages.iter().map(|p| p.gts.len()).sum();
    if n_gt == 0 {
        return Ok(None);
    }
    let mut total = 0.0;
    for t in thresholds() {
        let hits = evaluate(pages, t).iter().filter(|(_, h)| *h).count();
        total += hits as f64 / n_gt as f64;
    }
    Ok(Some(total / 10.0))
}
