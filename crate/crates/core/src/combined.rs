//! Detection plus structure conversion: a prediction is a true positive only
//! when its box overlaps a ground-truth box at IoU ≥ tau and its structure has
//! the same canonical key.
//!
//! Matching is one-to-one and maximizes the number of true positives over
//! all admissible assignments (augmenting paths over the pairs that pass both
//! tests), so no prediction is credited twice. FP = |pred| − TP and
//! FN = |gt| − TP.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chem::{fingerprint, tanimoto, CanonicalKey, NormalizedMolecule, DEFAULT_NBITS, DEFAULT_RADIUS};
use crate::detection::{iou, BBox, MetricError, Prf, ScoredBox};
use crate::matching::max_matching_adj;

#[derive(Debug, Clone, PartialEq)]
pub struct GtMolecule {
    pub bbox: BBox,
    pub key: CanonicalKey,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredMolecule {
    pub bbox: ScoredBox,
    /// `None` when the predicted structure could not be parsed; matches nothing.
    pub key: Option<CanonicalKey>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinedCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl CombinedCounts {
    pub fn from_tp(tp: usize, n_pred: usize, n_gt: usize) -> CombinedCounts {
        CombinedCounts {
            tp,
            fp: n_pred - tp,
            fn_: n_gt - tp,
        }
    }

    pub fn prf(&self) -> Prf {
        Prf::from_counts(self.tp, self.tp + self.fp, self.tp + self.fn_)
    }
}

impl std::ops::Add for CombinedCounts {
    type Output = CombinedCounts;

    fn add(self, o: CombinedCounts) -> CombinedCounts {
        CombinedCounts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }
}

impl std::iter::Sum for CombinedCounts {
    fn sum<I: Iterator<Item = CombinedCounts>>(iter: I) -> CombinedCounts {
        iter.fold(CombinedCounts::default(), |a, b| a + b)
    }
}

fn check_tau(tau: f64) -> Result<(), MetricError> {
    if tau > 0.0 && tau <= 1.0 {
        Ok(())
    } else {
        Err(MetricError::InvalidParameter(format!("tau must be in (0, 1], got {tau}")))
    }
}

/// How each box of a page ended up.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PageMatching {
    /// `(gt, pred)` pairs with overlapping boxes and equal keys.
    pub matched: Vec<(usize, usize)>,
    /// `(gt, pred)` pairs with overlapping boxes but different (or invalid)
    /// structures; both sides count as errors.
    pub mismatched: Vec<(usize, usize)>,
    /// Ground-truth boxes with no overlapping prediction left.
    pub missed: Vec<usize>,
    /// Predictions with no overlapping ground truth left.
    pub spurious: Vec<usize>,
}

impl PageMatching {
    pub fn counts(&self, n_gt: usize, n_pred: usize) -> CombinedCounts {
        CombinedCounts::from_tp(self.matched.len(), n_pred, n_gt)
    }
}

/// Candidate predictions of each ground-truth box: IoU ≥ tau, by descending
/// IoU then prediction index.
fn candidates(gt: &[BBox], pred: &[BBox], tau: f64, admit: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    gt.iter()
        .enumerate()
        .map(|(g, gb)| {
            let mut c: Vec<(f64, usize)> = pred
                .iter()
                .enumerate()
                .filter(|(p, _)| admit(g, *p))
                .map(|(p, pb)| (iou(gb, pb), p))
                .filter(|(v, _)| *v >= tau)
                .collect();
            c.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            c.into_iter().map(|(_, p)| p).collect()
        })
        .collect()
}

/// Full one-to-one assignment of a page. True positives come from a maximum
/// matching over key-equal overlapping pairs; the leftover boxes are then
/// paired by descending IoU (ties by gt index, then pred index) to label
/// structure mismatches.
pub fn combined_matching(gt: &[GtMolecule], pred: &[PredMolecule], tau: f64) -> Result<PageMatching, MetricError> {
    check_tau(tau)?;
    let gb: Vec<BBox> = gt.iter().map(|g| g.bbox).collect();
    let pb: Vec<BBox> = pred.iter().map(|p| p.bbox.bbox).collect();
    let same_key = |g: usize, p: usize| pred[p].key.as_ref() == Some(&gt[g].key);
    let adj = candidates(&gb, &pb, tau, same_key);
    let assignment = max_matching_adj(&adj, pred.len());

    let mut out = PageMatching::default();
    let mut gt_used = vec![false; gt.len()];
    let mut pred_used = vec![false; pred.len()];
    for (g, p) in assignment.iter().enumerate() {
        if let Some(p) = *p {
            out.matched.push((g, p));
            gt_used[g] = true;
            pred_used[p] = true;
        }
    }

    let mut leftovers: Vec<(f64, usize, usize)> = Vec::new();
    for g in (0..gt.len()).filter(|&g| !gt_used[g]) {
        for p in (0..pred.len()).filter(|&p| !pred_used[p]) {
            let v = iou(&gb[g], &pb[p]);
            if v >= tau {
                leftovers.push((v, g, p));
            }
        }
    }
    leftovers.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for (_, g, p) in leftovers {
        if !gt_used[g] && !pred_used[p] {
            gt_used[g] = true;
            pred_used[p] = true;
            out.mismatched.push((g, p));
        }
    }
    out.missed = (0..gt.len()).filter(|&g| !gt_used[g]).collect();
    out.spurious = (0..pred.len()).filter(|&p| !pred_used[p]).collect();
    Ok(out)
}

pub fn combined_counts(gt: &[GtMolecule], pred: &[PredMolecule], tau: f64) -> Result<CombinedCounts, MetricError> {
    Ok(combined_matching(gt, pred, tau)?.counts(gt.len(), pred.len()))
}

/// The combined matcher with structures ignored: the largest one-to-one set of
/// box pairs at IoU ≥ tau, as `(gt, pred)` in gt order.
pub fn localization_matching(gt: &[BBox], pred: &[BBox], tau: f64) -> Result<Vec<(usize, usize)>, MetricError> {
    check_tau(tau)?;
    let adj = candidates(gt, pred, tau, |_, _| true);
    Ok(max_matching_adj(&adj, pred.len())
        .into_iter()
        .enumerate()
        .filter_map(|(g, p)| p.map(|p| (g, p)))
        .collect())
}

pub fn localization_counts(gt: &[BBox], pred: &[BBox], tau: f64) -> Result<CombinedCounts, MetricError> {
    let tp = localization_matching(gt, pred, tau)?.len();
    Ok(CombinedCounts::from_tp(tp, pred.len(), gt.len()))
}

/// One page's molecules for corpus-level scoring.
#[derive(Debug, Clone, Default)]
pub struct CombinedPage {
    pub gt: Vec<GtMolecule>,
    pub pred: Vec<PredMolecule>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombinedReport {
    pub counts: CombinedCounts,
    pub prf: Prf,
    /// Per page, in input order.
    pub pages: Vec<PageMatching>,
    pub page_counts: Vec<CombinedCounts>,
}

/// Corpus precision, recall and F1 from counts summed over pages.
pub fn combined_prf(pages: &[CombinedPage], tau: f64) -> Result<CombinedReport, MetricError> {
    check_tau(tau)?;
    if pages.iter().all(|p| p.gt.is_empty()) {
        return Err(MetricError::Undefined("corpus has no ground-truth molecules".into()));
    }
    let matchings = pages
        .par_iter()
        .map(|p| combined_matching(&p.gt, &p.pred, tau))
        .collect::<Result<Vec<_>, _>>()?;
    let page_counts: Vec<CombinedCounts> = matchings
        .iter()
        .zip(pages)
        .map(|(m, p)| m.counts(p.gt.len(), p.pred.len()))
        .collect();
    let counts: CombinedCounts = page_counts.iter().copied().sum();
    Ok(CombinedReport {
        counts,
        prf: counts.prf(),
        pages: matchings,
        page_counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionAccuracy {
    pub pairs: usize,
    pub matched: usize,
    pub smiles_match_rate: f64,
    pub mean_tanimoto: f64,
}

/// Exact-key match rate and mean fingerprint similarity over
/// (ground truth, prediction) pairs. Invalid predictions score 0 on both.
pub fn conversion_accuracy(pairs: &[(NormalizedMolecule, Option<NormalizedMolecule>)]) -> Result<ConversionAccuracy, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::Undefined("no structure pairs to compare".into()));
    }
    let scored: Vec<(bool, f64)> = pairs
        .par_iter()
        .map(|(gt, pred)| {
            let Some(pred) = pred else {
                return (false, 0.0);
            };
            let same = crate::chem::canonical_key(gt) == crate::chem::canonical_key(pred);
            let sim = if same {
                1.0
            } else {
                let a = fingerprint(gt, DEFAULT_RADIUS, DEFAULT_NBITS);
                let b = fingerprint(pred, DEFAULT_RADIUS, DEFAULT_NBITS);
                tanimoto(&a, &b).expect("equal fingerprint lengths")
            };
            (same, sim)
        })
        .collect();
    let matched = scored.iter().filter(|(m, _)| *m).count();
    let total: f64 = scored.iter().map(|(_, s)| s).sum();
    Ok(ConversionAccuracy {
        pairs: pairs.len(),
        matched,
        smiles_match_rate: matched as f64 / pairs.len() as f64,
        mean_tanimoto: total / pairs.len() as f64,
    })
}
