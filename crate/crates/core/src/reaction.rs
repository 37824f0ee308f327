//! Reaction diagram scoring.
//!
//! Two entities correspond when they have the same kind and their boxes
//! overlap at IoU strictly above 0.5. A reaction prediction matches a
//! ground-truth reaction when the entities can be paired one-to-one with
//! nothing left over on either side:
//!
//! * hard: every entity, with the role required to agree;
//! * soft: molecules only, with reactants and condition molecules pooled
//!   into one group and products forming the other.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detection::{iou, BBox, MetricError, Prf};
use crate::matching::has_perfect_matching;

pub const ENTITY_IOU: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Reactant,
    Condition,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Molecule,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxnEntity {
    pub role: Role,
    pub kind: EntityKind,
    pub bbox: BBox,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReactionError {
    #[error("a reaction needs at least one reactant")]
    NoReactant,
    #[error("a reaction needs at least one product")]
    NoProduct,
    #[error("text entities may only be conditions, found a text {0:?}")]
    TextOutsideConditions(Role),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reaction {
    entities: Vec<RxnEntity>,
}

impl Reaction {
    pub fn new(entities: Vec<RxnEntity>) -> Result<Reaction, ReactionError> {
        if let Some(e) = entities
            .iter()
            .find(|e| e.kind == EntityKind::Text && e.role != Role::Condition)
        {
            return Err(ReactionError::TextOutsideConditions(e.role));
        }
        if !entities.iter().any(|e| e.role == Role::Reactant) {
            return Err(ReactionError::NoReactant);
        }
        if !entities.iter().any(|e| e.role == Role::Product) {
            return Err(ReactionError::NoProduct);
        }
        Ok(Reaction { entities })
    }

    pub fn entities(&self) -> &[RxnEntity] {
        &self.entities
    }

    pub fn with_role(&self, role: Role) -> impl Iterator<Item = &RxnEntity> {
        self.entities.iter().filter(move |e| e.role == role)
    }
}

pub fn entity_match(a: &RxnEntity, b: &RxnEntity, require_role: bool) -> bool {
    a.kind == b.kind && (!require_role || a.role == b.role) && iou(&a.bbox, &b.bbox) > ENTITY_IOU
}

fn groups_match(a: &[&RxnEntity], b: &[&RxnEntity], require_role: bool) -> bool {
    has_perfect_matching(a.len(), b.len(), |i, j| entity_match(a[i], b[j], require_role))
}

fn soft_groups(r: &Reaction) -> (Vec<&RxnEntity>, Vec<&RxnEntity>) {
    r.entities
        .iter()
        .filter(|e| e.kind == EntityKind::Molecule)
        .partition(|e| e.role != Role::Product)
}

pub fn soft_match(gt: &Reaction, pred: &Reaction) -> bool {
    let (g_left, g_prod) = soft_groups(gt);
    let (p_left, p_prod) = soft_groups(pred);
    groups_match(&g_left, &p_left, false) && groups_match(&g_prod, &p_prod, false)
}

pub fn hard_match(gt: &Reaction, pred: &Reaction) -> bool {
    let g: Vec<&RxnEntity> = gt.entities.iter().collect();
    let p: Vec<&RxnEntity> = pred.entities.iter().collect();
    groups_match(&g, &p, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    Soft,
    Hard,
}

impl MatchMode {
    pub fn matches(self, gt: &Reaction, pred: &Reaction) -> bool {
        match self {
            MatchMode::Soft => soft_match(gt, pred),
            MatchMode::Hard => hard_match(gt, pred),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReactionCounts {
    pub matched: usize,
    pub n_pred: usize,
    pub n_gt: usize,
}

impl std::ops::Add for ReactionCounts {
    type Output = ReactionCounts;

    fn add(self, o: ReactionCounts) -> ReactionCounts {
        ReactionCounts {
            matched: self.matched + o.matched,
            n_pred: self.n_pred + o.n_pred,
            n_gt: self.n_gt + o.n_gt,
        }
    }
}

/// Pairs reactions of one page: each prediction, in order, takes the first
/// still-unpaired ground-truth reaction it matches. Returns `(gt, pred)` pairs.
pub fn pair_reactions(gt: &[Reaction], pred: &[Reaction], mode: MatchMode) -> Vec<(usize, usize)> {
    let mut used = vec![false; gt.len()];
    let mut pairs = Vec::new();
    for (p, pr) in pred.iter().enumerate() {
        if let Some(g) = (0..gt.len()).find(|&g| !used[g] && mode.matches(&gt[g], pr)) {
            used[g] = true;
            pairs.push((g, p));
        }
    }
    pairs
}

pub fn reaction_counts(gt: &[Reaction], pred: &[Reaction], mode: MatchMode) -> ReactionCounts {
    ReactionCounts {
        matched: pair_reactions(gt, pred, mode).len(),
        n_pred: pred.len(),
        n_gt: gt.len(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReactionReport {
    pub mode: MatchMode,
    pub counts: ReactionCounts,
    pub prf: Prf,
    pub page_counts: Vec<ReactionCounts>,
}

/// Corpus scores over aligned `(ground truth, prediction)` pages.
pub fn reaction_prf(pages: &[(&[Reaction], &[Reaction])], mode: MatchMode) -> Result<ReactionReport, MetricError> {
    let page_counts: Vec<ReactionCounts> = pages
        .par_iter()
        .map(|(g, p)| reaction_counts(g, p, mode))
        .collect();
    let counts = page_counts
        .iter()
        .copied()
        .fold(ReactionCounts::default(), |a, b| a + b);
    if counts.n_gt == 0 {
        return Err(MetricError::Undefined("corpus has no ground-truth reactions".into()));
    }
    Ok(ReactionReport {
        mode,
        counts,
        prf: Prf::from_counts(counts.matched, counts.n_pred, counts.n_gt),
        page_counts,
    })
}
