//! Turns aligned corpus pages into the inputs of each metric.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::chem::NormalizedMolecule;
use crate::combined::{CombinedPage, GtMolecule, PredMolecule};
use crate::corpus::{CorpusError, PageAnnotation, PagePrediction};
use crate::detection::PageDetections;
use crate::reaction::Reaction;

pub type AlignedPage<'a> = (&'a PageAnnotation, &'a PagePrediction);

pub fn detection_pages(pages: &[AlignedPage<'_>]) -> Vec<PageDetections> {
    pages
        .iter()
        .map(|(g, p)| PageDetections {
            preds: p.molecules.iter().map(|m| m.bbox).collect(),
            gts: g.molecules.iter().map(|m| m.bbox).collect(),
        })
        .collect()
}

pub fn combined_pages(pages: &[AlignedPage<'_>]) -> Vec<CombinedPage> {
    pages
        .par_iter()
        .map(|(g, p)| CombinedPage {
            gt: g
                .molecules
                .iter()
                .map(|m| GtMolecule {
                    bbox: m.bbox,
                    key: m.key.clone(),
                })
                .collect(),
            pred: p
                .molecules
                .iter()
                .map(|m| PredMolecule {
                    bbox: m.bbox,
                    key: m.key(),
                })
                .collect(),
        })
        .collect()
}

/// One pair per ground-truth molecule, joined to the prediction carrying the
/// same id. Missing or unreadable predictions pair with `None`. A prediction
/// id that names no ground-truth molecule is an error.
pub fn conversion_pairs(pages: &[AlignedPage<'_>]) -> Result<Vec<(NormalizedMolecule, Option<NormalizedMolecule>)>, CorpusError> {
    let mut pairs = Vec::new();
    for (g, p) in pages {
        let by_id: HashMap<&str, &NormalizedMolecule> = g
            .molecules
            .iter()
            .map(|m| (m.id.as_str(), &m.structure))
            .collect();
        let mut predicted: HashMap<&str, Option<&NormalizedMolecule>> = HashMap::new();
        for m in &p.molecules {
            let Some(id) = m.id.as_deref() else {
                continue;
            };
            if !by_id.contains_key(id) {
                return Err(CorpusError::UnknownMolecule {
                    page: p.page_id.clone(),
                    id: id.to_string(),
                });
            }
            predicted.insert(id, m.structure.as_ref().ok());
        }
        for m in &g.molecules {
            let pred = predicted.get(m.id.as_str()).copied().flatten().cloned();
            pairs.push((m.structure.clone(), pred));
        }
    }
    Ok(pairs)
}

pub fn reaction_pages(pages: &[AlignedPage<'_>]) -> Vec<(Vec<Reaction>, Vec<Reaction>)> {
    pages
        .iter()
        .map(|(g, p)| {
            (
                g.reactions.clone(),
                p.reactions.iter().map(|r| r.reaction.clone()).collect(),
            )
        })
        .collect()
}
