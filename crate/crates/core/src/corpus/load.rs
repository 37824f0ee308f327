//! Validated corpora and their loaders.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use rayon::prelude::*;

use super::schema::{
    EntityRaw, FileRaw, GtMoleculeRaw, GtPageRaw, InlineRaw, PredMoleculeRaw, PredPageRaw,
    ReactionRaw, RefRaw, StructureFormat, StructureRaw,
};
use super::CorpusError;
use crate::chem::{canonical_key, normalize, CanonicalKey, NormalizedMolecule};
use crate::detection::{BBox, ScoredBox};
use crate::io::{parse_molfile, parse_smiles, MolfileDocument};
use crate::reaction::{EntityKind, Reaction, Role, RxnEntity};

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus<P> {
    pub dataset: String,
    pub pages: Vec<P>,
}

pub type GroundTruth = Corpus<PageAnnotation>;
pub type Predictions = Corpus<PagePrediction>;

#[derive(Debug, Clone, PartialEq)]
pub struct GtEntry {
    pub id: String,
    pub bbox: BBox,
    pub molfile: String,
    pub document: MolfileDocument,
    pub structure: NormalizedMolecule,
    pub key: CanonicalKey,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageAnnotation {
    pub page_id: String,
    pub width: f64,
    pub height: f64,
    pub molecules: Vec<GtEntry>,
    pub reactions: Vec<Reaction>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredEntry {
    pub id: Option<String>,
    pub bbox: ScoredBox,
    pub source: StructureRaw,
    /// The normalized structure, or why it could not be read.
    pub structure: Result<NormalizedMolecule, String>,
}

impl PredEntry {
    /// Canonical key, `None` for unreadable structures.
    pub fn key(&self) -> Option<CanonicalKey> {
        self.structure.as_ref().ok().map(canonical_key)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredReaction {
    pub score: Option<f64>,
    pub reaction: Reaction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PagePrediction {
    pub page_id: String,
    pub width: f64,
    pub height: f64,
    pub molecules: Vec<PredEntry>,
    pub reactions: Vec<ScoredReaction>,
}

fn read(path: &Path) -> Result<String, CorpusError> {
    std::fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CorpusError> {
    serde_json::from_str(text).map_err(|e| CorpusError::Schema(e.to_string()))
}

fn at_path<T>(path: &Path, r: Result<T, CorpusError>) -> Result<T, CorpusError> {
    r.map_err(|e| CorpusError::InFile {
        path: path.display().to_string(),
        source: Box::new(e),
    })
}

pub fn load_ground_truth(path: impl AsRef<Path>) -> Result<GroundTruth, CorpusError> {
    let path = path.as_ref();
    at_path(path, read(path).and_then(|t| parse_ground_truth(&t)))
}

pub fn load_predictions(path: impl AsRef<Path>) -> Result<Predictions, CorpusError> {
    let path = path.as_ref();
    at_path(path, read(path).and_then(|t| parse_predictions(&t)))
}

/// First error in page order, so diagnostics do not depend on scheduling.
fn collect_ordered<T>(results: Vec<Result<T, CorpusError>>) -> Result<Vec<T>, CorpusError> {
    results.into_iter().collect()
}

fn unique_page_ids<'a>(ids: impl Iterator<Item = &'a str>) -> Result<(), CorpusError> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(CorpusError::DuplicatePage(id.to_string()));
        }
    }
    Ok(())
}

fn check_page_size(page: &str, width: f64, height: f64) -> Result<(), CorpusError> {
    if width.is_finite() && height.is_finite() && width > 0.0 && height > 0.0 {
        Ok(())
    } else {
        Err(CorpusError::InvalidPage {
            page: page.to_string(),
            reason: format!("page size {width} x {height} must be positive"),
        })
    }
}

fn make_box(page: &str, item: &str, v: [f64; 4]) -> Result<BBox, CorpusError> {
    BBox::try_from(v).map_err(|e| CorpusError::InvalidBox {
        page: page.to_string(),
        item: item.to_string(),
        reason: e.to_string(),
    })
}

fn bounded_box(page: &str, item: &str, v: [f64; 4], width: f64, height: f64) -> Result<BBox, CorpusError> {
    let b = make_box(page, item, v)?;
    if !b.fits_within(width, height) {
        return Err(CorpusError::OutOfBounds {
            page: page.to_string(),
            item: item.to_string(),
            bbox: v,
            width,
            height,
        });
    }
    Ok(b)
}

pub fn parse_ground_truth(text: &str) -> Result<GroundTruth, CorpusError> {
    let raw: FileRaw<GtPageRaw> = json(text)?;
    unique_page_ids(raw.pages.iter().map(|p| p.page_id.as_str()))?;
    let pages = collect_ordered(raw.pages.par_iter().map(gt_page).collect())?;
    Ok(Corpus {
        dataset: raw.dataset,
        pages,
    })
}

fn gt_page(raw: &GtPageRaw) -> Result<PageAnnotation, CorpusError> {
    let page = raw.page_id.as_str();
    check_page_size(page, raw.width, raw.height)?;
    let mut ids = HashSet::new();
    let mut molecules = Vec::with_capacity(raw.molecules.len());
    for m in &raw.molecules {
        if !ids.insert(m.id.as_str()) {
            return Err(CorpusError::DuplicateMolecule {
                page: page.to_string(),
                id: m.id.clone(),
            });
        }
        let item = format!("molecule {}", m.id);
        let bbox = bounded_box(page, &item, m.bbox, raw.width, raw.height)?;
        let located = |reason: String| CorpusError::InvalidStructure {
            page: page.to_string(),
            molecule: m.id.clone(),
            reason,
        };
        let document = parse_molfile(&m.molfile).map_err(|e| located(e.to_string()))?;
        let structure = normalize(&document.body).map_err(|e| located(e.to_string()))?;
        let key = canonical_key(&structure);
        molecules.push(GtEntry {
            id: m.id.clone(),
            bbox,
            molfile: m.molfile.clone(),
            document,
            structure,
            key,
        });
    }
    let boxes: HashMap<&str, BBox> = molecules.iter().map(|m| (m.id.as_str(), m.bbox)).collect();
    let reactions = raw
        .reactions
        .iter()
        .enumerate()
        .map(|(i, r)| reaction(page, i, r, &boxes, Some((raw.width, raw.height))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PageAnnotation {
        page_id: raw.page_id.clone(),
        width: raw.width,
        height: raw.height,
        molecules,
        reactions,
    })
}

fn reaction(
    page: &str,
    index: usize,
    raw: &ReactionRaw,
    boxes: &HashMap<&str, BBox>,
    bounds: Option<(f64, f64)>,
) -> Result<Reaction, CorpusError> {
    let mut entities = Vec::new();
    for (role, list) in [
        (Role::Reactant, &raw.reactants),
        (Role::Condition, &raw.conditions),
        (Role::Product, &raw.products),
    ] {
        for e in list {
            let (kind, bbox) = match e {
                EntityRaw::Ref(RefRaw { reference }) => match boxes.get(reference.as_str()) {
                    Some(b) => (EntityKind::Molecule, *b),
                    None => {
                        return Err(CorpusError::UnknownReference {
                            page: page.to_string(),
                            reaction: index,
                            reference: reference.clone(),
                        })
                    }
                },
                EntityRaw::Inline(InlineRaw { kind, bbox }) => {
                    let item = format!("reaction {index} entity");
                    let b = match bounds {
                        Some((w, h)) => bounded_box(page, &item, *bbox, w, h)?,
                        None => make_box(page, &item, *bbox)?,
                    };
                    (*kind, b)
                }
            };
            entities.push(RxnEntity { role, kind, bbox });
        }
    }
    Reaction::new(entities).map_err(|e| CorpusError::InvalidReaction {
        page: page.to_string(),
        reaction: index,
        reason: e.to_string(),
    })
}

fn check_score(page: &str, item: &str, score: f64) -> Result<(), CorpusError> {
    if (0.0..=1.0).contains(&score) {
        Ok(())
    } else {
        Err(CorpusError::ScoreOutOfRange {
            page: page.to_string(),
            item: item.to_string(),
            score,
        })
    }
}

/// Reads a predicted structure; failures are kept as the entry's diagnostic.
pub fn read_structure(s: &StructureRaw) -> Result<NormalizedMolecule, String> {
    let mol = match s.format {
        StructureFormat::Smiles => parse_smiles(&s.value).map_err(|e| e.to_string())?,
        StructureFormat::Molfile => parse_molfile(&s.value).map_err(|e| e.to_string())?.body,
    };
    normalize(&mol).map_err(|e| e.to_string())
}

pub fn parse_predictions(text: &str) -> Result<Predictions, CorpusError> {
    let raw: FileRaw<PredPageRaw> = json(text)?;
    unique_page_ids(raw.pages.iter().map(|p| p.page_id.as_str()))?;
    let pages = collect_ordered(raw.pages.par_iter().map(pred_page).collect())?;
    Ok(Corpus {
        dataset: raw.dataset,
        pages,
    })
}

fn pred_page(raw: &PredPageRaw) -> Result<PagePrediction, CorpusError> {
    let page = raw.page_id.as_str();
    check_page_size(page, raw.width, raw.height)?;
    let mut ids = HashSet::new();
    let mut molecules = Vec::with_capacity(raw.molecules.len());
    for (i, m) in raw.molecules.iter().enumerate() {
        let item = match &m.id {
            Some(id) => format!("molecule {id}"),
            None => format!("molecule #{i}"),
        };
        if let Some(id) = &m.id {
            if !ids.insert(id.as_str()) {
                return Err(CorpusError::DuplicateMolecule {
                    page: page.to_string(),
                    id: id.clone(),
                });
            }
        }
        check_score(page, &item, m.score)?;
        let bbox = make_box(page, &item, m.bbox)?;
        molecules.push(PredEntry {
            id: m.id.clone(),
            bbox: ScoredBox {
                bbox,
                score: m.score,
            },
            source: m.structure.clone(),
            structure: read_structure(&m.structure),
        });
    }
    let boxes: HashMap<&str, BBox> = molecules
        .iter()
        .filter_map(|m| m.id.as_deref().map(|id| (id, m.bbox.bbox)))
        .collect();
    let mut reactions = Vec::with_capacity(raw.reactions.len());
    for (i, r) in raw.reactions.iter().enumerate() {
        if let Some(s) = r.score {
            check_score(page, &format!("reaction {i}"), s)?;
        }
        reactions.push(ScoredReaction {
            score: r.score,
            reaction: reaction(page, i, r, &boxes, None)?,
        });
    }
    Ok(PagePrediction {
        page_id: raw.page_id.clone(),
        width: raw.width,
        height: raw.height,
        molecules,
        reactions,
    })
}

/// Pairs pages by id, sorted by id. Every page must appear in both corpora.
pub fn align<'a>(gt: &'a GroundTruth, pred: &'a Predictions) -> Result<Vec<(&'a PageAnnotation, &'a PagePrediction)>, CorpusError> {
    let g: BTreeMap<&str, &PageAnnotation> = gt.pages.iter().map(|p| (p.page_id.as_str(), p)).collect();
    let p: BTreeMap<&str, &PagePrediction> = pred.pages.iter().map(|p| (p.page_id.as_str(), p)).collect();
    let missing: Vec<String> = g.keys().filter(|k| !p.contains_key(*k)).map(|k| k.to_string()).collect();
    let unexpected: Vec<String> = p.keys().filter(|k| !g.contains_key(*k)).map(|k| k.to_string()).collect();
    if !missing.is_empty() || !unexpected.is_empty() {
        return Err(CorpusError::PageMismatch { missing, unexpected });
    }
    Ok(g.into_iter().map(|(k, page)| (page, p[k])).collect())
}

fn entities_raw(r: &Reaction, role: Role) -> Vec<EntityRaw> {
    r.with_role(role)
        .map(|e| {
            EntityRaw::Inline(InlineRaw {
                kind: e.kind,
                bbox: e.bbox.into(),
            })
        })
        .collect()
}

fn reaction_raw(r: &Reaction, score: Option<f64>) -> ReactionRaw {
    ReactionRaw {
        score,
        reactants: entities_raw(r, Role::Reactant),
        conditions: entities_raw(r, Role::Condition),
        products: entities_raw(r, Role::Product),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("corpus values serialize");
    s.push('\n');
    s
}

impl GroundTruth {
    /// File form; reaction entities are written as inline boxes.
    pub fn to_raw(&self) -> FileRaw<GtPageRaw> {
        FileRaw {
            dataset: self.dataset.clone(),
            pages: self
                .pages
                .iter()
                .map(|p| GtPageRaw {
                    page_id: p.page_id.clone(),
                    width: p.width,
                    height: p.height,
                    molecules: p
                        .molecules
                        .iter()
                        .map(|m| GtMoleculeRaw {
                            id: m.id.clone(),
                            bbox: m.bbox.into(),
                            molfile: m.molfile.clone(),
                        })
                        .collect(),
                    reactions: p.reactions.iter().map(|r| reaction_raw(r, None)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(&self.to_raw())
    }
}

impl Predictions {
    pub fn to_raw(&self) -> FileRaw<PredPageRaw> {
        FileRaw {
            dataset: self.dataset.clone(),
            pages: self
                .pages
                .iter()
                .map(|p| PredPageRaw {
                    page_id: p.page_id.clone(),
                    width: p.width,
                    height: p.height,
                    molecules: p
                        .molecules
                        .iter()
                        .map(|m| PredMoleculeRaw {
                            id: m.id.clone(),
                            bbox: m.bbox.bbox.into(),
                            score: m.bbox.score,
                            structure: m.source.clone(),
                        })
                        .collect(),
                    reactions: p
                        .reactions
                        .iter()
                        .map(|r| reaction_raw(&r.reaction, r.score))
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(&self.to_raw())
    }
}

/// Serializes any file form with the same layout the loaders accept.
pub fn file_json<P: serde::Serialize>(file: &FileRaw<P>) -> String {
    to_json(file)
}
