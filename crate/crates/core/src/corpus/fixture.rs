//! Seeded synthetic corpora whose metric values are known by construction.
//!
//! Pages are A4 at 150 dpi, divided into a grid of 200 px cells. Each
//! molecule, text label and spurious prediction gets its own cell and a
//! predicted box never leaves the cell of the box it was derived from, so a
//! prediction can only ever overlap its own ground truth. That makes the
//! expected counts a matter of bookkeeping:
//!
//! * a ground-truth molecule is a true positive when its prediction was not
//!   dropped, its structure was not corrupted and the jittered box still has
//!   IoU ≥ 0.5;
//! * every other prediction is a false positive and every other ground-truth
//!   molecule a false negative.
//!
//! Reactions use disjoint sets of molecules. A predicted reaction is either
//! dropped, exact, or carries a role error (a condition molecule moved to the
//! reactants, a second reactant moved to the conditions, or the text label
//! omitted), which passes the soft match and fails the hard one.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::random::{mutate, random_layout, random_molecule};
use super::schema::{
    EntityRaw, FileRaw, GtMoleculeRaw, GtPageRaw, InlineRaw, PredMoleculeRaw, PredPageRaw, ReactionRaw,
    RefRaw, StructureFormat, StructureRaw,
};
use crate::chem::{canonical_key, fingerprint, normalize, tanimoto, Molecule, DEFAULT_NBITS, DEFAULT_RADIUS};
use crate::combined::CombinedCounts;
use crate::detection::{iou, BBox};
use crate::io::{write_molfile, write_smiles};
use crate::reaction::EntityKind;

pub const PAGE_WIDTH: f64 = 1240.0;
pub const PAGE_HEIGHT: f64 = 1754.0;
const CELL: f64 = 200.0;
const COLS: usize = 6;
const ROWS: usize = 8;
pub const CELLS_PER_PAGE: usize = COLS * ROWS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    /// Each box edge moves by up to this fraction of the box size.
    pub box_jitter: f64,
    pub structure_corruption_rate: f64,
    /// Probability that a molecule or reaction gets no prediction.
    pub drop_rate: f64,
    /// Probability that an empty cell receives a spurious prediction.
    pub spurious_rate: f64,
    /// Probability that a predicted reaction carries a role error.
    pub role_error_rate: f64,
}

impl Perturbation {
    pub fn none() -> Perturbation {
        Perturbation {
            box_jitter: 0.0,
            structure_corruption_rate: 0.0,
            drop_rate: 0.0,
            spurious_rate: 0.0,
            role_error_rate: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureParams {
    pub dataset: String,
    pub pages: usize,
    pub molecules_per_page: [usize; 2],
    pub reactions_per_page: [usize; 2],
    pub max_atoms: usize,
    pub perturbation: Perturbation,
}

impl Default for FixtureParams {
    fn default() -> FixtureParams {
        FixtureParams {
            dataset: "Synthetic".into(),
            pages: 10,
            molecules_per_page: [3, 10],
            reactions_per_page: [0, 3],
            max_atoms: 20,
            perturbation: Perturbation::none(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixtureError {
    #[error("infeasible layout: {0}")]
    Infeasible(String),
    #[error("invalid fixture parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedConversion {
    pub pairs: usize,
    pub matched: usize,
    pub mean_tanimoto: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedReactions {
    pub n_gt: usize,
    pub n_pred: usize,
    pub soft_matched: usize,
    pub hard_matched: usize,
}

/// Values a correct evaluator must report on the fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub seed: u64,
    pub params: FixtureParams,
    pub tau: f64,
    pub combined: CombinedCounts,
    pub conversion: ExpectedConversion,
    pub reactions: ExpectedReactions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub ground_truth: FileRaw<GtPageRaw>,
    pub predictions: FileRaw<PredPageRaw>,
    pub expected: Expected,
}

impl Fixture {
    pub fn ground_truth_json(&self) -> String {
        super::load::file_json(&self.ground_truth)
    }

    pub fn predictions_json(&self) -> String {
        super::load::file_json(&self.predictions)
    }

    pub fn expected_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.expected).expect("expected values serialize");
        s.push('\n');
        s
    }
}

fn validate(params: &FixtureParams) -> Result<(), FixtureError> {
    let p = &params.perturbation;
    for (name, rate) in [
        ("structure_corruption_rate", p.structure_corruption_rate),
        ("drop_rate", p.drop_rate),
        ("spurious_rate", p.spurious_rate),
        ("role_error_rate", p.role_error_rate),
    ] {
        if !(0.0..=1.0).contains(&rate) {
            return Err(FixtureError::InvalidParameter(format!("{name} must be in [0, 1], got {rate}")));
        }
    }
    if !(p.box_jitter.is_finite() && p.box_jitter >= 0.0) {
        return Err(FixtureError::InvalidParameter(format!("box_jitter must be non-negative, got {}", p.box_jitter)));
    }
    for (name, [lo, hi]) in [
        ("molecules_per_page", params.molecules_per_page),
        ("reactions_per_page", params.reactions_per_page),
    ] {
        if lo > hi {
            return Err(FixtureError::InvalidParameter(format!("{name}: {lo} > {hi}")));
        }
    }
    if params.max_atoms == 0 {
        return Err(FixtureError::InvalidParameter("max_atoms must be positive".into()));
    }
    let need = params.molecules_per_page[1] + params.reactions_per_page[1];
    if need > CELLS_PER_PAGE {
        return Err(FixtureError::Infeasible(format!(
            "up to {need} boxes per page requested, a page holds {CELLS_PER_PAGE}"
        )));
    }
    Ok(())
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn cell_origin(cell: usize) -> (f64, f64) {
    ((cell % COLS) as f64 * CELL, (cell / COLS) as f64 * CELL)
}

/// A box inside `cell` with a 10 px margin.
fn box_in_cell<R: Rng>(rng: &mut R, cell: usize, w: (f64, f64), h: (f64, f64)) -> [f64; 4] {
    let (cx, cy) = cell_origin(cell);
    let bw = round2(rng.random_range(w.0..w.1));
    let bh = round2(rng.random_range(h.0..h.1));
    let x1 = round2(cx + 10.0 + rng.random_range(0.0..=(CELL - 20.0 - bw)));
    let y1 = round2(cy + 10.0 + rng.random_range(0.0..=(CELL - 20.0 - bh)));
    [x1, y1, round2(x1 + bw), round2(y1 + bh)]
}

/// Moves every edge by up to `jitter` times the box size, staying in the cell.
fn jitter_box<R: Rng>(rng: &mut R, b: [f64; 4], cell: usize, jitter: f64) -> [f64; 4] {
    if jitter == 0.0 {
        return b;
    }
    let (cx, cy) = cell_origin(cell);
    let (w, h) = (b[2] - b[0], b[3] - b[1]);
    let mut shift = |v: f64, size: f64, lo: f64, hi: f64| {
        let d = rng.random_range(-jitter..=jitter) * size;
        round2((v + d).clamp(lo, hi))
    };
    let x1 = shift(b[0], w, cx + 1.0, cx + CELL - 2.0);
    let y1 = shift(b[1], h, cy + 1.0, cy + CELL - 2.0);
    let x2 = shift(b[2], w, x1 + 1.0, cx + CELL - 1.0);
    let y2 = shift(b[3], h, y1 + 1.0, cy + CELL - 1.0);
    [x1, y1, x2, y2]
}

fn bbox(v: [f64; 4]) -> BBox {
    BBox::try_from(v).expect("generated boxes are valid")
}

fn molfile_text(mol: &Molecule, layout: &[[f64; 2]]) -> String {
    write_molfile(mol, layout).expect("layout covers every atom")
}

enum Corruption {
    Changed(Molecule),
    Unreadable,
}

fn corrupt<R: Rng>(rng: &mut R, mol: &Molecule) -> Corruption {
    if rng.random_bool(0.25) {
        return Corruption::Unreadable;
    }
    let key = canonical_key(&normalize(mol).expect("generated molecules normalize"));
    for _ in 0..32 {
        let changed = mutate(rng, mol);
        if let Ok(n) = normalize(&changed) {
            if canonical_key(&n) != key {
                return Corruption::Changed(changed);
            }
        }
    }
    Corruption::Unreadable
}

fn predicted_structure<R: Rng>(rng: &mut R, mol: &Molecule) -> StructureRaw {
    if rng.random_bool(0.5) {
        let n = normalize(mol).expect("generated molecules normalize");
        StructureRaw {
            format: StructureFormat::Smiles,
            value: write_smiles(&n),
        }
    } else {
        let mut perm: Vec<usize> = (0..mol.atom_count()).collect();
        perm.shuffle(rng);
        let permuted = mol.permuted(&perm);
        let layout = random_layout(rng, permuted.atom_count());
        StructureRaw {
            format: StructureFormat::Molfile,
            value: molfile_text(&permuted, &layout),
        }
    }
}

fn similarity(a: &Molecule, b: &Molecule) -> f64 {
    let fa = fingerprint(&normalize(a).expect("normalizes"), DEFAULT_RADIUS, DEFAULT_NBITS);
    let fb = fingerprint(&normalize(b).expect("normalizes"), DEFAULT_RADIUS, DEFAULT_NBITS);
    tanimoto(&fa, &fb).expect("equal lengths")
}

struct Tally {
    combined: CombinedCounts,
    pairs: usize,
    matched: usize,
    tanimoto_sum: f64,
    reactions: ExpectedReactions,
}

pub fn generate_fixture(seed: u64, params: &FixtureParams) -> Result<Fixture, FixtureError> {
    validate(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pert = &params.perturbation;
    let mut tally = Tally {
        combined: CombinedCounts::default(),
        pairs: 0,
        matched: 0,
        tanimoto_sum: 0.0,
        reactions: ExpectedReactions {
            n_gt: 0,
            n_pred: 0,
            soft_matched: 0,
            hard_matched: 0,
        },
    };
    let prefix: String = params
        .dataset
        .to_lowercase()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
        .collect();

    let mut gt_pages = Vec::with_capacity(params.pages);
    let mut pred_pages = Vec::with_capacity(params.pages);
    for page_no in 0..params.pages {
        let page_id = format!("{prefix}-{:04}", page_no + 1);
        let mut cells: Vec<usize> = (0..CELLS_PER_PAGE).collect();
        cells.shuffle(&mut rng);
        let mut cells = cells.into_iter();

        let [lo, hi] = params.molecules_per_page;
        let n_mol = rng.random_range(lo..=hi);
        let mut gt_mols = Vec::with_capacity(n_mol);
        let mut pred_mols = Vec::new();
        for i in 0..n_mol {
            let cell = cells.next().expect("capacity checked");
            let id = format!("m{}", i + 1);
            let mol = random_molecule(&mut rng, params.max_atoms);
            let layout = random_layout(&mut rng, mol.atom_count());
            let gt_box = box_in_cell(&mut rng, cell, (100.0, 180.0), (100.0, 180.0));
            gt_mols.push(GtMoleculeRaw {
                id: id.clone(),
                bbox: gt_box,
                molfile: molfile_text(&mol, &layout),
            });

            tally.pairs += 1;
            if rng.random_bool(pert.drop_rate) {
                tally.combined.fn_ += 1;
                continue;
            }
            let pred_box = jitter_box(&mut rng, gt_box, cell, pert.box_jitter);
            let localized = iou(&bbox(gt_box), &bbox(pred_box)) >= 0.5;
            let (structure, same) = if rng.random_bool(pert.structure_corruption_rate) {
                match corrupt(&mut rng, &mol) {
                    Corruption::Changed(other) => {
                        tally.tanimoto_sum += similarity(&mol, &other);
                        (predicted_structure(&mut rng, &other), false)
                    }
                    Corruption::Unreadable => {
                        let n = normalize(&mol).expect("generated molecules normalize");
                        let broken = StructureRaw {
                            format: StructureFormat::Smiles,
                            value: format!("{}1", write_smiles(&n)),
                        };
                        (broken, false)
                    }
                }
            } else {
                tally.tanimoto_sum += 1.0;
                tally.matched += 1;
                (predicted_structure(&mut rng, &mol), true)
            };
            if same && localized {
                tally.combined.tp += 1;
            } else {
                tally.combined.fp += 1;
                tally.combined.fn_ += 1;
            }
            pred_mols.push(PredMoleculeRaw {
                id: Some(id),
                bbox: pred_box,
                score: (rng.random_range(0.5..=1.0f64) * 1e4).round() / 1e4,
                structure,
            });
        }

        // reactions over disjoint molecule sets
        let [rlo, rhi] = params.reactions_per_page;
        let n_rxn = rng.random_range(rlo..=rhi).min(n_mol / 3);
        let mut pool: Vec<usize> = (0..n_mol).collect();
        pool.shuffle(&mut rng);
        let mut pool = pool.into_iter();
        let mut gt_rxns = Vec::new();
        let mut pred_rxns = Vec::new();
        for _ in 0..n_rxn {
            let n_react = rng.random_range(1..=2usize);
            let n_cond = if n_react == 1 { 1 } else { rng.random_range(0..=1usize) };
            if pool.len() < n_react + n_cond + 1 {
                break;
            }
            let mut take = |n: usize| -> Vec<usize> { (0..n).map(|_| pool.next().expect("length checked")).collect() };
            let reactants = take(n_react);
            let cond_mols = take(n_cond);
            let products = take(1);
            let text = if rng.random_bool(0.5) {
                let cell = cells.next().expect("capacity checked");
                Some(box_in_cell(&mut rng, cell, (100.0, 180.0), (30.0, 60.0)))
            } else {
                None
            };
            let reference = |i: &usize| EntityRaw::Ref(RefRaw {
                reference: gt_mols[*i].id.clone(),
            });
            let inline = |i: &usize| EntityRaw::Inline(InlineRaw {
                kind: EntityKind::Molecule,
                bbox: gt_mols[*i].bbox,
            });
            let text_entity = |b: [f64; 4]| EntityRaw::Inline(InlineRaw {
                kind: EntityKind::Text,
                bbox: b,
            });
            let mut gt_cond: Vec<EntityRaw> = cond_mols.iter().map(reference).collect();
            gt_cond.extend(text.map(text_entity));
            gt_rxns.push(ReactionRaw {
                score: None,
                reactants: reactants.iter().map(reference).collect(),
                conditions: gt_cond,
                products: products.iter().map(reference).collect(),
            });
            tally.reactions.n_gt += 1;

            if rng.random_bool(pert.drop_rate) {
                continue;
            }
            let mut p_react: Vec<EntityRaw> = reactants.iter().map(inline).collect();
            let mut p_cond: Vec<EntityRaw> = cond_mols.iter().map(inline).collect();
            let mut p_text = text.map(text_entity);
            let role_error = rng.random_bool(pert.role_error_rate);
            if role_error {
                if p_text.is_some() && rng.random_bool(0.5) {
                    p_text = None;
                } else if !p_cond.is_empty() {
                    p_react.push(p_cond.remove(0));
                } else {
                    p_cond.push(p_react.pop().expect("two reactants when no condition molecule"));
                }
            } else {
                tally.reactions.hard_matched += 1;
            }
            tally.reactions.soft_matched += 1;
            tally.reactions.n_pred += 1;
            p_cond.extend(p_text);
            pred_rxns.push(ReactionRaw {
                score: Some((rng.random_range(0.3..=1.0f64) * 1e4).round() / 1e4),
                reactants: p_react,
                conditions: p_cond,
                products: products.iter().map(inline).collect(),
            });
        }

        for cell in cells {
            if rng.random_bool(pert.spurious_rate) {
                let mol = random_molecule(&mut rng, params.max_atoms);
                pred_mols.push(PredMoleculeRaw {
                    id: None,
                    bbox: box_in_cell(&mut rng, cell, (60.0, 180.0), (60.0, 180.0)),
                    score: (rng.random_range(0.05..=0.6f64) * 1e4).round() / 1e4,
                    structure: predicted_structure(&mut rng, &mol),
                });
                tally.combined.fp += 1;
            }
        }

        gt_pages.push(GtPageRaw {
            page_id: page_id.clone(),
            width: PAGE_WIDTH,
            height: PAGE_HEIGHT,
            molecules: gt_mols,
            reactions: gt_rxns,
        });
        pred_pages.push(PredPageRaw {
            page_id,
            width: PAGE_WIDTH,
            height: PAGE_HEIGHT,
            molecules: pred_mols,
            reactions: pred_rxns,
        });
    }

    let mean_tanimoto = if tally.pairs == 0 {
        0.0
    } else {
        tally.tanimoto_sum / tally.pairs as f64
    };
    Ok(Fixture {
        ground_truth: FileRaw {
            dataset: params.dataset.clone(),
            pages: gt_pages,
        },
        predictions: FileRaw {
            dataset: params.dataset.clone(),
            pages: pred_pages,
        },
        expected: Expected {
            seed,
            params: params.clone(),
            tau: 0.5,
            combined: tally.combined,
            conversion: ExpectedConversion {
                pairs: tally.pairs,
                matched: tally.matched,
                mean_tanimoto,
            },
            reactions: tally.reactions,
        },
    })
}
