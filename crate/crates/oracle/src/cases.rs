//! Seeded random inputs for comparing production metrics with the oracles.

use chemeval_core::chem::{key_of, CanonicalKey};
use chemeval_core::combined::{CombinedPage, GtMolecule, PredMolecule};
use chemeval_core::detection::{BBox, PageDetections, ScoredBox};
use chemeval_core::io::parse_smiles;
use chemeval_core::reaction::{EntityKind, Reaction, Role, RxnEntity};
use rand::seq::IndexedRandom;
use rand::Rng;

/// Canonical keys of three small molecules.
pub fn keys() -> Vec<CanonicalKey> {
    ["CCO", "c1ccccc1", "CC(=O)O"]
        .iter()
        .map(|s| key_of(&parse_smiles(s).unwrap()).unwrap())
        .collect()
}

pub fn random_box<R: Rng>(rng: &mut R, span: f64) -> BBox {
    let x = rng.random_range(0.0..span);
    let y = rng.random_range(0.0..span);
    BBox::new(x, y, x + rng.random_range(8.0..30.0), y + rng.random_range(8.0..30.0)).unwrap()
}

pub fn near<R: Rng>(rng: &mut R, b: &BBox, wobble: f64) -> BBox {
    let mut d = || rng.random_range(-wobble..wobble);
    let x1 = b.x1() + d();
    let y1 = b.y1() + d();
    let x2 = (b.x2() + d()).max(x1 + 1.0);
    let y2 = (b.y2() + d()).max(y1 + 1.0);
    BBox::new(x1.max(0.0), y1.max(0.0), x2.max(1.0), y2.max(1.0)).unwrap()
}

pub fn random_page<R: Rng>(rng: &mut R, pool: &[CanonicalKey]) -> CombinedPage {
    let n_gt = rng.random_range(0..=8);
    let gt: Vec<GtMolecule> = (0..n_gt)
        .map(|_| GtMolecule {
            bbox: random_box(rng, 60.0),
            key: pool.choose(rng).unwrap().clone(),
        })
        .collect();
    let n_pred = rng.random_range(0..=8);
    let pred = (0..n_pred)
        .map(|_| {
            let (bbox, likely) = match gt.choose(rng) {
                Some(g) if rng.random_bool(0.7) => (near(rng, &g.bbox, 6.0), Some(&g.key)),
                _ => (random_box(rng, 60.0), None),
            };
            let key = match likely {
                _ if rng.random_bool(0.15) => None,
                Some(k) if rng.random_bool(0.6) => Some(k.clone()),
                _ => Some(pool.choose(rng).unwrap().clone()),
            };
            PredMolecule {
                bbox: ScoredBox::new(bbox, rng.random_range(0.0..=1.0)).unwrap(),
                key,
            }
        })
        .collect();
    CombinedPage { gt, pred }
}

pub fn random_corpus<R: Rng>(rng: &mut R) -> Vec<PageDetections> {
    let scores = [0.2, 0.5, 0.5, 0.7, 0.9, 0.9, 1.0];
    (0..rng.random_range(1..=5))
        .map(|_| {
            let gts: Vec<BBox> = (0..rng.random_range(0..=10)).map(|_| random_box(rng, 80.0)).collect();
            let preds = (0..rng.random_range(0..=10))
                .map(|_| {
                    let bbox = match gts.choose(rng) {
                        Some(g) if rng.random_bool(0.75) => near(rng, g, 5.0),
                        _ => random_box(rng, 80.0),
                    };
                    ScoredBox::new(bbox, *scores.choose(rng).unwrap()).unwrap()
                })
                .collect();
            PageDetections { preds, gts }
        })
        .collect()
}

/// Boxes in small clusters so entities often overlap more than one candidate.
pub fn entity_pool<R: Rng>(rng: &mut R) -> Vec<BBox> {
    let mut pool = Vec::new();
    for c in 0..4 {
        let base = BBox::new(40.0 * c as f64, 0.0, 40.0 * c as f64 + 20.0, 20.0).unwrap();
        pool.push(base);
        for _ in 0..2 {
            pool.push(near(rng, &base, 4.0));
        }
    }
    pool
}

pub fn random_reaction<R: Rng>(rng: &mut R, pool: &[BBox]) -> Reaction {
    loop {
        let n = rng.random_range(2..=6);
        let entities: Vec<RxnEntity> = (0..n)
            .map(|i| {
                let role = match i {
                    0 => Role::Reactant,
                    1 => Role::Product,
                    _ => *[Role::Reactant, Role::Condition, Role::Product].choose(rng).unwrap(),
                };
                let kind = if role == Role::Condition && rng.random_bool(0.3) {
                    EntityKind::Text
                } else {
                    EntityKind::Molecule
                };
                RxnEntity { role, kind, bbox: *pool.choose(rng).unwrap() }
            })
            .collect();
        if let Ok(r) = Reaction::new(entities) {
            return r;
        }
    }
}

pub fn perturb<R: Rng>(rng: &mut R, r: &Reaction, pool: &[BBox]) -> Reaction {
    loop {
        let mut entities = r.entities().to_vec();
        for _ in 0..rng.random_range(0..=2) {
            let i = rng.random_range(0..entities.len());
            match rng.random_range(0..4) {
                0 => {
                    if entities[i].kind == EntityKind::Molecule {
                        entities[i].role = *[Role::Reactant, Role::Condition].choose(rng).unwrap();
                    }
                }
                1 => entities[i].bbox = *pool.choose(rng).unwrap(),
                2 => {
                    if entities.len() > 2 {
                        entities.remove(i);
                    }
                }
                _ => {
                    if entities.len() < 6 {
                        entities.push(RxnEntity {
                            role: Role::Condition,
                            kind: EntityKind::Text,
                            bbox: *pool.choose(rng).unwrap(),
                        });
                    }
                }
            }
        }
        if let Ok(p) = Reaction::new(entities) {
            return p;
        }
    }
}
