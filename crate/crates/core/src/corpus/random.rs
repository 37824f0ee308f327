//! Random valence-legal molecules for fixtures and property tests.
//!
//! A molecule grows as a tree where each atom has a bond budget equal to its
//! lowest table valence; a few ring closures are added afterwards between
//! atoms with budget left. Some molecules start from a Kekulé aromatic ring
//! template so aromaticity perception is exercised too.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::chem::{Atom, Bond, BondOrder, Element, Molecule};

/// Ring templates as (elements, bond orders around the ring).
const TEMPLATES: &[(&[Element], &[BondOrder])] = {
    use BondOrder::{Double as D, Single as S};
    use Element as E;
    &[
        (&[E::C, E::C, E::C, E::C, E::C, E::C], &[D, S, D, S, D, S]),
        (&[E::N, E::C, E::C, E::C, E::C, E::C], &[D, S, D, S, D, S]),
        (&[E::S, E::C, E::C, E::C, E::C], &[S, D, S, D, S]),
        (&[E::O, E::C, E::C, E::C, E::C], &[S, D, S, D, S]),
        (&[E::N, E::C, E::C, E::C, E::C], &[S, D, S, D, S]),
        (&[E::C, E::C, E::C, E::C, E::C], &[S, S, S, S, S]),
        (&[E::C, E::C, E::C, E::C, E::C, E::N], &[S, S, S, S, S, S]),
    ]
};

const ELEMENTS: &[(Element, u32)] = &[
    (Element::C, 60),
    (Element::N, 12),
    (Element::O, 12),
    (Element::S, 4),
    (Element::F, 4),
    (Element::CL, 4),
    (Element::BR, 2),
    (Element::P, 2),
];

struct Builder {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    budget: Vec<u8>,
}

fn capacity(atom: &Atom) -> u8 {
    atom.element
        .charged_valences(atom.charge)
        .map(|v| v[0])
        .unwrap_or(0)
}

impl Builder {
    fn add_atom(&mut self, atom: Atom) -> usize {
        self.budget.push(capacity(&atom));
        self.atoms.push(atom);
        self.atoms.len() - 1
    }

    fn bonded(&self, a: usize, b: usize) -> bool {
        self.bonds
            .iter()
            .any(|x| (x.a == a && x.b == b) || (x.a == b && x.b == a))
    }

    fn add_bond(&mut self, a: usize, b: usize, order: BondOrder) {
        let v = order.valence();
        self.budget[a] -= v;
        self.budget[b] -= v;
        self.bonds.push(Bond::new(a, b, order));
    }

    fn open_atoms(&self) -> Vec<usize> {
        (0..self.atoms.len()).filter(|&i| self.budget[i] > 0).collect()
    }
}

fn random_atom<R: Rng>(rng: &mut R) -> Atom {
    let element = ELEMENTS
        .choose_weighted(rng, |(_, w)| *w)
        .map(|(e, _)| *e)
        .expect("weights are positive");
    let mut atom = Atom::new(element);
    if element == Element::N && rng.random_bool(0.05) {
        atom.charge = 1;
    } else if element == Element::O && rng.random_bool(0.05) {
        atom.charge = -1;
    } else if element == Element::C && rng.random_bool(0.03) {
        atom.isotope = Some(13);
    }
    atom
}

/// A connected molecule with between 1 and `max_atoms` heavy atoms.
/// Hydrogen counts are left implicit.
pub fn random_molecule<R: Rng>(rng: &mut R, max_atoms: usize) -> Molecule {
    assert!(max_atoms >= 1, "max_atoms must be at least 1");
    let target = rng.random_range(1..=max_atoms);
    let mut b = Builder {
        atoms: Vec::new(),
        bonds: Vec::new(),
        budget: Vec::new(),
    };

    if target >= 6 && rng.random_bool(0.35) {
        let (elements, orders) = TEMPLATES.choose(rng).expect("templates exist");
        let base = b.atoms.len();
        for e in elements.iter() {
            b.add_atom(Atom::new(*e));
        }
        for (i, order) in orders.iter().enumerate() {
            b.add_bond(base + i, base + (i + 1) % elements.len(), *order);
        }
    } else {
        let atom = random_atom(rng);
        b.add_atom(atom);
    }

    while b.atoms.len() < target {
        let open = b.open_atoms();
        let Some(&parent) = open.choose(rng) else {
            break;
        };
        let child = b.add_atom(random_atom(rng));
        if b.budget[child] == 0 {
            // no valence to bond with
            b.atoms.pop();
            b.budget.pop();
            continue;
        }
        let max_order = b.budget[parent].min(b.budget[child]).min(3);
        let roll: f64 = rng.random();
        let order = if max_order >= 3 && roll < 0.04 {
            BondOrder::Triple
        } else if max_order >= 2 && roll < 0.18 {
            BondOrder::Double
        } else {
            BondOrder::Single
        };
        b.add_bond(parent, child, order);
    }

    if b.atoms.len() >= 3 {
        for _ in 0..rng.random_range(0..=2) {
            let open = b.open_atoms();
            if open.len() < 2 {
                break;
            }
            let x = *open.choose(rng).expect("non-empty");
            let y = *open.choose(rng).expect("non-empty");
            if x != y && !b.bonded(x, y) {
                b.add_bond(x, y, BondOrder::Single);
            }
        }
    }
    Molecule::new(b.atoms, b.bonds).expect("builder keeps the molecule well formed")
}

/// Spreads atoms on a jittered grid, coordinates rounded to 4 decimals.
pub fn random_layout<R: Rng>(rng: &mut R, n: usize) -> Vec<[f64; 2]> {
    let round = |v: f64| (v * 1e4).round() / 1e4;
    (0..n)
        .map(|i| {
            let x = (i % 6) as f64 * 1.4 + rng.random_range(-0.3..0.3);
            let y = (i / 6) as f64 * 1.4 + rng.random_range(-0.3..0.3);
            [round(x), round(y)]
        })
        .collect()
}

/// Applies one random constitutional edit: change an element, add or remove
/// a terminal atom, raise a bond order, or move a terminal atom to another
/// attachment point. The result is valence-legal; it may or may not be
/// isomorphic to the input (moving a leaf can land on a symmetric position).
pub fn mutate<R: Rng>(rng: &mut R, mol: &Molecule) -> Molecule {
    let (atoms, bonds) = mol.clone().into_parts();
    let mut b = Builder {
        budget: atoms.iter().map(capacity).collect(),
        atoms,
        bonds: Vec::new(),
    };
    for bond in bonds {
        let v = bond.order.valence();
        b.budget[bond.a] = b.budget[bond.a].saturating_sub(v);
        b.budget[bond.b] = b.budget[bond.b].saturating_sub(v);
        b.bonds.push(bond);
    }
    for _ in 0..64 {
        match rng.random_range(0..5) {
            0 => {
                // change an element to one with enough capacity
                let i = rng.random_range(0..b.atoms.len());
                let used = capacity(&b.atoms[i]) - b.budget[i];
                let mut atom = random_atom(rng);
                atom.charge = 0;
                if atom.element == b.atoms[i].element || capacity(&atom) < used {
                    continue;
                }
                atom.isotope = None;
                b.budget[i] = capacity(&atom) - used;
                b.atoms[i] = atom;
            }
            1 => {
                let open = b.open_atoms();
                let Some(&parent) = open.choose(rng) else {
                    continue;
                };
                let child = b.add_atom(Atom::new(Element::C));
                b.add_bond(parent, child, BondOrder::Single);
            }
            2 => {
                if b.atoms.len() < 2 {
                    continue;
                }
                let leaves: Vec<usize> = (0..b.atoms.len()).filter(|&i| mol_degree(&b, i) == 1).collect();
                let Some(&leaf) = leaves.choose(rng) else {
                    continue;
                };
                return remove_atom(b, leaf);
            }
            3 => {
                let singles: Vec<usize> = (0..b.bonds.len())
                    .filter(|&k| {
                        let x = &b.bonds[k];
                        x.order == BondOrder::Single && b.budget[x.a] > 0 && b.budget[x.b] > 0
                    })
                    .collect();
                let Some(&k) = singles.choose(rng) else {
                    continue;
                };
                let (x, y) = (b.bonds[k].a, b.bonds[k].b);
                b.budget[x] -= 1;
                b.budget[y] -= 1;
                b.bonds[k].order = BondOrder::Double;
            }
            _ => {
                let leaves: Vec<usize> = (0..b.atoms.len())
                    .filter(|&i| mol_degree(&b, i) == 1)
                    .filter(|&i| b.bonds.iter().any(|x| (x.a == i || x.b == i) && x.order == BondOrder::Single))
                    .collect();
                let Some(&leaf) = leaves.choose(rng) else {
                    continue;
                };
                let k = b.bonds.iter().position(|x| x.a == leaf || x.b == leaf).expect("leaf has a bond");
                let old = b.bonds[k].other(leaf);
                let targets: Vec<usize> = b
                    .open_atoms()
                    .into_iter()
                    .filter(|&t| t != leaf && t != old)
                    .collect();
                let Some(&t) = targets.choose(rng) else {
                    continue;
                };
                b.budget[old] += 1;
                b.budget[t] -= 1;
                b.bonds[k] = Bond::new(t, leaf, BondOrder::Single);
            }
        }
        break;
    }
    Molecule::new(b.atoms, b.bonds).expect("edits keep the molecule well formed")
}

fn mol_degree(b: &Builder, atom: usize) -> usize {
    b.bonds.iter().filter(|x| x.a == atom || x.b == atom).count()
}

fn remove_atom(b: Builder, atom: usize) -> Molecule {
    let atoms: Vec<Atom> = b
        .atoms
        .into_iter()
        .enumerate()
        .filter(|(i, _)| *i != atom)
        .map(|(_, a)| a)
        .collect();
    let shift = |i: usize| if i > atom { i - 1 } else { i };
    let bonds = b
        .bonds
        .into_iter()
        .filter(|x| x.a != atom && x.b != atom)
        .map(|x| Bond {
            a: shift(x.a),
            b: shift(x.b),
            ..x
        })
        .collect();
    Molecule::new(atoms, bonds).expect("removing a leaf keeps the molecule well formed")
}
