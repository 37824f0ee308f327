//! Hydrogen completion, explicit-hydrogen folding and aromaticity perception.
//!
//! Aromaticity model: a ring of 5 to 7 atoms is aromatic when every ring atom
//! is sp2-capable and the ring's pi-electron count is 4n+2, using the per-atom
//! contributions below. Rings are re-evaluated in synchronous rounds (every
//! ring is judged against the state at the start of the round) until no new
//! ring qualifies, which makes the result independent of atom order.
//!
//! | atom state                                     | electrons |
//! |------------------------------------------------|-----------|
//! | double bond inside the ring                    | 1         |
//! | carbon with an exocyclic double bond           | 0         |
//! | aromatic C / C- / C+                           | 1 / 2 / 0 |
//! | N, P, As: 3 connections (neutral) / 2 (neutral) | 2 / 1     |
//! | N+, P+ with 3 connections                      | 1         |
//! | N-, P- with 2 connections                      | 2         |
//! | O, S, Se, Te: 2 connections (neutral) / cation | 2 / 1     |
//! | B with 3 connections                           | 0         |
//! | saturated C- with 3 connections                | 2         |
//! | saturated C+ with 3 connections                | 0         |
//!
//! Anything else (sp3 centres, triple bonds, cumulated double bonds) is not
//! sp2-capable. Aromatic bonds already present in the input are kept.

use std::ops::Deref;

use super::element::Element;
use super::molecule::{Atom, Bond, BondOrder, Molecule};
use super::rings::{ring_bonds, simple_cycles};
use super::ChemError;

/// A molecule that has passed through [`normalize`]: every atom has a
/// hydrogen count and aromaticity has been perceived.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMolecule {
    mol: Molecule,
    origin: Vec<usize>,
}

impl NormalizedMolecule {
    pub fn molecule(&self) -> &Molecule {
        &self.mol
    }

    pub fn into_molecule(self) -> Molecule {
        self.mol
    }

    /// Index of each normalized atom in the molecule given to [`normalize`].
    /// Folded hydrogen atoms have no entry.
    pub fn origin(&self) -> &[usize] {
        &self.origin
    }
}

impl Deref for NormalizedMolecule {
    type Target = Molecule;

    fn deref(&self) -> &Molecule {
        &self.mol
    }
}

pub fn normalize(mol: &Molecule) -> Result<NormalizedMolecule, ChemError> {
    let (mut atoms, mut bonds) = mol.clone().into_parts();

    // aromatic bonds outside rings cannot be aromatic
    let in_ring = ring_bonds(mol);
    for (bond, ring) in bonds.iter_mut().zip(&in_ring) {
        if bond.order == BondOrder::Aromatic && !ring {
            bond.order = BondOrder::Single;
        }
    }
    sync_aromatic_flags(&mut atoms, &bonds);
    let work = Molecule::new(atoms, bonds)?;

    let mut h_counts = Vec::with_capacity(work.atom_count());
    for i in 0..work.atom_count() {
        let atom = &work.atoms()[i];
        let h = match atom.explicit_h {
            Some(h) => h,
            None => implicit_hydrogens(&work, i)?,
        };
        check_valence(&work, i, h)?;
        h_counts.push(h);
    }
    let (mut atoms, bonds) = work.into_parts();
    for (atom, h) in atoms.iter_mut().zip(h_counts) {
        atom.explicit_h = Some(h);
    }

    let (atoms, bonds, origin) = fold_hydrogens(atoms, bonds);
    let mol = perceive_aromaticity(Molecule::new(atoms, bonds)?);
    Ok(NormalizedMolecule { mol, origin })
}

fn sync_aromatic_flags(atoms: &mut [Atom], bonds: &[Bond]) {
    for atom in atoms.iter_mut() {
        atom.aromatic = false;
    }
    for bond in bonds {
        if bond.order == BondOrder::Aromatic {
            atoms[bond.a].aromatic = true;
            atoms[bond.b].aromatic = true;
        }
    }
}

fn has_aromatic_bond(mol: &Molecule, atom: usize) -> bool {
    mol.neighbors(atom)
        .iter()
        .any(|(_, bi)| mol.bonds()[*bi].order == BondOrder::Aromatic)
}

/// Hydrogen count implied by the valence table for an atom without an
/// explicit count. Aromatic atoms reserve one valence for the pi system and
/// only use their lowest valence.
pub fn implicit_hydrogens(mol: &Molecule, atom: usize) -> Result<u8, ChemError> {
    let a = &mol.atoms()[atom];
    let Some(valences) = a.element.charged_valences(a.charge) else {
        return Ok(0);
    };
    let used = mol.bond_valence(atom);
    if has_aromatic_bond(mol, atom) {
        return Ok(valences[0].saturating_sub(used + 1));
    }
    match valences.iter().find(|v| **v >= used) {
        Some(v) => Ok(v - used),
        None => Err(valence_error(mol, atom, used)),
    }
}

fn check_valence(mol: &Molecule, atom: usize, h: u8) -> Result<(), ChemError> {
    let a = &mol.atoms()[atom];
    let Some(valences) = a.element.charged_valences(a.charge) else {
        return Ok(());
    };
    let total = mol.bond_valence(atom) + h;
    if total > *valences.last().expect("valence lists are non-empty") {
        return Err(valence_error(mol, atom, total));
    }
    Ok(())
}

fn valence_error(mol: &Molecule, atom: usize, valence: u8) -> ChemError {
    let a = &mol.atoms()[atom];
    ChemError::Valence {
        atom: atom + 1,
        element: a.element.symbol().to_string(),
        charge: a.charge,
        valence,
    }
}

/// Removes plain hydrogen atoms (neutral, no isotope, one single bond to a
/// heavy atom) and adds them to their neighbour's hydrogen count.
fn fold_hydrogens(mut atoms: Vec<Atom>, bonds: Vec<Bond>) -> (Vec<Atom>, Vec<Bond>, Vec<usize>) {
    let mut degree = vec![0usize; atoms.len()];
    for b in &bonds {
        degree[b.a] += 1;
        degree[b.b] += 1;
    }
    let mut removed = vec![false; atoms.len()];
    for b in &bonds {
        if b.order != BondOrder::Single {
            continue;
        }
        for (h, heavy) in [(b.a, b.b), (b.b, b.a)] {
            let ha = &atoms[h];
            if ha.element == Element::H
                && ha.charge == 0
                && ha.isotope.is_none()
                && ha.h_count() == 0
                && degree[h] == 1
                && atoms[heavy].element != Element::H
            {
                removed[h] = true;
            }
        }
    }
    if !removed.iter().any(|r| *r) {
        let origin = (0..atoms.len()).collect();
        return (atoms, bonds, origin);
    }
    for b in &bonds {
        if removed[b.a] {
            let h = atoms[b.b].h_count() + 1;
            atoms[b.b].explicit_h = Some(h);
        } else if removed[b.b] {
            let h = atoms[b.a].h_count() + 1;
            atoms[b.a].explicit_h = Some(h);
        }
    }
    let mut map = vec![usize::MAX; atoms.len()];
    let mut origin = Vec::new();
    let mut kept = Vec::new();
    for (i, atom) in atoms.into_iter().enumerate() {
        if !removed[i] {
            map[i] = kept.len();
            origin.push(i);
            kept.push(atom);
        }
    }
    let bonds = bonds
        .into_iter()
        .filter(|b| !removed[b.a] && !removed[b.b])
        .map(|b| Bond {
            a: map[b.a],
            b: map[b.b],
            ..b
        })
        .collect();
    (kept, bonds, origin)
}

fn perceive_aromaticity(mol: Molecule) -> Molecule {
    let cycles = simple_cycles(&mol, 5, 7);
    if cycles.is_empty() {
        return mol;
    }
    let mut mol = mol;
    loop {
        let newly: Vec<usize> = cycles
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                c.bonds
                    .iter()
                    .any(|bi| mol.bonds()[*bi].order != BondOrder::Aromatic)
            })
            .filter(|(_, c)| ring_is_aromatic(&mol, &c.atoms, &c.bonds))
            .map(|(i, _)| i)
            .collect();
        if newly.is_empty() {
            return mol;
        }
        let (mut atoms, mut bonds) = mol.into_parts();
        for ci in newly {
            for &bi in &cycles[ci].bonds {
                bonds[bi].order = BondOrder::Aromatic;
            }
        }
        sync_aromatic_flags(&mut atoms, &bonds);
        mol = Molecule::new(atoms, bonds).expect("bond orders changed only");
    }
}

fn ring_is_aromatic(mol: &Molecule, ring_atoms: &[usize], ring_bonds: &[usize]) -> bool {
    let mut electrons = 0u32;
    for &atom in ring_atoms {
        match pi_electrons(mol, atom, ring_bonds) {
            Some(e) => electrons += u32::from(e),
            None => return false,
        }
    }
    electrons % 4 == 2
}

/// Pi electrons contributed by `atom` to the ring made of `ring_bonds`, or
/// `None` when the atom is not sp2-capable.
fn pi_electrons(mol: &Molecule, atom: usize, ring_bonds: &[usize]) -> Option<u8> {
    let a = &mol.atoms()[atom];
    let connections = mol.degree(atom) + usize::from(a.h_count());
    let mut ring_double = 0;
    let mut exo_double = 0;
    let mut aromatic = false;
    for &(_, bi) in mol.neighbors(atom) {
        match mol.bonds()[bi].order {
            BondOrder::Triple => return None,
            BondOrder::Double if ring_bonds.contains(&bi) => ring_double += 1,
            BondOrder::Double => exo_double += 1,
            BondOrder::Aromatic => aromatic = true,
            BondOrder::Single => {}
        }
    }
    if ring_double + exo_double > 1 {
        return None;
    }
    if ring_double == 1 {
        return Some(1);
    }
    if exo_double == 1 {
        return (a.element == Element::C && a.charge == 0).then_some(0);
    }
    let z = a.element;
    let pnictogen = matches!(z, Element::N | Element::P | Element::AS);
    let chalcogen = matches!(z, Element::O | Element::S | Element::SE | Element::TE);
    match (a.charge, connections) {
        _ if z == Element::C && aromatic => match a.charge {
            0 => Some(1),
            -1 => Some(2),
            1 => Some(0),
            _ => None,
        },
        (-1, 3) if z == Element::C => Some(2),
        (1, 3) if z == Element::C => Some(0),
        (0, 3) if pnictogen => Some(2),
        (0, 2) if pnictogen && aromatic => Some(1),
        (1, 3) if pnictogen && aromatic => Some(1),
        (-1, 2) if pnictogen => Some(2),
        (0, 2) if chalcogen => Some(2),
        (1, 2) | (1, 3) if chalcogen && aromatic => Some(1),
        (0, 3) if z == Element::B => Some(0),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::smiles::parse_smiles;

    fn norm(s: &str) -> NormalizedMolecule {
        normalize(&parse_smiles(s).unwrap()).unwrap()
    }

    fn aromatic_bonds(m: &Molecule) -> usize {
        m.bonds()
            .iter()
            .filter(|b| b.order == BondOrder::Aromatic)
            .count()
    }

    #[test]
    fn methane_gets_four_hydrogens() {
        assert_eq!(norm("C").atoms()[0].explicit_h, Some(4));
    }

    #[test]
    fn kekule_benzene_becomes_aromatic() {
        let m = norm("C1=CC=CC=C1");
        assert_eq!(aromatic_bonds(&m), 6);
        assert!(m.atoms().iter().all(|a| a.aromatic && a.explicit_h == Some(1)));
    }

    #[test]
    fn heteroaromatics_and_non_aromatics() {
        assert_eq!(aromatic_bonds(&norm("C1=CC=NC=C1")), 6); // pyridine
        assert_eq!(aromatic_bonds(&norm("C1=CNC=C1")), 5); // pyrrole
        assert_eq!(aromatic_bonds(&norm("C1=COC=C1")), 5); // furan
        assert_eq!(aromatic_bonds(&norm("C1=CSC=C1")), 5); // thiophene
        assert_eq!(aromatic_bonds(&norm("O=C1C=CC=CN1")), 6); // 2-pyridone
        assert_eq!(aromatic_bonds(&norm("C1=CC=CC1")), 0); // cyclopentadiene
        assert_eq!(aromatic_bonds(&norm("C1=CC=C1")), 0); // 4-ring
        assert_eq!(aromatic_bonds(&norm("C1=CC=CC=CC=C1")), 0); // 8-ring
        assert_eq!(aromatic_bonds(&norm("C=C1C=CC=C1")), 0); // fulvene
        assert_eq!(aromatic_bonds(&norm("C1CCCCC1")), 0);
    }

    #[test]
    fn fused_kekule_forms_agree() {
        // both Kekule structures of naphthalene
        let a = norm("C1=CC=C2C=CC=CC2=C1");
        let b = norm("C1=CC2=CC=CC=C2C=C1");
        assert_eq!(aromatic_bonds(&a), 11);
        assert_eq!(aromatic_bonds(&b), 11);
        // quinoline
        assert_eq!(aromatic_bonds(&norm("C1=CC=C2N=CC=CC2=C1")), 11);
    }

    #[test]
    fn aromatic_input_hydrogens() {
        let m = norm("c1ccc2[nH]ccc2c1");
        let h: u32 = m.atoms().iter().map(|a| u32::from(a.h_count())).sum();
        assert_eq!(h, 7); // indole C8H7N
        let thiophene = norm("c1ccsc1");
        assert_eq!(thiophene.atoms()[3].explicit_h, Some(0));
    }

    #[test]
    fn non_ring_aromatic_bonds_are_demoted() {
        let m = norm("cc");
        assert_eq!(aromatic_bonds(&m), 0);
        assert!(m.atoms().iter().all(|a| !a.aromatic && a.explicit_h == Some(3)));
    }

    #[test]
    fn charged_valences() {
        assert_eq!(norm("C[N+](C)(C)C").atoms()[1].explicit_h, Some(0));
        assert_eq!(norm("[NH4+]").atoms()[0].explicit_h, Some(4));
        assert_eq!(norm("CS(=O)(=O)C").atoms()[1].explicit_h, Some(0));
        assert_eq!(norm("CP(C)C").atoms()[1].explicit_h, Some(0));
    }

    #[test]
    fn valence_violation_names_atom() {
        let err = normalize(&parse_smiles("CC(C)(C)(C)C").unwrap()).unwrap_err();
        match err {
            ChemError::Valence { atom, element, .. } => {
                assert_eq!(atom, 2);
                assert_eq!(element, "C");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(normalize(&parse_smiles("C[CH4]").unwrap()).is_err());
        assert!(normalize(&parse_smiles("O=O=O").unwrap()).is_err());
    }

    #[test]
    fn explicit_hydrogens_are_folded() {
        let m = norm("[H]C([H])([H])[H]");
        assert_eq!(m.atom_count(), 1);
        assert_eq!(m.atoms()[0].explicit_h, Some(4));
        assert_eq!(m.origin(), &[1]);
        // deuterium and H2 stay
        assert_eq!(norm("[2H]C").atom_count(), 2);
        assert_eq!(norm("[H][H]").atom_count(), 2);
    }

    #[test]
    fn normalize_is_idempotent_on_examples() {
        for s in [
            "C1=CC=CC=C1",
            "O=C1C=CC=CN1",
            "C1=CC=C2C=CC=CC2=C1",
            "[H]OC",
            "cc",
            "C[N+](=O)[O-]",
        ] {
            let once = norm(s);
            let twice = normalize(&once).unwrap();
            assert_eq!(once.molecule(), twice.molecule(), "{s}");
        }
    }
}
