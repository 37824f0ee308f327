//! Exact constitutional isomorphism by backtracking. Shares no code with the
//! canonicalizer so it can serve as its cross-check.

use super::molecule::Molecule;
use super::normalize::NormalizedMolecule;
use super::ChemError;

pub const MAX_ORACLE_ATOMS: usize = 64;

type AtomLabel = (u8, i8, u16, bool, u8);

fn label(mol: &Molecule, atom: usize) -> AtomLabel {
    let a = &mol.atoms()[atom];
    (
        a.element.atomic_number(),
        a.charge,
        a.isotope.unwrap_or(0),
        a.aromatic,
        a.h_count(),
    )
}

/// Label plus sorted `(neighbour label, bond order)` list: a cheap necessary
/// condition for two atoms to correspond.
fn signature(mol: &Molecule, atom: usize) -> (AtomLabel, Vec<(AtomLabel, u8)>) {
    let mut env: Vec<(AtomLabel, u8)> = mol
        .neighbors(atom)
        .iter()
        .map(|&(n, bi)| (label(mol, n), mol.bonds()[bi].order.code()))
        .collect();
    env.sort_unstable();
    (label(mol, atom), env)
}

/// `true` iff an atom bijection preserves element, charge, isotope, aromatic
/// flag, hydrogen count and every bond with its order.
pub fn isomorphic(a: &NormalizedMolecule, b: &NormalizedMolecule) -> Result<bool, ChemError> {
    for m in [a, b] {
        if m.atom_count() > MAX_ORACLE_ATOMS {
            return Err(ChemError::OracleCapacity {
                atoms: m.atom_count(),
                limit: MAX_ORACLE_ATOMS,
            });
        }
    }
    let (a, b) = (a.molecule(), b.molecule());
    if a.atom_count() != b.atom_count() || a.bond_count() != b.bond_count() {
        return Ok(false);
    }
    let sig_a: Vec<_> = (0..a.atom_count()).map(|i| signature(a, i)).collect();
    let sig_b: Vec<_> = (0..b.atom_count()).map(|i| signature(b, i)).collect();
    let mut sorted_a = sig_a.clone();
    let mut sorted_b = sig_b.clone();
    sorted_a.sort();
    sorted_b.sort();
    if sorted_a != sorted_b {
        return Ok(false);
    }

    // visit order: BFS per component so each atom after a component's first
    // has an already-mapped neighbour
    let n = a.atom_count();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut head = order.len();
        order.push(start);
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &(w, _) in a.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
        }
    }

    let mut state = State {
        a,
        b,
        sig_a: &sig_a,
        sig_b: &sig_b,
        map_ab: vec![usize::MAX; n],
        map_ba: vec![usize::MAX; n],
    };
    Ok(state.extend(&order, 0))
}

struct State<'a> {
    a: &'a Molecule,
    b: &'a Molecule,
    sig_a: &'a [(AtomLabel, Vec<(AtomLabel, u8)>)],
    sig_b: &'a [(AtomLabel, Vec<(AtomLabel, u8)>)],
    map_ab: Vec<usize>,
    map_ba: Vec<usize>,
}

impl State<'_> {
    fn extend(&mut self, order: &[usize], depth: usize) -> bool {
        let Some(&va) = order.get(depth) else {
            return true;
        };
        // candidates: neighbours of an already-mapped neighbour's image, or all atoms
        let anchor = self
            .a
            .neighbors(va)
            .iter()
            .find(|(n, _)| self.map_ab[*n] != usize::MAX)
            .map(|(n, _)| self.map_ab[*n]);
        let candidates: Vec<usize> = match anchor {
            Some(img) => self.b.neighbors(img).iter().map(|(n, _)| *n).collect(),
            None => (0..self.b.atom_count()).collect(),
        };
        for vb in candidates {
            if self.map_ba[vb] != usize::MAX || self.sig_a[va] != self.sig_b[vb] {
                continue;
            }
            if !self.consistent(va, vb) {
                continue;
            }
            self.map_ab[va] = vb;
            self.map_ba[vb] = va;
            if self.extend(order, depth + 1) {
                return true;
            }
            self.map_ab[va] = usize::MAX;
            self.map_ba[vb] = usize::MAX;
        }
        false
    }

    /// Every bond from `va` to a mapped atom must exist, with the same order,
    /// between `vb` and the image, and `vb` must have no extra mapped neighbours.
    fn consistent(&self, va: usize, vb: usize) -> bool {
        let mut mapped_a = 0;
        for &(na, bi) in self.a.neighbors(va) {
            let nb = self.map_ab[na];
            if nb == usize::MAX {
                continue;
            }
            mapped_a += 1;
            match self.b.bond_between(vb, nb) {
                Some(bond) if bond.order == self.a.bonds()[bi].order => {}
                _ => return false,
            }
        }
        let mapped_b = self
            .b
            .neighbors(vb)
            .iter()
            .filter(|(nb, _)| self.map_ba[*nb] != usize::MAX)
            .count();
        mapped_a == mapped_b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::normalize::normalize;
    use crate::io::smiles::parse_smiles;

    fn n(s: &str) -> NormalizedMolecule {
        normalize(&parse_smiles(s).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        assert!(isomorphic(&n("CCO"), &n("OCC")).unwrap());
        assert!(!isomorphic(&n("CCO"), &n("COC")).unwrap());
        assert!(!isomorphic(&n("C"), &n("N")).unwrap());
        assert!(isomorphic(&n("c1ccccc1O"), &n("Oc1ccccc1")).unwrap());
        assert!(!isomorphic(&n("C1CCCCC1"), &n("C1CC1.C1CC1")).unwrap());
    }

    #[test]
    fn bond_order_matters() {
        assert!(!isomorphic(&n("C=CCC"), &n("CC=CC")).unwrap());
    }

    #[test]
    fn capacity_limit() {
        let big = "C".repeat(65);
        let err = isomorphic(&n(&big), &n(&big)).unwrap_err();
        assert!(matches!(err, ChemError::OracleCapacity { atoms: 65, .. }));
    }
}
