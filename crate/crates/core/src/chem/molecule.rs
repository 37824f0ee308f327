use std::collections::HashSet;

use super::element::Element;
use super::ChemError;

/// Tetrahedral chirality token carried over from SMILES. Never compared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Chirality {
    /// `@`
    Anticlockwise,
    /// `@@`
    Clockwise,
    /// Any other class token (`@TH1`, `@SP2`, ...), kept verbatim without the leading `@`.
    Class(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub element: Element,
    pub charge: i8,
    /// Mass number, when specified.
    pub isotope: Option<u16>,
    /// Attached hydrogen count; `None` until completed from the valence table.
    pub explicit_h: Option<u8>,
    pub aromatic: bool,
    pub coords: Option<[f64; 3]>,
    pub chirality: Option<Chirality>,
}

impl Atom {
    pub fn new(element: Element) -> Atom {
        Atom {
            element,
            charge: 0,
            isotope: None,
            explicit_h: None,
            aromatic: false,
            coords: None,
            chirality: None,
        }
    }

    pub fn aromatic(element: Element) -> Atom {
        Atom {
            aromatic: true,
            ..Atom::new(element)
        }
    }

    pub fn with_charge(mut self, charge: i8) -> Atom {
        self.charge = charge;
        self
    }

    pub fn with_h(mut self, h: u8) -> Atom {
        self.explicit_h = Some(h);
        self
    }

    pub fn with_isotope(mut self, isotope: u16) -> Atom {
        self.isotope = Some(isotope);
        self
    }

    pub fn with_coords(mut self, x: f64, y: f64) -> Atom {
        self.coords = Some([x, y, 0.0]);
        self
    }

    /// Hydrogen count, treating an unset count as zero.
    pub fn h_count(&self) -> u8 {
        self.explicit_h.unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Stable small-integer code used by canonical invariants and fingerprints.
    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }

    /// Contribution to an atom's valence sum; aromatic bonds count as one.
    pub fn valence(self) -> u8 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }
}

/// Drawing marks on a bond. Preserved through I/O, ignored by every comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BondStereo {
    #[default]
    None,
    Wedge,
    Hash,
    Wavy,
    /// SMILES `/`
    Up,
    /// SMILES `\`
    Down,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
    pub stereo: BondStereo,
}

impl Bond {
    pub fn new(a: usize, b: usize, order: BondOrder) -> Bond {
        Bond {
            a,
            b,
            order,
            stereo: BondStereo::None,
        }
    }

    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

/// An attributed molecular graph. Fields are private so that the
/// construction-time invariants (non-empty, valid and unique bonds) hold for
/// every value in circulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Per atom: `(neighbour, bond index)`.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Molecule {
    pub fn new(atoms: Vec<Atom>, bonds: Vec<Bond>) -> Result<Molecule, ChemError> {
        if atoms.is_empty() {
            return Err(ChemError::InvalidMolecule("molecule has no atoms".into()));
        }
        let mut seen = HashSet::with_capacity(bonds.len());
        let mut adjacency = vec![Vec::new(); atoms.len()];
        for (i, bond) in bonds.iter().enumerate() {
            if bond.a >= atoms.len() || bond.b >= atoms.len() {
                return Err(ChemError::InvalidMolecule(format!(
                    "bond {} references atom outside 0..{}",
                    i + 1,
                    atoms.len()
                )));
            }
            if bond.a == bond.b {
                return Err(ChemError::InvalidMolecule(format!(
                    "bond {} is a self-loop on atom {}",
                    i + 1,
                    bond.a + 1
                )));
            }
            if !seen.insert((bond.a.min(bond.b), bond.a.max(bond.b))) {
                return Err(ChemError::InvalidMolecule(format!(
                    "duplicate bond between atoms {} and {}",
                    bond.a + 1,
                    bond.b + 1
                )));
            }
            adjacency[bond.a].push((bond.b, i));
            adjacency[bond.b].push((bond.a, i));
        }
        Ok(Molecule {
            atoms,
            bonds,
            adjacency,
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    /// `(neighbour, bond index)` pairs of `atom`.
    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<&Bond> {
        self.adjacency[a]
            .iter()
            .find(|(n, _)| *n == b)
            .map(|(_, bi)| &self.bonds[*bi])
    }

    /// Sum of bond valences at `atom` (aromatic bonds count one each).
    pub fn bond_valence(&self, atom: usize) -> u8 {
        self.adjacency[atom]
            .iter()
            .map(|(_, bi)| self.bonds[*bi].order.valence())
            .sum()
    }

    pub fn into_parts(self) -> (Vec<Atom>, Vec<Bond>) {
        (self.atoms, self.bonds)
    }

    /// Relabels atoms so that old atom `i` becomes new atom `perm[i]`.
    /// Bond list order is shuffled along with the indices it references.
    pub fn permuted(&self, perm: &[usize]) -> Molecule {
        assert_eq!(perm.len(), self.atoms.len(), "permutation length");
        let mut atoms = vec![None; self.atoms.len()];
        for (old, atom) in self.atoms.iter().enumerate() {
            atoms[perm[old]] = Some(atom.clone());
        }
        let atoms = atoms
            .into_iter()
            .map(|a| a.expect("perm is a bijection"))
            .collect();
        let mut bonds: Vec<Bond> = self
            .bonds
            .iter()
            .map(|b| Bond {
                a: perm[b.b],
                b: perm[b.a],
                ..b.clone()
            })
            .collect();
        bonds.sort_by_key(|b| (b.a.min(b.b), b.a.max(b.b)));
        Molecule::new(atoms, bonds).expect("relabeling preserves validity")
    }

    /// Connected components as sorted atom index lists, ordered by lowest member.
    pub fn fragments(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.atoms.len()];
        let mut out = Vec::new();
        for start in 0..self.atoms.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(a) = stack.pop() {
                comp.push(a);
                for &(n, _) in &self.adjacency[a] {
                    if !seen[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Induced sub-molecule on `atoms` (indices renumbered in the given order).
    pub fn submolecule(&self, atoms: &[usize]) -> Molecule {
        let mut map = vec![usize::MAX; self.atoms.len()];
        for (new, &old) in atoms.iter().enumerate() {
            map[old] = new;
        }
        let new_atoms = atoms.iter().map(|&i| self.atoms[i].clone()).collect();
        let bonds = self
            .bonds
            .iter()
            .filter(|b| map[b.a] != usize::MAX && map[b.b] != usize::MAX)
            .map(|b| Bond {
                a: map[b.a],
                b: map[b.b],
                ..b.clone()
            })
            .collect();
        Molecule::new(new_atoms, bonds).expect("induced subgraph of a valid molecule")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ethanol() -> Molecule {
        Molecule::new(
            vec![
                Atom::new(Element::C),
                Atom::new(Element::C),
                Atom::new(Element::O),
            ],
            vec![
                Bond::new(0, 1, BondOrder::Single),
                Bond::new(1, 2, BondOrder::Single),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_invalid_graphs() {
        assert!(Molecule::new(vec![], vec![]).is_err());
        let c = || Atom::new(Element::C);
        assert!(Molecule::new(vec![c()], vec![Bond::new(0, 0, BondOrder::Single)]).is_err());
        assert!(Molecule::new(vec![c()], vec![Bond::new(0, 1, BondOrder::Single)]).is_err());
        assert!(Molecule::new(
            vec![c(), c()],
            vec![
                Bond::new(0, 1, BondOrder::Single),
                Bond::new(1, 0, BondOrder::Double)
            ]
        )
        .is_err());
    }

    #[test]
    fn permutation_moves_atoms_and_bonds() {
        let m = ethanol();
        let p = m.permuted(&[2, 0, 1]);
        assert_eq!(p.atoms()[1].element, Element::O);
        assert!(p.bond_between(2, 0).is_some());
        assert!(p.bond_between(0, 1).is_some());
        assert!(p.bond_between(2, 1).is_none());
    }

    #[test]
    fn fragments_split_disconnected_graph() {
        let m = Molecule::new(
            vec![
                Atom::new(Element::C),
                Atom::new(Element::O),
                Atom::new(Element::C),
            ],
            vec![Bond::new(0, 2, BondOrder::Single)],
        )
        .unwrap();
        assert_eq!(m.fragments(), vec![vec![0, 2], vec![1]]);
        assert_eq!(m.submolecule(&[1]).atom_count(), 1);
    }
}
