//! Canonical labeling and the canonical SMILES serializer.
//!
//! Atoms start from an invariant ranking (degree, element, isotope, charge,
//! hydrogen count, aromatic flag) which is refined by sorting on neighbour
//! rank multisets until stable. When ties remain, the lowest tied cell is
//! split by individualizing one of its atoms and refining again. Every atom of
//! that cell is tried and the labeling with the smallest graph certificate is
//! kept, so the result does not depend on which atom happens to come first.
//! Automorphisms discovered between equal leaves prune symmetric branches.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::molecule::{BondOrder, Molecule};
use super::normalize::{implicit_hydrogens, NormalizedMolecule};

/// Canonical SMILES of a normalized molecule. Equal keys mean the two
/// molecules have the same constitution (stereo marks and coordinates are
/// ignored).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalKey(String);

impl CanonicalKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn canonical_key(mol: &NormalizedMolecule) -> CanonicalKey {
    CanonicalKey(canonical_smiles(mol).0)
}

/// Atom indices in the order the canonical SMILES writes them. Two molecules
/// with equal keys are put in correspondence by pairing equal positions.
pub fn canonical_order(mol: &NormalizedMolecule) -> Vec<usize> {
    canonical_smiles(mol).1
}

fn canonical_smiles(mol: &Molecule) -> (String, Vec<usize>) {
    let mut parts: Vec<(String, Vec<usize>)> = mol
        .fragments()
        .into_iter()
        .map(|frag| {
            let sub = mol.submolecule(&frag);
            let ranks = canonical_labeling(&sub);
            let (text, order) = write_fragment(&sub, &ranks);
            (text, order.into_iter().map(|i| frag[i]).collect())
        })
        .collect();
    parts.sort_by(|a, b| a.0.cmp(&b.0));
    let text = parts
        .iter()
        .map(|(t, _)| t.as_str())
        .collect::<Vec<_>>()
        .join(".");
    let order = parts.into_iter().flat_map(|(_, o)| o).collect();
    (text, order)
}

type Label = [i64; 6];

fn atom_label(mol: &Molecule, atom: usize) -> Label {
    let a = &mol.atoms()[atom];
    [
        mol.degree(atom) as i64,
        i64::from(a.element.atomic_number()),
        i64::from(a.isotope.unwrap_or(0)),
        i64::from(a.charge),
        i64::from(a.h_count()),
        i64::from(a.aromatic),
    ]
}

/// Assigns each atom a rank equal to the number of atoms sorting strictly
/// before it, so tied atoms share the position of their cell's first member.
fn rank_by<K: Ord>(keys: &[K]) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|a, b| keys[*a].cmp(&keys[*b]));
    let mut ranks = vec![0u32; keys.len()];
    for (pos, &i) in idx.iter().enumerate() {
        ranks[i] = if pos > 0 && keys[idx[pos - 1]] == keys[i] {
            ranks[idx[pos - 1]]
        } else {
            pos as u32
        };
    }
    ranks
}

fn cell_count(ranks: &[u32]) -> usize {
    let mut r = ranks.to_vec();
    r.sort_unstable();
    r.dedup();
    r.len()
}

fn refine(mol: &Molecule, ranks: &mut Vec<u32>) {
    let mut cells = cell_count(ranks);
    while cells < ranks.len() {
        let keys: Vec<(u32, Vec<(u32, u8)>)> = (0..mol.atom_count())
            .map(|a| {
                let mut env: Vec<(u32, u8)> = mol
                    .neighbors(a)
                    .iter()
                    .map(|&(n, bi)| (ranks[n], mol.bonds()[bi].order.code()))
                    .collect();
                env.sort_unstable();
                (ranks[a], env)
            })
            .collect();
        let next = rank_by(&keys);
        let next_cells = cell_count(&next);
        *ranks = next;
        if next_cells == cells {
            break;
        }
        cells = next_cells;
    }
}

fn certificate(mol: &Molecule, labels: &[Label], ranks: &[u32]) -> Vec<i64> {
    let n = mol.atom_count();
    let mut by_rank = vec![0usize; n];
    for (atom, &r) in ranks.iter().enumerate() {
        by_rank[r as usize] = atom;
    }
    let mut cert = Vec::with_capacity(n * 6 + mol.bond_count() * 3);
    for &atom in &by_rank {
        cert.extend_from_slice(&labels[atom]);
    }
    let mut edges: Vec<[i64; 3]> = mol
        .bonds()
        .iter()
        .map(|b| {
            let (x, y) = (ranks[b.a], ranks[b.b]);
            [
                i64::from(x.min(y)),
                i64::from(x.max(y)),
                i64::from(b.order.code()),
            ]
        })
        .collect();
    edges.sort_unstable();
    cert.extend(edges.into_iter().flatten());
    cert
}

struct Leaf {
    cert: Vec<i64>,
    ranks: Vec<u32>,
}

struct Search<'a> {
    mol: &'a Molecule,
    labels: Vec<Label>,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn visit(&mut self, mut ranks: Vec<u32>, prefix: &mut Vec<usize>) {
        refine(self.mol, &mut ranks);
        let n = ranks.len();
        let mut counts = vec![0usize; n];
        for &r in &ranks {
            counts[r as usize] += 1;
        }
        let Some(target) = (0..n).find(|&r| counts[r] > 1) else {
            self.leaf(ranks);
            return;
        };
        let cell: Vec<usize> = (0..n).filter(|&a| ranks[a] as usize == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for v in cell {
            if !explored.is_empty() {
                let orbits = self.orbits_fixing(prefix);
                if explored.iter().any(|&w| orbits.same(w, v)) {
                    continue;
                }
            }
            explored.push(v);
            let mut child = ranks.clone();
            for (a, r) in child.iter_mut().enumerate() {
                if *r as usize == target && a != v {
                    *r += 1;
                }
            }
            prefix.push(v);
            self.visit(child, prefix);
            prefix.pop();
        }
    }

    fn leaf(&mut self, ranks: Vec<u32>) {
        let cert = certificate(self.mol, &self.labels, &ranks);
        for reference in [&self.first, &self.best].into_iter().flatten() {
            if reference.cert == cert {
                let mut by_rank = vec![0usize; ranks.len()];
                for (atom, &r) in ranks.iter().enumerate() {
                    by_rank[r as usize] = atom;
                }
                let gamma: Vec<usize> = reference
                    .ranks
                    .iter()
                    .map(|&r| by_rank[r as usize])
                    .collect();
                if gamma.iter().enumerate().any(|(i, &g)| i != g) {
                    self.generators.push(gamma);
                }
                break;
            }
        }
        if self.first.is_none() {
            self.first = Some(Leaf {
                cert: cert.clone(),
                ranks: ranks.clone(),
            });
        }
        if self.best.as_ref().is_none_or(|b| cert < b.cert) {
            self.best = Some(Leaf { cert, ranks });
        }
    }

    fn orbits_fixing(&self, fixed: &[usize]) -> UnionFind {
        let mut uf = UnionFind::new(self.mol.atom_count());
        for g in &self.generators {
            if fixed.iter().all(|&x| g[x] == x) {
                for (x, &y) in g.iter().enumerate() {
                    uf.union(x, y);
                }
            }
        }
        uf
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn same(&self, a: usize, b: usize) -> bool {
        let mut uf = UnionFind(self.0.clone());
        uf.find(a) == uf.find(b)
    }
}

/// Discrete canonical ranks (a permutation of `0..n`) for a connected molecule.
fn canonical_labeling(mol: &Molecule) -> Vec<u32> {
    let labels: Vec<Label> = (0..mol.atom_count()).map(|a| atom_label(mol, a)).collect();
    let initial = rank_by(&labels);
    let mut search = Search {
        mol,
        labels,
        first: None,
        best: None,
        generators: Vec::new(),
    };
    search.visit(initial, &mut Vec::new());
    search.best.expect("search reaches at least one leaf").ranks
}

struct Writer<'a> {
    mol: &'a Molecule,
    ranks: &'a [u32],
    visited: Vec<bool>,
    children: Vec<Vec<usize>>,
    /// Per atom: ring-closure partners, as `(partner, bond index)`.
    closures: Vec<Vec<(usize, usize)>>,
    lowercase: Vec<bool>,
}

impl Writer<'_> {
    fn build_tree(&mut self, v: usize, parent: Option<usize>) {
        self.visited[v] = true;
        let mut nbrs: Vec<(usize, usize)> = self.mol.neighbors(v).to_vec();
        nbrs.sort_by_key(|&(n, _)| self.ranks[n]);
        for (n, bi) in nbrs {
            if Some(n) == parent {
                continue;
            }
            if !self.visited[n] {
                self.children[v].push(n);
                self.build_tree(n, Some(v));
            } else if !self.closures[v].iter().any(|&(_, b)| b == bi) {
                self.closures[v].push((n, bi));
                self.closures[n].push((v, bi));
            }
        }
    }

    fn bond_symbol(&self, bond: usize) -> &'static str {
        let b = &self.mol.bonds()[bond];
        let both_lower = self.lowercase[b.a] && self.lowercase[b.b];
        match b.order {
            BondOrder::Single if both_lower => "-",
            BondOrder::Single => "",
            BondOrder::Double => "=",
            BondOrder::Triple => "#",
            BondOrder::Aromatic if both_lower => "",
            BondOrder::Aromatic => ":",
        }
    }

    fn write(&self, v: usize, out: &mut String, written: &mut Vec<bool>, digits: &mut RingDigits, order: &mut Vec<usize>) {
        written[v] = true;
        order.push(v);
        out.push_str(&atom_text(self.mol, v, self.lowercase[v]));

        let mut closing: Vec<(usize, usize)> = Vec::new();
        let mut opening: Vec<(usize, usize)> = Vec::new();
        for &(n, bi) in &self.closures[v] {
            if written[n] {
                closing.push((n, bi));
            } else {
                opening.push((n, bi));
            }
        }
        let mut closing: Vec<(u32, usize)> = closing
            .into_iter()
            .map(|(_, bi)| (digits.digit_of(bi), bi))
            .collect();
        closing.sort_unstable();
        for (digit, bi) in closing {
            push_digit(out, digit);
            digits.release(bi);
        }
        opening.sort_by_key(|&(n, _)| self.ranks[n]);
        for (_, bi) in opening {
            out.push_str(self.bond_symbol(bi));
            let d = digits.open(bi);
            push_digit(out, d);
        }

        let kids = &self.children[v];
        for (i, &c) in kids.iter().enumerate() {
            let bi = self
                .mol
                .neighbors(v)
                .iter()
                .find(|(n, _)| *n == c)
                .map(|(_, b)| *b)
                .expect("tree edge exists");
            let last = i + 1 == kids.len();
            if !last {
                out.push('(');
            }
            out.push_str(self.bond_symbol(bi));
            self.write(c, out, written, digits, order);
            if !last {
                out.push(')');
            }
        }
    }
}

#[derive(Default)]
struct RingDigits {
    open: Vec<(u32, usize)>,
}

impl RingDigits {
    fn open(&mut self, bond: usize) -> u32 {
        let mut d = 1;
        while self.open.iter().any(|(x, _)| *x == d) {
            d += 1;
        }
        self.open.push((d, bond));
        d
    }

    fn digit_of(&self, bond: usize) -> u32 {
        self.open
            .iter()
            .find(|(_, b)| *b == bond)
            .map(|(d, _)| *d)
            .expect("closing an opened ring bond")
    }

    fn release(&mut self, bond: usize) {
        self.open.retain(|(_, b)| *b != bond);
    }
}

fn push_digit(out: &mut String, d: u32) {
    if d < 10 {
        out.push(char::from_digit(d, 10).expect("single digit"));
    } else {
        out.push_str(&format!("%{d:02}"));
    }
}

fn atom_text(mol: &Molecule, atom: usize, lowercase: bool) -> String {
    let a = &mol.atoms()[atom];
    let h = a.h_count();
    let bare_ok = a.charge == 0
        && a.isotope.is_none()
        && (a.element.is_organic_subset() || a.element.is_wildcard())
        && (!a.aromatic || lowercase)
        && implicit_hydrogens(mol, atom).ok() == Some(h);
    let symbol = if lowercase {
        a.element.symbol().to_ascii_lowercase()
    } else {
        a.element.symbol().to_string()
    };
    if bare_ok {
        return symbol;
    }
    let mut s = String::from("[");
    if let Some(iso) = a.isotope {
        s.push_str(&iso.to_string());
    }
    s.push_str(&symbol);
    match h {
        0 => {}
        1 => s.push('H'),
        n => s.push_str(&format!("H{n}")),
    }
    match a.charge {
        0 => {}
        1 => s.push('+'),
        -1 => s.push('-'),
        c if c > 0 => s.push_str(&format!("+{c}")),
        c => s.push_str(&format!("-{}", -c)),
    }
    s.push(']');
    s
}

fn write_fragment(mol: &Molecule, ranks: &[u32]) -> (String, Vec<usize>) {
    let n = mol.atom_count();
    let root = (0..n)
        .min_by_key(|&a| ranks[a])
        .expect("fragment has atoms");
    let lowercase = mol
        .atoms()
        .iter()
        .map(|a| a.aromatic && a.element.has_aromatic_symbol())
        .collect();
    let mut w = Writer {
        mol,
        ranks,
        visited: vec![false; n],
        children: vec![Vec::new(); n],
        closures: vec![Vec::new(); n],
        lowercase,
    };
    w.build_tree(root, None);
    let mut out = String::new();
    let mut order = Vec::with_capacity(n);
    w.write(
        root,
        &mut out,
        &mut vec![false; n],
        &mut RingDigits::default(),
        &mut order,
    );
    (out, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::normalize::normalize;
    use crate::io::smiles::parse_smiles;

    fn key(s: &str) -> String {
        canonical_key(&normalize(&parse_smiles(s).unwrap()).unwrap()).into_string()
    }

    #[test]
    fn single_atoms() {
        assert_eq!(key("C"), "C");
        assert_eq!(key("[NH4+]"), "[NH4+]");
        assert_eq!(key("[13CH4]"), "[13CH4]");
    }

    #[test]
    fn relabeled_inputs_agree() {
        assert_eq!(key("OCC"), key("CCO"));
        assert_eq!(key("C1=CC=CC=C1"), key("c1ccccc1"));
        assert_eq!(key("C(C)(C)CCNCCC(C)(C)"), key("CC(C)CCNCCC(C)C"));
        assert_eq!(key("c1ccccc1CN"), key("NCc1ccccc1"));
        assert_eq!(key("C1=CC=C2C=CC=CC2=C1"), key("c1ccc2ccccc2c1"));
    }

    #[test]
    fn distinct_constitutions_differ() {
        assert_ne!(key("CCO"), key("COC"));
        assert_ne!(key("c1ccccc1"), key("c1ccncc1"));
        assert_ne!(key("C=CC"), key("C1CC1"));
        assert_ne!(key("[NH4+]"), key("N"));
    }

    #[test]
    fn stereo_is_ignored() {
        assert_eq!(key("C[C@H](N)O"), key("C[C@@H](N)O"));
        assert_eq!(key("F/C=C/F"), key("F/C=C\\F"));
        assert_eq!(key("F/C=C/F"), key("FC=CF"));
    }

    #[test]
    fn fragments_sorted_lexicographically() {
        let k = key("O.CC.[Na+]");
        let parts: Vec<&str> = k.split('.').collect();
        let mut sorted = parts.clone();
        sorted.sort();
        assert_eq!(parts, sorted);
        assert_eq!(k, key("[Na+].O.CC"));
    }

    #[test]
    fn symmetric_cages_terminate() {
        // cubane and a fullerene-like cage stress the search
        let cubane = key("C12C3C4C1C5C2C3C45");
        assert_eq!(key(&cubane), cubane);
        let tbu4 = "CC(C)(C)C(C(C)(C)C)(C(C)(C)C)C(C)(C)C";
        assert_eq!(key(tbu4), key("C(C(C)(C)C)(C(C)(C)C)(C(C)(C)C)C(C)(C)C"));
    }

    #[test]
    fn long_ring_closure_digits() {
        let m = normalize(&parse_smiles("C1CC2CC3CC4CC5CC6CC7CC8CC9CC%10CC%10CC9CC8CC7CC6CC5CC4CC3CC2C1").unwrap()).unwrap();
        let k = canonical_key(&m);
        let back = normalize(&parse_smiles(k.as_str()).unwrap()).unwrap();
        assert_eq!(canonical_key(&back), k);
    }
}
