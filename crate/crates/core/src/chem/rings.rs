//! Ring membership and small-cycle enumeration.

use super::molecule::Molecule;

/// `true` for every bond that lies on at least one cycle (i.e. is not a bridge).
pub fn ring_bonds(mol: &Molecule) -> Vec<bool> {
    let n = mol.atom_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut in_ring = vec![true; mol.bond_count()];
    let mut timer = 0;

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // iterative Tarjan bridge search: (atom, parent bond, next neighbour slot)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(top) = stack.last_mut() {
            let (v, parent_bond, slot) = *top;
            if let Some(&(w, bi)) = mol.neighbors(v).get(slot) {
                top.2 += 1;
                if bi == parent_bond {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, bi, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(u, _, _)) = stack.last() {
                    low[u] = low[u].min(low[v]);
                    if low[v] > disc[u] {
                        in_ring[parent_bond] = false;
                    }
                }
            }
        }
    }
    in_ring
}

/// `true` for every atom on at least one cycle.
pub fn ring_atoms(mol: &Molecule) -> Vec<bool> {
    let rb = ring_bonds(mol);
    let mut out = vec![false; mol.atom_count()];
    for (bond, &r) in mol.bonds().iter().zip(&rb) {
        if r {
            out[bond.a] = true;
            out[bond.b] = true;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub atoms: Vec<usize>,
    pub bonds: Vec<usize>,
}

/// Every simple cycle whose length lies in `min_len..=max_len`, each reported once.
pub fn simple_cycles(mol: &Molecule, min_len: usize, max_len: usize) -> Vec<Cycle> {
    let in_ring = ring_bonds(mol);
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(max_len);
    let mut path_bonds = Vec::with_capacity(max_len);
    let mut on_path = vec![false; mol.atom_count()];
    for start in 0..mol.atom_count() {
        path.push(start);
        on_path[start] = true;
        extend(
            mol,
            &in_ring,
            start,
            min_len.max(3),
            max_len,
            &mut path,
            &mut path_bonds,
            &mut on_path,
            &mut out,
        );
        on_path[start] = false;
        path.pop();
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn extend(
    mol: &Molecule,
    in_ring: &[bool],
    start: usize,
    min_len: usize,
    max_len: usize,
    path: &mut Vec<usize>,
    path_bonds: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<Cycle>,
) {
    let tail = *path.last().expect("path never empty");
    for &(next, bi) in mol.neighbors(tail) {
        if !in_ring[bi] {
            continue;
        }
        if next == start {
            // each cycle is seen in two directions; keep the one whose second
            // atom is smaller than its last
            if path.len() >= min_len && path[1] < path[path.len() - 1] {
                let mut bonds = path_bonds.clone();
                bonds.push(bi);
                out.push(Cycle {
                    atoms: path.clone(),
                    bonds,
                });
            }
            continue;
        }
        if next < start || on_path[next] || path.len() == max_len {
            continue;
        }
        on_path[next] = true;
        path.push(next);
        path_bonds.push(bi);
        extend(
            mol, in_ring, start, min_len, max_len, path, path_bonds, on_path, out,
        );
        path_bonds.pop();
        path.pop();
        on_path[next] = false;
    }
}
