//! Circular (extended-connectivity style) fingerprints and Tanimoto similarity.
//!
//! Hashing is FNV-1a over 64-bit words, each word fed as 8 little-endian
//! bytes (offset basis `0xcbf29ce484222325`, prime `0x100000001b3`).
//!
//! * radius 0 identifier of an atom: `fnv([Z, degree, H, charge as i64 as u64,
//!   mass number or 0, aromatic, in_ring])`
//! * radius `r` identifier: `fnv([r, previous id, code_1, id_1, code_2, id_2, ...])`
//!   with neighbours sorted by `(bond code, neighbour id)`; bond codes are
//!   single 1, double 2, triple 3, aromatic 4
//! * every identifier of every radius `0..=radius` sets bit `id % nbits`

use super::normalize::NormalizedMolecule;
use super::rings::ring_atoms;
use super::ChemError;

pub const DEFAULT_RADIUS: u32 = 2;
pub const DEFAULT_NBITS: usize = 2048;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a(words: &[u64]) -> u64 {
    let mut h = FNV_OFFSET;
    for w in words {
        for byte in w.to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    nbits: usize,
    words: Vec<u64>,
}

impl Fingerprint {
    pub fn empty(nbits: usize) -> Fingerprint {
        Fingerprint {
            nbits,
            words: vec![0; nbits.div_ceil(64)],
        }
    }

    pub fn from_bits(nbits: usize, bits: impl IntoIterator<Item = usize>) -> Fingerprint {
        let mut fp = Fingerprint::empty(nbits);
        for b in bits {
            fp.set(b);
        }
        fp
    }

    pub fn len(&self) -> usize {
        self.nbits
    }

    pub fn is_empty(&self) -> bool {
        self.nbits == 0
    }

    pub fn set(&mut self, bit: usize) {
        assert!(bit < self.nbits, "bit {bit} out of range {}", self.nbits);
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn get(&self, bit: usize) -> bool {
        bit < self.nbits && self.words[bit / 64] & (1 << (bit % 64)) != 0
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nbits).filter(|b| self.get(*b))
    }
}

/// Atom-environment identifiers of radius `0..=radius`, one per atom per radius.
pub fn environment_ids(mol: &NormalizedMolecule, radius: u32) -> Vec<u64> {
    let in_ring = ring_atoms(mol);
    let mut ids: Vec<u64> = mol
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            fnv1a(&[
                u64::from(a.element.atomic_number()),
                mol.degree(i) as u64,
                u64::from(a.h_count()),
                i64::from(a.charge) as u64,
                u64::from(a.isotope.unwrap_or(0)),
                u64::from(a.aromatic),
                u64::from(in_ring[i]),
            ])
        })
        .collect();
    let mut all = ids.clone();
    for r in 1..=radius {
        let next: Vec<u64> = (0..mol.atom_count())
            .map(|i| {
                let mut env: Vec<(u64, u64)> = mol
                    .neighbors(i)
                    .iter()
                    .map(|&(n, bi)| (u64::from(mol.bonds()[bi].order.code()), ids[n]))
                    .collect();
                env.sort_unstable();
                let mut words = vec![u64::from(r), ids[i]];
                words.extend(env.into_iter().flat_map(|(c, id)| [c, id]));
                fnv1a(&words)
            })
            .collect();
        all.extend_from_slice(&next);
        ids = next;
    }
    all
}

pub fn fingerprint(mol: &NormalizedMolecule, radius: u32, nbits: usize) -> Fingerprint {
    assert!(nbits > 0, "fingerprint length must be positive");
    let ids = environment_ids(mol, radius);
    Fingerprint::from_bits(nbits, ids.into_iter().map(|id| (id % nbits as u64) as usize))
}

/// `|a & b| / |a | b|`; two empty bitsets are identical and score 1.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, ChemError> {
    if a.nbits != b.nbits {
        return Err(ChemError::FingerprintLength {
            left: a.nbits,
            right: b.nbits,
        });
    }
    let (mut both, mut either) = (0u32, 0u32);
    for (x, y) in a.words.iter().zip(&b.words) {
        both += (x & y).count_ones();
        either += (x | y).count_ones();
    }
    if either == 0 {
        return Ok(1.0);
    }
    Ok(f64::from(both) / f64::from(either))
}
