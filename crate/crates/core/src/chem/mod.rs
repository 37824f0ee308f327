//! Molecular graphs: normalization, canonical keys, isomorphism and fingerprints.

mod canon;
mod element;
mod fingerprint;
mod isomorphism;
mod molecule;
mod normalize;
pub mod rings;

use thiserror::Error;

pub use canon::{canonical_key, canonical_order, CanonicalKey};
pub use element::Element;
pub use fingerprint::{
    environment_ids, fingerprint, fnv1a, tanimoto, Fingerprint, DEFAULT_NBITS, DEFAULT_RADIUS,
};
pub use isomorphism::{isomorphic, MAX_ORACLE_ATOMS};
pub use molecule::{Atom, Bond, BondOrder, BondStereo, Chirality, Molecule};
pub use normalize::{implicit_hydrogens, normalize, NormalizedMolecule};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChemError {
    #[error("invalid molecule: {0}")]
    InvalidMolecule(String),
    #[error("valence violation at atom {atom} ({element}, charge {charge}): valence {valence} exceeds the table")]
    Valence {
        atom: usize,
        element: String,
        charge: i8,
        valence: u8,
    },
    #[error("isomorphism oracle supports at most {limit} atoms, got {atoms}")]
    OracleCapacity { atoms: usize, limit: usize },
    #[error("fingerprint lengths differ: {left} vs {right}")]
    FingerprintLength { left: usize, right: usize },
}

/// Normalizes `mol` and returns its canonical key.
pub fn key_of(mol: &Molecule) -> Result<CanonicalKey, ChemError> {
    Ok(canonical_key(&normalize(mol)?))
}
