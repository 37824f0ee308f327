//! Structure file formats.

pub mod layout;
pub mod molfile;
pub mod smiles;

pub use layout::{layout_rmsd, LayoutError};
pub use molfile::{parse_molfile, write_document, write_molfile, MolfileDocument, MolfileError, MolfileErrorKind};
pub use smiles::{parse_smiles, write_smiles, SmilesError};
