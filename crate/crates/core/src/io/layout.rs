//! Layout fidelity between two drawings of the same structure.

use thiserror::Error;

use crate::chem::{canonical_key, canonical_order, normalize, ChemError, NormalizedMolecule};

use super::molfile::MolfileDocument;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error(transparent)]
    Chem(#[from] ChemError),
    #[error("structures differ: {left} vs {right}")]
    KeyMismatch { left: String, right: String },
}

fn centered(doc: &MolfileDocument, norm: &NormalizedMolecule) -> Vec<(f64, f64)> {
    let order = canonical_order(norm);
    let pts: Vec<(f64, f64)> = order
        .into_iter()
        .map(|i| {
            let c = doc.body.atoms()[norm.origin()[i]]
                .coords
                .expect("document atoms carry coordinates");
            (c[0], c[1])
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x, sy + y));
    pts.iter().map(|(x, y)| (x - mx / n, y - my / n)).collect()
}

/// Root-mean-square deviation between the heavy-atom layouts of `a` and `b`
/// after the best similarity transform (translation, rotation, uniform
/// scale) of `b` onto `a`, with `a` first rescaled to unit root-mean-square
/// radius. Both arguments may be moved or scaled without changing the value.
///
/// Atoms are paired through the canonical order. A layout collapsed to a
/// point scores 1 against a spread-out one and 0 against another point.
pub fn layout_rmsd(a: &MolfileDocument, b: &MolfileDocument) -> Result<f64, LayoutError> {
    let na = normalize(&a.body)?;
    let nb = normalize(&b.body)?;
    let (ka, kb) = (canonical_key(&na), canonical_key(&nb));
    if ka != kb {
        return Err(LayoutError::KeyMismatch {
            left: ka.into_string(),
            right: kb.into_string(),
        });
    }
    let pa = centered(a, &na);
    let pb = centered(b, &nb);

    // as complex numbers: a . conj(b) summed
    let (mut re, mut im, mut saa, mut sbb) = (0.0, 0.0, 0.0, 0.0);
    for (&(ax, ay), &(bx, by)) in pa.iter().zip(&pb) {
        re += ax * bx + ay * by;
        im += ay * bx - ax * by;
        saa += ax * ax + ay * ay;
        sbb += bx * bx + by * by;
    }
    const FLAT: f64 = 1e-18;
    match (saa <= FLAT, sbb <= FLAT) {
        (true, true) => return Ok(0.0),
        (true, false) | (false, true) => return Ok(1.0),
        _ => {}
    }
    let residual = 1.0 - (re * re + im * im) / (saa * sbb);
    Ok(residual.max(0.0).sqrt())
}
