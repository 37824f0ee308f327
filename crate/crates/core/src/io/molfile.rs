//! MOLfile V2000 connection tables.
//!
//! Atom line columns (0-based): x `0..10`, y `10..20`, z `20..30`, symbol
//! `31..34`, mass difference `34..36`, charge `36..39`, valence `48..51`.
//! Bond line columns: first atom `0..3`, second atom `3..6`, type `6..9`,
//! stereo `9..12`.
//!
//! Hydrogen counts that the valence table would not infer are carried in the
//! atom valence field (total valence, `15` meaning zero), so a written
//! molecule reads back with the same hydrogen counts.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::chem::{implicit_hydrogens, Atom, Bond, BondOrder, BondStereo, Element, Molecule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MolfileErrorKind {
    #[error("V3000 connection tables are not supported")]
    V3000,
    #[error("counts line does not declare V2000")]
    NotV2000,
    #[error("counts line declares {declared} {what}, but the block ends after {found}")]
    CountsMismatch {
        what: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("line too short for a {0} record")]
    ShortLine(&'static str),
    #[error("malformed {0} field")]
    BadField(&'static str),
    #[error("unknown element '{0}'")]
    UnknownElement(String),
    #[error("unknown bond type {0}")]
    UnknownBondType(u32),
    #[error("bond references atom {0}, outside the atom block")]
    AtomOutOfRange(usize),
    #[error("missing 'M  END'")]
    MissingEnd,
    #[error("atom {0} has no coordinates")]
    MissingCoordinates(usize),
    #[error("{0}")]
    InvalidMolecule(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("MOLfile line {line}: {kind}")]
pub struct MolfileError {
    /// 1-based line number; 0 for errors not tied to a line.
    pub line: usize,
    pub kind: MolfileErrorKind,
}

fn fail<T>(line: usize, kind: MolfileErrorKind) -> Result<T, MolfileError> {
    Err(MolfileError { line, kind })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MolfileDocument {
    pub header: [String; 3],
    pub counts: (usize, usize),
    /// Every atom carries coordinates.
    pub body: Molecule,
    /// Property block lines as read, ending with `M  END`.
    pub properties: Vec<String>,
}

impl MolfileDocument {
    pub fn layout(&self) -> Vec<[f64; 2]> {
        self.body
            .atoms()
            .iter()
            .map(|a| {
                let c = a.coords.expect("document atoms carry coordinates");
                [c[0], c[1]]
            })
            .collect()
    }
}

fn field(line: &str, range: std::ops::Range<usize>) -> &str {
    let end = range.end.min(line.len());
    line.get(range.start.min(end)..end).unwrap_or("").trim()
}

fn parse_int(text: &str, line: usize, name: &'static str) -> Result<i64, MolfileError> {
    if text.is_empty() {
        return Ok(0);
    }
    text.parse()
        .map_err(|_| MolfileError {
            line,
            kind: MolfileErrorKind::BadField(name),
        })
}

fn looks_like_block_end(line: &str) -> bool {
    line.starts_with("M  ")
        || line.trim().is_empty()
        || line.split_whitespace().all(|t| t.parse::<i64>().is_ok())
}

fn element_for(symbol: &str) -> Option<(Element, Option<u16>)> {
    match symbol {
        "D" => Some((Element::H, Some(2))),
        "T" => Some((Element::H, Some(3))),
        "*" | "A" | "Q" | "R" | "R#" | "L" => Some((Element::WILDCARD, None)),
        s => Element::from_symbol(s).filter(|e| !e.is_wildcard()).map(|e| (e, None)),
    }
}

fn legacy_charge(code: i64) -> i8 {
    match code {
        1 => 3,
        2 => 2,
        3 => 1,
        5 => -1,
        6 => -2,
        7 => -3,
        _ => 0,
    }
}

pub fn parse_molfile(text: &str) -> Result<MolfileDocument, MolfileError> {
    let lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    if lines.len() < 4 {
        return fail(lines.len() + 1, MolfileErrorKind::ShortLine("counts"));
    }
    let header = [lines[0], lines[1], lines[2]].map(str::to_string);

    let counts = lines[3];
    if counts.contains("V3000") {
        return fail(4, MolfileErrorKind::V3000);
    }
    if !counts.trim_end().ends_with("V2000") {
        return fail(4, MolfileErrorKind::NotV2000);
    }
    if counts.len() < 6 {
        return fail(4, MolfileErrorKind::ShortLine("counts"));
    }
    let n_atoms = parse_int(field(counts, 0..3), 4, "atom count")? as usize;
    let n_bonds = parse_int(field(counts, 3..6), 4, "bond count")? as usize;

    let mut atoms = Vec::with_capacity(n_atoms);
    let mut valence_field = Vec::with_capacity(n_atoms);
    for i in 0..n_atoms {
        let lineno = 5 + i;
        let Some(&line) = lines.get(4 + i) else {
            return fail(lineno, counts_short("atoms", n_atoms, i));
        };
        let coord = |r: std::ops::Range<usize>, name| -> Result<f64, MolfileError> {
            field(line, r).parse::<f64>().map_err(|_| MolfileError {
                line: lineno,
                kind: MolfileErrorKind::BadField(name),
            })
        };
        if line.len() < 32 {
            if looks_like_block_end(line) {
                return fail(lineno, counts_short("atoms", n_atoms, i));
            }
            return fail(lineno, MolfileErrorKind::ShortLine("atom"));
        }
        let x = match coord(0..10, "x coordinate") {
            Ok(x) => x,
            Err(_) if looks_like_block_end(line) => {
                return fail(lineno, counts_short("atoms", n_atoms, i));
            }
            Err(e) => return Err(e),
        };
        let y = coord(10..20, "y coordinate")?;
        let z = coord(20..30, "z coordinate")?;
        let symbol = field(line, 31..34);
        let Some((element, isotope)) = element_for(symbol) else {
            return fail(lineno, MolfileErrorKind::UnknownElement(symbol.to_string()));
        };
        let mut atom = Atom::new(element);
        atom.isotope = isotope;
        atom.coords = Some([x, y, z]);
        atom.charge = legacy_charge(parse_int(field(line, 36..39), lineno, "charge")?);
        atoms.push(atom);
        valence_field.push(parse_int(field(line, 48..51), lineno, "valence")?);
    }

    let mut bonds = Vec::with_capacity(n_bonds);
    for i in 0..n_bonds {
        let lineno = 5 + n_atoms + i;
        let Some(&line) = lines.get(4 + n_atoms + i) else {
            return fail(lineno, counts_short("bonds", n_bonds, i));
        };
        if line.starts_with("M  ") || line.trim().is_empty() {
            return fail(lineno, counts_short("bonds", n_bonds, i));
        }
        if line.len() < 9 {
            return fail(lineno, MolfileErrorKind::ShortLine("bond"));
        }
        let a = parse_int(field(line, 0..3), lineno, "first atom")?;
        let b = parse_int(field(line, 3..6), lineno, "second atom")?;
        for idx in [a, b] {
            if idx < 1 || idx as usize > n_atoms {
                return fail(lineno, MolfileErrorKind::AtomOutOfRange(idx.max(0) as usize));
            }
        }
        let order = match parse_int(field(line, 6..9), lineno, "bond type")? {
            1 => BondOrder::Single,
            2 => BondOrder::Double,
            3 => BondOrder::Triple,
            4 => BondOrder::Aromatic,
            t => return fail(lineno, MolfileErrorKind::UnknownBondType(t.max(0) as u32)),
        };
        let stereo = match parse_int(field(line, 9..12), lineno, "bond stereo")? {
            1 => BondStereo::Wedge,
            6 => BondStereo::Hash,
            3 | 4 => BondStereo::Wavy,
            _ => BondStereo::None,
        };
        bonds.push(Bond {
            a: a as usize - 1,
            b: b as usize - 1,
            order,
            stereo,
        });
    }

    let mut properties = Vec::new();
    let mut charges: Option<Vec<(usize, i8)>> = None;
    let mut ended = false;
    for (offset, &line) in lines[4 + n_atoms + n_bonds..].iter().enumerate() {
        let lineno = 5 + n_atoms + n_bonds + offset;
        properties.push(line.to_string());
        if line.starts_with("M  END") {
            ended = true;
            break;
        }
        let tag = line.get(0..6).unwrap_or("");
        if tag == "M  CHG" || tag == "M  ISO" {
            let values = property_pairs(line, lineno, n_atoms)?;
            if tag == "M  CHG" {
                let list = charges.get_or_insert_with(Vec::new);
                for (atom, v) in values {
                    let c = i8::try_from(v).map_err(|_| MolfileError {
                        line: lineno,
                        kind: MolfileErrorKind::BadField("charge"),
                    })?;
                    list.push((atom, c));
                }
            } else {
                for (atom, v) in values {
                    let iso = u16::try_from(v).ok().filter(|v| *v > 0).ok_or(MolfileError {
                        line: lineno,
                        kind: MolfileErrorKind::BadField("isotope"),
                    })?;
                    atoms[atom].isotope = Some(iso);
                }
            }
        }
    }
    if !ended {
        return fail(lines.len() + 1, MolfileErrorKind::MissingEnd);
    }
    if let Some(list) = charges {
        for atom in atoms.iter_mut() {
            atom.charge = 0;
        }
        for (i, c) in list {
            atoms[i].charge = c;
        }
    }

    let mut bond_valence = vec![0i64; n_atoms];
    for b in &bonds {
        bond_valence[b.a] += i64::from(b.order.valence());
        bond_valence[b.b] += i64::from(b.order.valence());
    }
    for (i, v) in valence_field.iter().enumerate() {
        let total = match *v {
            0 => continue,
            15 => 0,
            v => v,
        };
        let h = total - bond_valence[i];
        if !(0..=i64::from(u8::MAX)).contains(&h) {
            return fail(5 + i, MolfileErrorKind::BadField("valence"));
        }
        atoms[i].explicit_h = Some(h as u8);
    }

    let body = Molecule::new(atoms, bonds).map_err(|e| MolfileError {
        line: 0,
        kind: MolfileErrorKind::InvalidMolecule(e.to_string()),
    })?;
    Ok(MolfileDocument {
        header,
        counts: (n_atoms, n_bonds),
        body,
        properties,
    })
}

fn counts_short(what: &'static str, declared: usize, found: usize) -> MolfileErrorKind {
    MolfileErrorKind::CountsMismatch {
        what,
        declared,
        found,
    }
}

/// `M  CHGnn8 aaa vvv ...` entries as 0-based atom index and value.
fn property_pairs(line: &str, lineno: usize, n_atoms: usize) -> Result<Vec<(usize, i64)>, MolfileError> {
    let bad = |name| MolfileError {
        line: lineno,
        kind: MolfileErrorKind::BadField(name),
    };
    let mut tokens = line[6..].split_whitespace();
    let n: usize = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("property count"))?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let atom: usize = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("property atom"))?;
        let value: i64 = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("property value"))?;
        if atom < 1 || atom > n_atoms {
            return fail(lineno, MolfileErrorKind::AtomOutOfRange(atom));
        }
        out.push((atom - 1, value));
    }
    Ok(out)
}

/// Writes `mol` as a V2000 block placing atom `i` at `layout[i]`.
pub fn write_molfile(mol: &Molecule, layout: &[[f64; 2]]) -> Result<String, MolfileError> {
    if let Some(missing) = (layout.len()..mol.atom_count()).next() {
        return fail(0, MolfileErrorKind::MissingCoordinates(missing + 1));
    }
    let mut out = String::new();
    let w = &mut out;
    // header: name, program line, comment
    writeln!(w).ok();
    writeln!(w, "  {:<8}{:10}2D", "chemeval", "").ok();
    writeln!(w).ok();
    writeln!(
        w,
        "{:>3}{:>3}  0  0  0  0  0  0  0  0999 V2000",
        mol.atom_count(),
        mol.bond_count()
    )
    .ok();

    for (i, atom) in mol.atoms().iter().enumerate() {
        let [x, y] = layout[i];
        let symbol = if atom.element.is_wildcard() {
            "*"
        } else {
            atom.element.symbol()
        };
        let valence = valence_field(mol, i);
        writeln!(
            w,
            "{:>10.4}{:>10.4}{:>10.4} {:<3} 0  0  0  0  0{:>3}  0  0  0  0  0  0",
            x, y, 0.0, symbol, valence
        )
        .ok();
    }

    for bond in mol.bonds() {
        let order = match bond.order {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        };
        let stereo = match bond.stereo {
            BondStereo::Wedge => 1,
            BondStereo::Hash => 6,
            BondStereo::Wavy if bond.order == BondOrder::Double => 3,
            BondStereo::Wavy => 4,
            BondStereo::None | BondStereo::Up | BondStereo::Down => 0,
        };
        writeln!(w, "{:>3}{:>3}{:>3}{:>3}", bond.a + 1, bond.b + 1, order, stereo).ok();
    }

    let charged: Vec<(usize, i64)> = mol
        .atoms()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.charge != 0)
        .map(|(i, a)| (i, i64::from(a.charge)))
        .collect();
    write_property(w, "CHG", &charged);
    let isotopes: Vec<(usize, i64)> = mol
        .atoms()
        .iter()
        .enumerate()
        .filter_map(|(i, a)| a.isotope.map(|m| (i, i64::from(m))))
        .collect();
    write_property(w, "ISO", &isotopes);
    writeln!(w, "M  END").ok();
    Ok(out)
}

fn write_property(w: &mut String, tag: &str, entries: &[(usize, i64)]) {
    for chunk in entries.chunks(8) {
        write!(w, "M  {tag}{:>3}", chunk.len()).ok();
        for (atom, value) in chunk {
            write!(w, " {:>3} {:>3}", atom + 1, value).ok();
        }
        writeln!(w).ok();
    }
}

/// Value for the atom valence column: `0` when the valence table already
/// yields the atom's hydrogen count, else the total valence (`15` for zero).
fn valence_field(mol: &Molecule, atom: usize) -> u32 {
    let Some(h) = mol.atoms()[atom].explicit_h else {
        return 0;
    };
    if implicit_hydrogens(mol, atom).ok() == Some(h) {
        return 0;
    }
    match u32::from(mol.bond_valence(atom)) + u32::from(h) {
        0 => 15,
        v => v,
    }
}

/// Writes a document back out using its own coordinates.
pub fn write_document(doc: &MolfileDocument) -> String {
    write_molfile(&doc.body, &doc.layout()).expect("document atoms carry coordinates")
}

impl fmt::Display for MolfileDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_document(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::key_of;
    use crate::io::smiles::parse_smiles;

    const ETHANOL: &str = "\n  hand\n\n  3  2  0  0  0  0  0  0  0  0999 V2000
    0.0000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0
    1.0000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0
    2.0000    0.0000    0.0000 O   0  0  0  0  0  0  0  0  0  0  0  0
  1  2  1  0
  2  3  1  0
M  END
";

    #[test]
    fn hand_written_ethanol() {
        let doc = parse_molfile(ETHANOL).unwrap();
        assert_eq!(doc.counts, (3, 2));
        assert_eq!(doc.body.atom_count(), 3);
        assert_eq!(doc.body.bond_count(), 2);
        assert_eq!(doc.body.atoms()[2].element, Element::O);
        assert_eq!(doc.properties, vec!["M  END".to_string()]);
        assert_eq!(key_of(&doc.body).unwrap(), key_of(&parse_smiles("CCO").unwrap()).unwrap());
    }

    #[test]
    fn ethanol_round_trip_is_exact() {
        let doc = parse_molfile(ETHANOL).unwrap();
        let text = write_document(&doc);
        let back = parse_molfile(&text).unwrap();
        assert_eq!(back.body, doc.body);
    }

    #[test]
    fn counts_mismatch_is_reported() {
        let bad = ETHANOL.replace("  3  2  0", "  4  2  0");
        let err = parse_molfile(&bad).unwrap_err();
        assert_eq!(err.line, 8);
        assert!(matches!(
            err.kind,
            MolfileErrorKind::CountsMismatch {
                declared: 4,
                found: 3,
                ..
            }
        ));
    }

    #[test]
    fn structural_errors() {
        let no_end = ETHANOL.replace("M  END\n", "");
        assert_eq!(parse_molfile(&no_end).unwrap_err().kind, MolfileErrorKind::MissingEnd);
        let bad_type = ETHANOL.replace("  2  3  1  0", "  2  3  9  0");
        let err = parse_molfile(&bad_type).unwrap_err();
        assert_eq!((err.line, err.kind), (9, MolfileErrorKind::UnknownBondType(9)));
        let v3 = ETHANOL.replace("V2000", "V3000");
        assert_eq!(parse_molfile(&v3).unwrap_err().kind, MolfileErrorKind::V3000);
        let short = ETHANOL.replace("  1  2  1  0", "  1  2");
        assert_eq!(parse_molfile(&short).unwrap_err().line, 8);
    }

    #[test]
    fn aromatic_bonds_written_as_type_4() {
        let m = parse_smiles("c1ccccc1").unwrap();
        let layout: Vec<[f64; 2]> = (0..6).map(|i| [i as f64, 0.0]).collect();
        let text = write_molfile(&m, &layout).unwrap();
        let bond_lines: Vec<&str> = text.lines().skip(4 + 6).take(6).collect();
        assert!(bond_lines.iter().all(|l| &l[6..9] == "  4"));
    }

    #[test]
    fn charges_use_property_block() {
        let m = parse_smiles("C[N+](C)(C)C").unwrap();
        let layout = vec![[0.0, 0.0]; 5];
        let text = write_molfile(&m, &layout).unwrap();
        assert!(text.contains("M  CHG  1   2   1\n"));
        let back = parse_molfile(&text).unwrap();
        assert_eq!(back.body.atoms()[1].charge, 1);
    }

    #[test]
    fn property_block_overrides_atom_line_charge() {
        let text = ETHANOL
            .replace("O   0  0  0", "O   0  5  0")
            .replace("M  END", "M  CHG  1   1  -1\nM  END");
        let doc = parse_molfile(&text).unwrap();
        assert_eq!(doc.body.atoms()[2].charge, 0);
        assert_eq!(doc.body.atoms()[0].charge, -1);
        let legacy = ETHANOL.replace("O   0  0  0", "O   0  5  0");
        assert_eq!(parse_molfile(&legacy).unwrap().body.atoms()[2].charge, -1);
    }

    #[test]
    fn unusual_hydrogen_counts_survive() {
        for s in ["c1cc[nH]c1", "[CH2]C", "[Fe+2]", "[13CH3]O", "[NH4+]", "[SH]C"] {
            let m = parse_smiles(s).unwrap();
            let layout = vec![[1.5, -2.25]; m.atom_count()];
            let text = write_molfile(&m, &layout).unwrap();
            let back = parse_molfile(&text).unwrap();
            assert_eq!(key_of(&back.body).unwrap(), key_of(&m).unwrap(), "{s}");
        }
    }

    #[test]
    fn wavy_and_wedge_marks_preserved() {
        let text = ETHANOL
            .replace("  1  2  1  0", "  1  2  1  4")
            .replace("  2  3  1  0", "  2  3  1  1");
        let doc = parse_molfile(&text).unwrap();
        assert_eq!(doc.body.bonds()[0].stereo, BondStereo::Wavy);
        assert_eq!(doc.body.bonds()[1].stereo, BondStereo::Wedge);
        let back = parse_molfile(&write_document(&doc)).unwrap();
        assert_eq!(back.body.bonds()[0].stereo, BondStereo::Wavy);
    }

    #[test]
    fn missing_coordinates() {
        let m = parse_smiles("CCO").unwrap();
        let err = write_molfile(&m, &[[0.0, 0.0]]).unwrap_err();
        assert_eq!(err.kind, MolfileErrorKind::MissingCoordinates(2));
    }

    #[test]
    fn writer_columns() {
        let m = parse_smiles("C").unwrap();
        let text = write_molfile(&m, &[[-1.23456, 10.0]]).unwrap();
        let atom_line = text.lines().nth(4).unwrap();
        assert_eq!(&atom_line[..34], "   -1.2346   10.0000    0.0000 C  ");
        assert_eq!(text.lines().nth(3).unwrap(), "  1  0  0  0  0  0  0  0  0  0999 V2000");
    }
}
