//! SMILES subset reader and the canonical writer.
//!
//! Supported grammar: organic-subset atoms (`B C N O P S F Cl Br I`, aromatic
//! `b c n o p s`, and `*`), bracket atoms `[isotope? symbol chirality? Hn?
//! charge? :class?]`, bonds `- = # : / \`, branches, ring closures `0-9` and
//! `%nn`, and `.` disconnection. Chirality and `/` `\` marks are stored but
//! carry no meaning for comparison.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::chem::{
    canonical_key, Atom, Bond, BondOrder, BondStereo, Chirality, Element, Molecule,
    NormalizedMolecule,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("SMILES error at offset {offset}: {message}")]
pub struct SmilesError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, SmilesError> {
    Err(SmilesError {
        offset,
        message: message.into(),
    })
}

#[derive(Clone, Copy)]
struct BondToken {
    order: BondOrder,
    stereo: BondStereo,
}

struct RingOpen {
    atom: usize,
    bond: Option<BondToken>,
    offset: usize,
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    pairs: HashSet<(usize, usize)>,
}

pub fn parse_smiles(text: &str) -> Result<Molecule, SmilesError> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
        atoms: Vec::new(),
        bonds: Vec::new(),
        pairs: HashSet::new(),
    };
    p.run()?;
    Molecule::new(p.atoms, p.bonds).map_err(|e| SmilesError {
        offset: 0,
        message: e.to_string(),
    })
}

/// Canonical SMILES; identical to the molecule's canonical key.
pub fn write_smiles(mol: &NormalizedMolecule) -> String {
    canonical_key(mol).into_string()
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn run(&mut self) -> Result<(), SmilesError> {
        let mut prev: Option<usize> = None;
        let mut pending: Option<(BondToken, usize)> = None;
        let mut branches: Vec<(usize, usize)> = Vec::new();
        let mut rings: BTreeMap<u32, RingOpen> = BTreeMap::new();

        while let Some(c) = self.peek() {
            let start = self.pos;
            match c {
                b'(' => {
                    let Some(p) = prev else {
                        return err(start, "branch opened before any atom");
                    };
                    if pending.is_some() {
                        return err(start, "bond symbol before '('");
                    }
                    branches.push((p, start));
                    self.pos += 1;
                }
                b')' => {
                    let Some((p, _)) = branches.pop() else {
                        return err(start, "unbalanced ')'");
                    };
                    if pending.is_some() {
                        return err(start, "dangling bond before ')'");
                    }
                    prev = Some(p);
                    self.pos += 1;
                }
                b'.' => {
                    if pending.is_some() {
                        return err(start, "dangling bond before '.'");
                    }
                    prev = None;
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    if pending.is_some() {
                        return err(start, "two consecutive bond symbols");
                    }
                    let token = match c {
                        b'-' => (BondOrder::Single, BondStereo::None),
                        b'=' => (BondOrder::Double, BondStereo::None),
                        b'#' => (BondOrder::Triple, BondStereo::None),
                        b':' => (BondOrder::Aromatic, BondStereo::None),
                        b'/' => (BondOrder::Single, BondStereo::Up),
                        _ => (BondOrder::Single, BondStereo::Down),
                    };
                    pending = Some((
                        BondToken {
                            order: token.0,
                            stereo: token.1,
                        },
                        start,
                    ));
                    self.pos += 1;
                }
                b'0'..=b'9' | b'%' => {
                    let Some(atom) = prev else {
                        return err(start, "ring-closure digit before any atom");
                    };
                    let number = self.ring_number()?;
                    let token = pending.take().map(|(s, _)| s);
                    if let Some(open) = rings.remove(&number) {
                        let order = match (open.bond, token) {
                            (Some(x), Some(y)) if x.order != y.order => {
                                return err(start, format!("conflicting bond orders on ring bond {number}"));
                            }
                            (Some(x), _) | (None, Some(x)) => x,
                            (None, None) => self.implicit_bond(open.atom, atom),
                        };
                        self.add_bond(open.atom, atom, order, start)?;
                    } else {
                        rings.insert(
                            number,
                            RingOpen {
                                atom,
                                bond: token,
                                offset: start,
                            },
                        );
                    }
                }
                b'[' => {
                    let atom = self.bracket_atom()?;
                    prev = Some(self.attach(atom, prev, pending.take(), start)?);
                }
                _ => {
                    let atom = self.organic_atom()?;
                    prev = Some(self.attach(atom, prev, pending.take(), start)?);
                }
            }
        }
        if let Some((_, offset)) = pending {
            return err(offset, "dangling bond at end of input");
        }
        if let Some((_, offset)) = branches.last() {
            return err(*offset, "unbalanced '('");
        }
        if let Some((number, open)) = rings.iter().next() {
            return err(open.offset, format!("ring bond {number} never closed"));
        }
        if self.atoms.is_empty() {
            return err(0, "no atoms");
        }
        Ok(())
    }

    fn implicit_bond(&self, a: usize, b: usize) -> BondToken {
        let order = if self.atoms[a].aromatic && self.atoms[b].aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        };
        BondToken {
            order,
            stereo: BondStereo::None,
        }
    }

    fn attach(
        &mut self,
        atom: Atom,
        prev: Option<usize>,
        pending: Option<(BondToken, usize)>,
        offset: usize,
    ) -> Result<usize, SmilesError> {
        let idx = self.atoms.len();
        self.atoms.push(atom);
        match (prev, pending) {
            (Some(p), token) => {
                let token = token.map(|(s, _)| s).unwrap_or_else(|| self.implicit_bond(p, idx));
                self.add_bond(p, idx, token, offset)?;
            }
            (None, Some((_, at))) => return err(at, "bond symbol without a preceding atom"),
            (None, None) => {}
        }
        Ok(idx)
    }

    fn add_bond(&mut self, a: usize, b: usize, token: BondToken, offset: usize) -> Result<(), SmilesError> {
        if a == b {
            return err(offset, "ring closure bonds an atom to itself");
        }
        if !self.pairs.insert((a.min(b), a.max(b))) {
            return err(offset, format!("second bond between atoms {} and {}", a + 1, b + 1));
        }
        self.bonds.push(Bond {
            a,
            b,
            order: token.order,
            stereo: token.stereo,
        });
        Ok(())
    }

    fn ring_number(&mut self) -> Result<u32, SmilesError> {
        let start = self.pos;
        if self.peek() == Some(b'%') {
            let digits = self.text.get(self.pos + 1..self.pos + 3);
            match digits {
                Some(d) if d.iter().all(u8::is_ascii_digit) => {
                    self.pos += 3;
                    Ok(u32::from(d[0] - b'0') * 10 + u32::from(d[1] - b'0'))
                }
                _ => err(start, "'%' must be followed by two digits"),
            }
        } else {
            let d = self.text[self.pos];
            self.pos += 1;
            Ok(u32::from(d - b'0'))
        }
    }

    fn organic_atom(&mut self) -> Result<Atom, SmilesError> {
        let start = self.pos;
        let rest = &self.text[self.pos..];
        let (symbol, aromatic, len) = match rest {
            [b'C', b'l', ..] => ("Cl", false, 2),
            [b'B', b'r', ..] => ("Br", false, 2),
            [b'B' | b'C' | b'N' | b'O' | b'P' | b'S' | b'F' | b'I', ..] => {
                (std::str::from_utf8(&rest[..1]).expect("ascii"), false, 1)
            }
            [b'b', ..] => ("B", true, 1),
            [b'c', ..] => ("C", true, 1),
            [b'n', ..] => ("N", true, 1),
            [b'o', ..] => ("O", true, 1),
            [b'p', ..] => ("P", true, 1),
            [b's', ..] => ("S", true, 1),
            [b'*', ..] => ("*", false, 1),
            _ => {
                let ch = std::str::from_utf8(rest)
                    .ok()
                    .and_then(|s| s.chars().next())
                    .unwrap_or('?');
                return err(start, format!("unexpected character '{ch}'"));
            }
        };
        self.pos += len;
        let element = Element::from_symbol(symbol).expect("organic subset symbols are valid");
        let mut atom = Atom::new(element);
        atom.aromatic = aromatic;
        Ok(atom)
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
    }

    fn bracket_atom(&mut self) -> Result<Atom, SmilesError> {
        let open = self.pos;
        self.pos += 1;
        let isotope = match self.number() {
            Some(0) => return err(open + 1, "isotope must be positive"),
            Some(n) => Some(u16::try_from(n).map_err(|_| SmilesError {
                offset: open + 1,
                message: "isotope too large".into(),
            })?),
            None => None,
        };

        let sym_start = self.pos;
        let rest = &self.text[self.pos..];
        let two = rest.get(..2).and_then(|s| std::str::from_utf8(s).ok());
        let one = rest.get(..1).and_then(|s| std::str::from_utf8(s).ok());
        let (element, aromatic, len) = match (one, two) {
            (Some("*"), _) => (Element::WILDCARD, false, 1),
            (_, Some(t @ ("se" | "as" | "te"))) => {
                let upper = format!("{}{}", t[..1].to_ascii_uppercase(), &t[1..]);
                (Element::from_symbol(&upper).expect("valid aromatic"), true, 2)
            }
            (Some(o @ ("b" | "c" | "n" | "o" | "p" | "s")), _) => (
                Element::from_symbol(&o.to_ascii_uppercase()).expect("valid aromatic"),
                true,
                1,
            ),
            (Some(o), t) if o.as_bytes()[0].is_ascii_uppercase() => {
                match t.and_then(Element::from_symbol) {
                    Some(e) if t.unwrap().as_bytes()[1].is_ascii_lowercase() => (e, false, 2),
                    _ => match Element::from_symbol(o) {
                        Some(e) => (e, false, 1),
                        None => return err(sym_start, format!("unknown element '{o}'")),
                    },
                }
            }
            _ => return err(sym_start, "expected element symbol in bracket atom"),
        };
        self.pos += len;

        let mut atom = Atom::new(element);
        atom.aromatic = aromatic;
        atom.isotope = isotope;

        if self.peek() == Some(b'@') {
            self.pos += 1;
            if self.peek() == Some(b'@') {
                self.pos += 1;
                atom.chirality = Some(Chirality::Clockwise);
            } else if self.peek().is_some_and(|c| c.is_ascii_uppercase() && c != b'H') {
                let s = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_uppercase()) {
                    self.pos += 1;
                }
                self.number();
                let class = String::from_utf8_lossy(&self.text[s..self.pos]).into_owned();
                atom.chirality = Some(Chirality::Class(class));
            } else {
                atom.chirality = Some(Chirality::Anticlockwise);
            }
        }

        let mut h = 0u32;
        if self.peek() == Some(b'H') {
            self.pos += 1;
            h = self.number().unwrap_or(1);
        }
        atom.explicit_h = Some(u8::try_from(h).map_err(|_| SmilesError {
            offset: sym_start,
            message: "hydrogen count too large".into(),
        })?);

        let mut charge: i32 = 0;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            if let Some(n) = self.number() {
                charge = unit * n as i32;
            } else {
                charge = unit;
                while self.peek() == Some(sign) {
                    self.pos += 1;
                    charge += unit;
                }
            }
        }
        atom.charge = i8::try_from(charge)
            .ok()
            .filter(|c| c.abs() <= 15)
            .ok_or_else(|| SmilesError {
                offset: sym_start,
                message: format!("charge {charge} out of range"),
            })?;

        if self.peek() == Some(b':') {
            self.pos += 1;
            if self.number().is_none() {
                return err(self.pos, "atom class needs digits");
            }
        }
        if self.peek() != Some(b']') {
            return err(self.pos, "expected ']' to close bracket atom");
        }
        self.pos += 1;
        Ok(atom)
    }
}
