//! Periodic-table symbols and the valence table used for hydrogen completion.

use std::fmt;

const SYMBOLS: [&str; 119] = [
    "*", "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S",
    "Cl", "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge",
    "As", "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd",
    "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg",
    "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn",
    "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
];

/// A chemical element identified by atomic number; `0` is the wildcard `*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(u8);

impl Element {
    pub const WILDCARD: Element = Element(0);
    pub const H: Element = Element(1);
    pub const B: Element = Element(5);
    pub const C: Element = Element(6);
    pub const N: Element = Element(7);
    pub const O: Element = Element(8);
    pub const F: Element = Element(9);
    pub const SI: Element = Element(14);
    pub const P: Element = Element(15);
    pub const S: Element = Element(16);
    pub const CL: Element = Element(17);
    pub const AS: Element = Element(33);
    pub const SE: Element = Element(34);
    pub const BR: Element = Element(35);
    pub const TE: Element = Element(52);
    pub const I: Element = Element(53);

    pub fn from_atomic_number(z: u8) -> Option<Element> {
        (usize::from(z) < SYMBOLS.len()).then_some(Element(z))
    }

    /// Looks up a symbol with exact capitalisation (`"Cl"`, not `"CL"`).
    pub fn from_symbol(symbol: &str) -> Option<Element> {
        SYMBOLS
            .iter()
            .position(|s| *s == symbol)
            .map(|z| Element(z as u8))
    }

    pub fn atomic_number(self) -> u8 {
        self.0
    }

    pub fn symbol(self) -> &'static str {
        SYMBOLS[usize::from(self.0)]
    }

    pub fn is_wildcard(self) -> bool {
        self.0 == 0
    }

    /// Allowed valences in ascending order, or `None` for elements the table
    /// does not cover (their hydrogen count is never inferred).
    pub fn valences(self) -> Option<&'static [u8]> {
        Some(match self {
            Element::H => &[1],
            Element::B => &[3],
            Element::C | Element::SI => &[4],
            Element::N => &[3],
            Element::O => &[2],
            Element::P | Element::AS => &[3, 5],
            Element::S | Element::SE => &[2, 4, 6],
            Element::F | Element::CL | Element::BR | Element::I => &[1],
            _ => return None,
        })
    }

    /// Valences of an atom carrying `charge`, using the isoelectronic element
    /// of the same period (N+ behaves like C, O- like F, B- like C).
    pub fn charged_valences(self, charge: i8) -> Option<&'static [u8]> {
        if charge == 0 {
            return self.valences();
        }
        let shifted = i16::from(self.0) - i16::from(charge);
        if shifted <= 0 || period(shifted) != period(i16::from(self.0)) {
            return None;
        }
        let iso = Element(shifted as u8);
        // noble-gas neighbours (e.g. F+ -> O is fine, but Ne is not in the table)
        iso.valences()
    }

    /// Members of the SMILES organic subset that may be written without brackets.
    pub fn is_organic_subset(self) -> bool {
        matches!(
            self,
            Element::B
                | Element::C
                | Element::N
                | Element::O
                | Element::P
                | Element::S
                | Element::F
                | Element::CL
                | Element::BR
                | Element::I
        )
    }

    /// Elements with a lowercase aromatic SMILES spelling.
    pub fn has_aromatic_symbol(self) -> bool {
        matches!(
            self,
            Element::B
                | Element::C
                | Element::N
                | Element::O
                | Element::P
                | Element::S
                | Element::SE
                | Element::AS
                | Element::TE
        )
    }
}

fn period(z: i16) -> u8 {
    match z {
        1..=2 => 1,
        3..=10 => 2,
        11..=18 => 3,
        19..=36 => 4,
        37..=54 => 5,
        55..=86 => 6,
        _ => 7,
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbols_round_trip() {
        for z in 0..=118u8 {
            let e = Element::from_atomic_number(z).unwrap();
            assert_eq!(Element::from_symbol(e.symbol()), Some(e));
        }
        assert_eq!(Element::from_symbol("CL"), None);
        assert_eq!(Element::from_symbol("Xx"), None);
    }

    #[test]
    fn charge_adjusted_valences() {
        assert_eq!(Element::N.charged_valences(1), Some(&[4u8][..]));
        assert_eq!(Element::O.charged_valences(-1), Some(&[1u8][..]));
        assert_eq!(Element::O.charged_valences(1), Some(&[3u8][..]));
        assert_eq!(Element::C.charged_valences(-1), Some(&[3u8][..]));
        assert_eq!(Element::C.charged_valences(1), Some(&[3u8][..]));
        assert_eq!(Element::B.charged_valences(-1), Some(&[4u8][..]));
        assert_eq!(Element::S.charged_valences(1), Some(&[3u8, 5][..]));
        assert_eq!(Element::F.charged_valences(-1), None);
    }
}
