use serde::{Deserialize, Serialize};

use super::load::GroundTruth;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub dataset: String,
    pub n_pages: usize,
    pub n_molecules: usize,
    pub n_reactions: usize,
}

pub fn corpus_stats(corpus: &GroundTruth) -> CorpusStats {
    CorpusStats {
        dataset: corpus.dataset.clone(),
        n_pages: corpus.pages.len(),
        n_molecules: corpus.pages.iter().map(|p| p.molecules.len()).sum(),
        n_reactions: corpus.pages.iter().map(|p| p.reactions.len()).sum(),
    }
}

/// `2482` -> `"2,482"`.
pub fn thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

/// One row per dataset, right-aligned counts with thousands separators.
pub fn stats_table(rows: &[CorpusStats]) -> String {
    let header = ["Dataset", "Pages", "Molecules", "Reactions"];
    let cells: Vec<[String; 4]> = rows
        .iter()
        .map(|r| {
            [
                r.dataset.clone(),
                thousands(r.n_pages),
                thousands(r.n_molecules),
                thousands(r.n_reactions),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = format!(
        "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$}\n",
        header[0],
        header[1],
        header[2],
        header[3],
        w0 = widths[0],
        w1 = widths[1],
        w2 = widths[2],
        w3 = widths[3]
    );
    for row in &cells {
        out.push_str(&format!(
            "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$}\n",
            row[0],
            row[1],
            row[2],
            row[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
            w3 = widths[3]
        ));
    }
    out
}
