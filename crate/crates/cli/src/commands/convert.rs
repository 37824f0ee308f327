use chemeval_core::chem::{canonical_key, fingerprint, tanimoto, NormalizedMolecule, DEFAULT_NBITS, DEFAULT_RADIUS};
use chemeval_core::combined::{conversion_accuracy, ConversionAccuracy};
use chemeval_core::evaluate::conversion_pairs;
use serde::Serialize;

use super::EvalArgs;
use crate::error::CliError;
use crate::inputs::datasets;
use crate::report::{emit, num, to_csv, to_json, unsupported, Format, Meta};

type Pair = (NormalizedMolecule, Option<NormalizedMolecule>);

#[derive(Serialize)]
struct Parameters {
    fingerprint_radius: u32,
    fingerprint_bits: usize,
}

#[derive(Serialize)]
struct Miss {
    page_id: String,
    id: String,
    gt_key: String,
    /// Canonical key of the prediction, absent when none could be read.
    pred_key: Option<String>,
    /// "missing", "unreadable" or "different".
    reason: &'static str,
    detail: Option<String>,
    tanimoto: f64,
}

#[derive(Serialize)]
struct DatasetBlock {
    dataset: String,
    #[serde(flatten)]
    accuracy: ConversionAccuracy,
    mismatches: Vec<Miss>,
}

#[derive(Serialize)]
struct Report {
    meta: Meta<Parameters>,
    datasets: Vec<DatasetBlock>,
    overall: ConversionAccuracy,
}

fn similarity(a: &NormalizedMolecule, b: &NormalizedMolecule) -> f64 {
    let fa = fingerprint(a, DEFAULT_RADIUS, DEFAULT_NBITS);
    let fb = fingerprint(b, DEFAULT_RADIUS, DEFAULT_NBITS);
    tanimoto(&fa, &fb).unwrap_or(0.0)
}

pub fn run(args: &EvalArgs) -> Result<(), CliError> {
    if args.format == Format::Table {
        return Err(unsupported("convert", args.format));
    }
    let (sets, inputs) = datasets(&args.gt, &args.pred)?;
    let mut blocks = Vec::with_capacity(sets.len());
    let mut all: Vec<Pair> = Vec::new();
    for set in &sets {
        let aligned = set.pages()?;
        let mut pairs: Vec<Pair> = Vec::new();
        let mut mismatches = Vec::new();
        for page in &aligned {
            let (g, p) = page;
            let page_pairs = conversion_pairs(std::slice::from_ref(page)).map_err(|e| CliError::from(e).in_dataset(&set.label))?;
            for (entry, (gt, pred)) in g.molecules.iter().zip(&page_pairs) {
                let gt_key = canonical_key(gt);
                let pred_key = pred.as_ref().map(canonical_key);
                if pred_key.as_ref() == Some(&gt_key) {
                    continue;
                }
                let source = p.molecules.iter().find(|m| m.id.as_deref() == Some(entry.id.as_str()));
                let (reason, detail) = match (source, pred) {
                    (None, _) => ("missing", None),
                    (Some(m), None) => ("unreadable", m.structure.as_ref().err().cloned()),
                    (Some(_), Some(_)) => ("different", None),
                };
                mismatches.push(Miss {
                    page_id: g.page_id.clone(),
                    id: entry.id.clone(),
                    gt_key: gt_key.into_string(),
                    pred_key: pred_key.map(|k| k.into_string()),
                    reason,
                    detail,
                    tanimoto: pred.as_ref().map_or(0.0, |m| similarity(gt, m)),
                });
            }
            pairs.extend(page_pairs);
        }
        let accuracy = conversion_accuracy(&pairs).map_err(|e| CliError::from(e).in_dataset(&set.label))?;
        all.extend(pairs);
        blocks.push(DatasetBlock {
            dataset: set.label.clone(),
            accuracy,
            mismatches,
        });
    }
    let overall = conversion_accuracy(&all)?;

    let text = match args.format {
        Format::Json => to_json(&Report {
            meta: Meta::new(
                "convert",
                Parameters {
                    fingerprint_radius: DEFAULT_RADIUS,
                    fingerprint_bits: DEFAULT_NBITS,
                },
                inputs,
            ),
            datasets: blocks,
            overall,
        })?,
        _ => {
            let row = |label: &str, a: &ConversionAccuracy| {
                vec![
                    label.to_string(),
                    a.pairs.to_string(),
                    a.matched.to_string(),
                    num(a.smiles_match_rate),
                    num(a.mean_tanimoto),
                ]
            };
            let mut rows: Vec<Vec<String>> = blocks.iter().map(|b| row(&b.dataset, &b.accuracy)).collect();
            rows.push(row("overall", &overall));
            to_csv(&["dataset", "pairs", "matched", "smiles_match_rate", "mean_tanimoto"], &rows)?
        }
    };
    emit(args.out.as_deref(), &text)
}
