use std::path::{Path, PathBuf};

use chemeval_core::corpus::{align, parse_ground_truth, parse_predictions, GroundTruth, PageAnnotation, PagePrediction, Predictions};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub role: &'static str,
    pub path: String,
    pub sha256: String,
}

fn read(path: &Path, role: &'static str) -> Result<(String, InputDigest), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let digest = InputDigest {
        role,
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    let text = String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{}: not valid UTF-8", path.display())))?;
    Ok((text, digest))
}

pub fn ground_truth(path: &Path) -> Result<(GroundTruth, InputDigest), CliError> {
    let (text, digest) = read(path, "gt")?;
    log::info!("loading ground truth {}", path.display());
    let corpus = parse_ground_truth(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok((corpus, digest))
}

pub fn predictions(path: &Path) -> Result<(Predictions, InputDigest), CliError> {
    let (text, digest) = read(path, "pred")?;
    log::info!("loading predictions {}", path.display());
    let corpus = parse_predictions(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok((corpus, digest))
}

/// A ground-truth file and the prediction file given in the same position.
pub struct Dataset {
    pub label: String,
    pub gt: GroundTruth,
    pub pred: Predictions,
}

impl Dataset {
    pub fn pages(&self) -> Result<Vec<(&PageAnnotation, &PagePrediction)>, CliError> {
        align(&self.gt, &self.pred).map_err(|e| CliError::Input(format!("dataset {}: {e}", self.label)))
    }
}

pub fn datasets(gt: &[PathBuf], pred: &[PathBuf]) -> Result<(Vec<Dataset>, Vec<InputDigest>), CliError> {
    if gt.is_empty() {
        return Err(CliError::Input("at least one --gt file is required".into()));
    }
    if gt.len() != pred.len() {
        return Err(CliError::Input(format!(
            "{} --gt files but {} --pred files; give one prediction file per ground-truth file",
            gt.len(),
            pred.len()
        )));
    }
    let mut out = Vec::with_capacity(gt.len());
    let mut digests = Vec::with_capacity(2 * gt.len());
    for (g, p) in gt.iter().zip(pred) {
        let (gt, gd) = ground_truth(g)?;
        let (pred, pd) = predictions(p)?;
        if gt.dataset != pred.dataset {
            log::warn!(
                "dataset label differs: {} has '{}', {} has '{}'; using the ground-truth label",
                g.display(),
                gt.dataset,
                p.display(),
                pred.dataset
            );
        }
        digests.push(gd);
        digests.push(pd);
        out.push(Dataset {
            label: gt.dataset.clone(),
            gt,
            pred,
        });
    }
    Ok((out, digests))
}
