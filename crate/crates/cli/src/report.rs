use std::path::Path;

use chemeval_core::combined::CombinedCounts;
use chemeval_core::detection::Prf;
use clap::ValueEnum;
use serde::Serialize;

use crate::error::CliError;
use crate::inputs::InputDigest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    /// Aligned text table (stats only).
    Table,
}

#[derive(Debug, Serialize)]
pub struct Meta<P: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub parameters: P,
    pub inputs: Vec<InputDigest>,
}

impl<P: Serialize> Meta<P> {
    pub fn new(command: &'static str, parameters: P, inputs: Vec<InputDigest>) -> Meta<P> {
        Meta {
            tool: "chemeval",
            version: env!("CARGO_PKG_VERSION"),
            command,
            parameters,
            inputs,
        }
    }
}

/// Counts plus the ratios derived from them.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Scored {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Scored {
    pub fn new(c: CombinedCounts, prf: Prf) -> Scored {
        Scored {
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
            precision: prf.precision,
            recall: prf.recall,
            f1: prf.f1,
        }
    }

    pub fn from_counts(c: CombinedCounts) -> Scored {
        Scored::new(c, c.prf())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(header).map_err(internal)?;
    for row in rows {
        w.write_record(row).map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

pub fn unsupported(command: &str, format: Format) -> CliError {
    CliError::Input(format!("{command} does not support --format {format:?}").to_lowercase())
}

/// Writes to `out`, or standard output when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
            log::info!("wrote {}", path.display());
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Internal(format!("standard output: {e}")))?;
        }
    }
    Ok(())
}

pub fn num(v: f64) -> String {
    v.to_string()
}
