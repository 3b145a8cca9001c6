//! Reading model files, candidate lists and observation CSVs.

use std::fs;
use std::path::Path;

use ssmident_core::bundled;
use ssmident_core::ident::Candidate;
use ssmident_core::model::{parse_model, Model};

use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a model file. A bare bundled-model name is accepted when no such
/// file exists.
pub fn load_model(path: &Path) -> Result<Model, CliError> {
    let text = match read(path) {
        Ok(t) => t,
        Err(e) => {
            let bare = path.components().count() == 1;
            match path.to_str().and_then(bundled::source) {
                Some(t) if bare => t.to_string(),
                _ => return Err(e),
            }
        }
    };
    parse_model(&text).map_err(|source| CliError::Model {
        path: path.to_path_buf(),
        source,
    })
}

/// One candidate expression per line; blank lines and `#` comments are
/// skipped.
pub fn parse_candidates(text: &str) -> Result<Vec<Candidate>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if !line.is_empty() {
            out.push(Candidate::parse_at(line, i + 1)?);
        }
    }
    Ok(out)
}

pub fn load_candidates(path: &Path) -> Result<Vec<Candidate>, CliError> {
    parse_candidates(&read(path)?).map_err(|e| match e {
        CliError::Core(source) => CliError::Model {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

/// Observation table: one row per time step, one column per output. A
/// first row that is not numeric is taken as a header.
pub fn parse_observations(text: &str, outputs: usize) -> Result<Vec<Vec<f64>>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => {
                if row.len() != outputs {
                    return Err(format!(
                        "row {} has {} values, the model has {outputs} outputs",
                        i + 1,
                        row.len()
                    ));
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(format!("row {} contains a non-finite value", i + 1));
                }
                rows.push(row);
            }
            Err(_) if i == 0 => {}
            Err(e) => return Err(format!("row {}: {e}", i + 1)),
        }
    }
    Ok(rows)
}

pub fn load_observations(path: &Path, outputs: usize) -> Result<Vec<Vec<f64>>, CliError> {
    parse_observations(&read(path)?, outputs).map_err(|message| CliError::Observations {
        path: path.to_path_buf(),
        message,
    })
}
