//! File handling, reports and the command-line front end for
//! `ssmident-core`.

pub mod cli;
pub mod io;
pub mod report;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", .path.display())]
    Read { path: PathBuf, source: std::io::Error },

    #[error("{}", model_message(.path, .source))]
    Model {
        path: PathBuf,
        source: ssmident_core::Error,
    },

    #[error("{0}")]
    Core(#[from] ssmident_core::Error),

    #[error("{}: {message}", .path.display())]
    Observations { path: PathBuf, message: String },

    #[error("unknown example `{name}`; valid names: {}", .valid.join(", "))]
    UnknownExample { name: String, valid: Vec<String> },

    #[error("{0}")]
    Usage(String),

    #[error("invalid report JSON: {0}")]
    Json(String),
}

fn model_message(path: &std::path::Path, e: &ssmident_core::Error) -> String {
    use ssmident_core::Error::{Syntax, UndeclaredIdentifier};
    match e {
        // these already start with `line:col:`
        Syntax { .. } | UndeclaredIdentifier { .. } => format!("{}:{e}", path.display()),
        _ => format!("{}: {e}", path.display()),
    }
}
