//! Command-line interface: `analyze`, `check` and `examples`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ssmident_core::algebra::Rational;
use ssmident_core::bundled;
use ssmident_core::expr::Expr;
use ssmident_core::ident::{analyze, check_estimable, IdentOptions, Method};
use ssmident_core::kalman::{kf_rank_report, KalmanOptions};
use ssmident_core::model::{to_spectral_form, Model, ParamRange};
use ssmident_core::Error;

use crate::io::{load_candidates, load_model, load_observations};
use crate::report::Output;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "ssmident",
    version,
    about = "Local structural identifiability of linear state-space models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank analysis of a model's exhaustive summary.
    Analyze {
        #[command(flatten)]
        run: RunArgs,
        /// Also test the combinations listed in this file.
        #[arg(long, value_name = "FILE")]
        candidates: Option<PathBuf>,
    },
    /// Test candidate parameter combinations for estimability.
    Check {
        #[command(flatten)]
        run: RunArgs,
        /// One expression per line.
        #[arg(long, value_name = "FILE")]
        candidates: PathBuf,
    },
    /// List the bundled models, or print one.
    Examples { name: Option<String> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Spectral,
    Deterministic,
    Expectation,
    Kalman,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Spectral => Method::Spectral,
            MethodArg::Deterministic => Method::Deterministic,
            MethodArg::Expectation => Method::Expectation,
            MethodArg::Kalman => Method::Kalman,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RangeArg {
    pub name: String,
    pub range: ParamRange,
}

fn parse_constant(text: &str) -> Result<Rational, String> {
    Expr::parse(text)
        .and_then(|e| e.to_mpoly::<&str>(&[]))
        .ok()
        .and_then(|p| p.constant_value())
        .ok_or_else(|| format!("`{text}` is not a constant"))
}

fn parse_range(text: &str) -> Result<RangeArg, String> {
    let (name, bounds) = text.split_once('=').ok_or("expected NAME=LO..HI")?;
    let (lo, hi) = bounds.split_once("..").ok_or("expected NAME=LO..HI")?;
    Ok(RangeArg {
        name: name.trim().to_string(),
        range: ParamRange {
            lo: parse_constant(lo.trim())?,
            hi: parse_constant(hi.trim())?,
        },
    })
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// Model file (`.ssm` or `.kssm`), or the name of a bundled model.
    pub input: PathBuf,
    /// Summary to analyse. Defaults to `kalman` for Kalman-form files with
    /// a deterministic input and `spectral` otherwise.
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Random evaluation points (parameter draws for `kalman`).
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampling range override, e.g. `rho=1/10..1/2`. Repeatable.
    #[arg(long = "range", value_name = "NAME=LO..HI", value_parser = parse_range)]
    pub ranges: Vec<RangeArg>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Number of log-likelihood terms (`kalman`); defaults to the
    /// parameter count.
    #[arg(long)]
    pub kf_count: Option<usize>,
    /// Synthetic data sets per parameter draw (`kalman`).
    #[arg(long)]
    pub data_trials: Option<usize>,
    /// Singular-value cut-off (`kalman`).
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// CSV of observed outputs to use instead of synthetic data (`kalman`).
    #[arg(long, value_name = "FILE")]
    pub observations: Option<PathBuf>,
}

impl RunArgs {
    fn kalman_only_flag(&self) -> Option<&'static str> {
        if self.kf_count.is_some() {
            Some("--kf-count")
        } else if self.data_trials.is_some() {
            Some("--data-trials")
        } else if self.tolerance.is_some() {
            Some("--tolerance")
        } else if self.observations.is_some() {
            Some("--observations")
        } else {
            None
        }
    }
}

fn mismatch(method: Method, reason: &str) -> CliError {
    CliError::Core(Error::MethodMismatch {
        method: method.as_str().to_string(),
        reason: reason.to_string(),
    })
}

/// Runs the analysis and renders it.
pub fn run_analysis(args: &RunArgs, candidates: Option<&PathBuf>) -> Result<String, CliError> {
    let mut model = load_model(&args.input)?;
    for r in &args.ranges {
        model.symbols_mut().set_range(&r.name, r.range.clone())?;
    }
    let method = match (args.method, &model) {
        (Some(m), _) => m.into(),
        (None, Model::Kalman(k)) if k.has_input() => Method::Kalman,
        (None, _) => Method::Spectral,
    };
    if method != Method::Kalman {
        if let Some(flag) = args.kalman_only_flag() {
            return Err(CliError::Usage(format!("{flag} applies only to --method kalman")));
        }
    }
    let output = match (model, method) {
        (Model::Spectral(_), Method::Kalman) => {
            return Err(mismatch(
                method,
                "the model is in spectral form; write it as a Kalman-form (.kssm) model",
            ));
        }
        (Model::Kalman(k), Method::Kalman) => {
            if candidates.is_some() {
                return Err(mismatch(
                    method,
                    "candidate checks need an exact summary; use a spectral, deterministic or expectation analysis",
                ));
            }
            let defaults = KalmanOptions::default();
            let observations = match &args.observations {
                Some(path) => Some(load_observations(path, k.m)?),
                None => None,
            };
            let opts = KalmanOptions {
                seed: args.seed,
                theta_trials: args.trials.unwrap_or(defaults.theta_trials),
                data_trials: args.data_trials.unwrap_or(defaults.data_trials),
                tolerance: args.tolerance,
                count: args.kf_count,
                observations,
            };
            let report = kf_rank_report(&k, &opts)?;
            Output::new(&report, None, None)
        }
        (model, method) => {
            let spec = match model {
                Model::Spectral(s) => s,
                Model::Kalman(k) => to_spectral_form(&k)?,
            };
            let opts = IdentOptions {
                trials: args.trials.unwrap_or(IdentOptions::default().trials),
                seed: args.seed,
                ..IdentOptions::default()
            };
            let (summary, report) = analyze(&spec, method, &opts)?;
            let verdicts = match candidates {
                Some(path) => Some(
                    check_estimable(&summary, &load_candidates(path)?, &opts).map_err(|e| match e {
                        Error::UndeclaredIdentifier { .. } => CliError::Model {
                            path: path.clone(),
                            source: e,
                        },
                        other => other.into(),
                    })?,
                ),
                None => None,
            };
            Output::new(&report, Some(&summary), verdicts.as_deref())
        }
    };
    Ok(match args.format {
        Format::Text => output.to_text(),
        Format::Json => output.to_json(),
    })
}

pub fn run_examples(name: Option<&str>) -> Result<String, CliError> {
    match name {
        None => Ok(bundled::names().map(|n| format!("{n}\n")).collect()),
        Some(n) => bundled::source(n)
            .map(str::to_string)
            .ok_or_else(|| CliError::UnknownExample {
                name: n.to_string(),
                valid: bundled::names().map(str::to_string).collect(),
            }),
    }
}

/// Executes a parsed command line and returns what goes to stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Analyze { run, candidates } => run_analysis(run, candidates.as_ref()),
        Command::Check { run, candidates } => run_analysis(run, Some(candidates)),
        Command::Examples { name } => run_examples(name.as_deref()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ssmident_core::algebra::rational::rat;

    #[test]
    fn range_syntax() {
        let r = parse_range("rho=1/10..0.5").unwrap();
        assert_eq!(r.name, "rho");
        assert_eq!((r.range.lo, r.range.hi), (rat(1, 10), rat(1, 2)));
        assert!(parse_range("rho=a..1").is_err());
        assert!(parse_range("rho=0.1").is_err());
        assert!(parse_range("0.1..0.2").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn check_requires_candidates() {
        assert!(Cli::try_parse_from(["ssmident", "check", "lapwing"]).is_err());
        assert!(Cli::try_parse_from(["ssmident", "analyze", "lapwing", "--format", "yaml"]).is_err());
    }
}
