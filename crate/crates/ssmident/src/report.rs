//! JSON and text renderings of analysis results.
//!
//! The JSON types mirror the core report field for field. Rationals are
//! written as `"p/q"` strings so nothing is lost in transit.

use std::fmt::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use ssmident_core::algebra::Rational;
use ssmident_core::ident::{CandidateVerdict, IdentReport, Method, NullBasisSample, ParamVerdict, RankMode, Trial};
use ssmident_core::summary::{ExhaustiveSummary, Part};

use crate::CliError;

pub const FULL_RANK: &str = "FULL RANK (locally identifiable)";

pub fn verdict(report: &IdentReport) -> String {
    if report.redundant {
        format!("PARAMETER REDUNDANT, d = {}", report.deficiency)
    } else {
        FULL_RANK.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModeJson {
    Exact,
    Numeric { tolerance: Option<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamJson {
    pub name: String,
    pub identifiable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullBasisJson {
    pub point: Vec<String>,
    pub basis: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialJson {
    pub seed: u64,
    pub point: Vec<String>,
    pub rank: usize,
    pub data_seed: Option<u64>,
    pub singular_values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub model: Option<String>,
    pub method: String,
    pub mode: ModeJson,
    /// Always "local": verdicts hold at generic parameter values only.
    pub identifiability: String,
    pub verdict: String,
    pub symbols: Vec<String>,
    pub params: Vec<String>,
    pub summary_len: usize,
    pub rank: usize,
    pub deficiency: usize,
    pub redundant: bool,
    pub per_param: Vec<ParamJson>,
    pub null_basis_samples: Vec<NullBasisJson>,
    pub trials: Vec<TrialJson>,
    pub extended_rank: Option<usize>,
}

/// Provenance of one summary entry. `row` and `col` are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub expr: String,
    pub row: usize,
    pub col: usize,
    pub power: i32,
    pub part: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryJson {
    pub kind: String,
    pub params: Vec<String>,
    pub entries: Vec<EntryJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateJson {
    pub candidate: String,
    pub estimable: bool,
    pub points: Vec<Vec<String>>,
    pub failures: Vec<usize>,
}

/// Everything one `analyze` or `check` run prints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Output {
    pub report: ReportJson,
    pub summary: Option<SummaryJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<CandidateJson>>,
}

fn rats(v: &[Rational]) -> Vec<String> {
    v.iter().map(Rational::to_string).collect()
}

fn parse_rats(v: &[String]) -> Result<Vec<Rational>, CliError> {
    v.iter()
        .map(|s| Rational::from_str(s).map_err(|_| CliError::Json(format!("bad rational `{s}`"))))
        .collect()
}

impl From<&IdentReport> for ReportJson {
    fn from(r: &IdentReport) -> Self {
        ReportJson {
            model: r.model.clone(),
            method: r.method.as_str().to_string(),
            mode: match r.mode {
                RankMode::Exact => ModeJson::Exact,
                RankMode::Numeric { tolerance } => ModeJson::Numeric { tolerance },
            },
            identifiability: "local".to_string(),
            verdict: verdict(r),
            symbols: r.symbols.clone(),
            params: r.params.clone(),
            summary_len: r.summary_len,
            rank: r.rank,
            deficiency: r.deficiency,
            redundant: r.redundant,
            per_param: r
                .per_param
                .iter()
                .map(|v| ParamJson {
                    name: v.name.clone(),
                    identifiable: v.identifiable,
                })
                .collect(),
            null_basis_samples: r
                .null_basis_samples
                .iter()
                .map(|s| NullBasisJson {
                    point: rats(&s.point),
                    basis: s.basis.iter().map(|b| rats(b)).collect(),
                })
                .collect(),
            trials: r
                .trials
                .iter()
                .map(|t| TrialJson {
                    seed: t.seed,
                    point: rats(&t.point),
                    rank: t.rank,
                    data_seed: t.data_seed,
                    singular_values: t.singular_values.clone(),
                })
                .collect(),
            extended_rank: r.extended_rank,
        }
    }
}

impl TryFrom<&ReportJson> for IdentReport {
    type Error = CliError;

    fn try_from(j: &ReportJson) -> Result<Self, CliError> {
        let method =
            Method::parse(&j.method).ok_or_else(|| CliError::Json(format!("unknown method `{}`", j.method)))?;
        Ok(IdentReport {
            model: j.model.clone(),
            method,
            mode: match j.mode {
                ModeJson::Exact => RankMode::Exact,
                ModeJson::Numeric { tolerance } => RankMode::Numeric { tolerance },
            },
            symbols: j.symbols.clone(),
            params: j.params.clone(),
            summary_len: j.summary_len,
            rank: j.rank,
            deficiency: j.deficiency,
            redundant: j.redundant,
            per_param: j
                .per_param
                .iter()
                .map(|v| ParamVerdict {
                    name: v.name.clone(),
                    identifiable: v.identifiable,
                })
                .collect(),
            null_basis_samples: j
                .null_basis_samples
                .iter()
                .map(|s| {
                    Ok(NullBasisSample {
                        point: parse_rats(&s.point)?,
                        basis: s.basis.iter().map(|b| parse_rats(b)).collect::<Result<_, _>>()?,
                    })
                })
                .collect::<Result<_, CliError>>()?,
            trials: j
                .trials
                .iter()
                .map(|t| {
                    Ok(Trial {
                        seed: t.seed,
                        point: parse_rats(&t.point)?,
                        rank: t.rank,
                        data_seed: t.data_seed,
                        singular_values: t.singular_values.clone(),
                    })
                })
                .collect::<Result<_, CliError>>()?,
            extended_rank: j.extended_rank,
        })
    }
}

impl From<&ExhaustiveSummary> for SummaryJson {
    fn from(s: &ExhaustiveSummary) -> Self {
        SummaryJson {
            kind: s.kind.as_str().to_string(),
            params: s.param_names(),
            entries: s
                .entry_strings()
                .into_iter()
                .zip(&s.provenance)
                .map(|(expr, p)| EntryJson {
                    expr,
                    row: p.row,
                    col: p.col,
                    power: p.power,
                    part: match p.part {
                        Part::Numerator => "numerator",
                        Part::Denominator => "denominator",
                    }
                    .to_string(),
                })
                .collect(),
        }
    }
}

impl From<&CandidateVerdict> for CandidateJson {
    fn from(v: &CandidateVerdict) -> Self {
        CandidateJson {
            candidate: v.candidate.clone(),
            estimable: v.estimable,
            points: v.points.iter().map(|p| rats(p)).collect(),
            failures: v.failures.clone(),
        }
    }
}

impl Output {
    pub fn new(
        report: &IdentReport,
        summary: Option<&ExhaustiveSummary>,
        candidates: Option<&[CandidateVerdict]>,
    ) -> Self {
        Output {
            report: report.into(),
            summary: summary.map(Into::into),
            candidates: candidates.map(|c| c.iter().map(Into::into).collect()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Json(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let r = &self.report;
        let mut out = String::new();
        let _ = writeln!(out, "model: {}", r.model.as_deref().unwrap_or("(unnamed)"));
        let how = match r.mode {
            ModeJson::Exact => "exact rank over the rationals".to_string(),
            ModeJson::Numeric { tolerance: Some(t) } => format!("numeric (tolerance-based), tolerance {t:e}"),
            ModeJson::Numeric { tolerance: None } => {
                "numeric (tolerance-based), tolerance max(p, T) * eps * largest singular value".to_string()
            }
        };
        let _ = writeln!(out, "method: {}", r.method);
        let _ = writeln!(out, "rank: {how}");
        if let Some(s) = &self.summary {
            let _ = writeln!(out, "\nexhaustive summary ({} entries):", s.entries.len());
            let width = s.entries.len().to_string().len();
            for (i, e) in s.entries.iter().enumerate() {
                let side = if e.part == "numerator" { "num" } else { "den" };
                let _ = writeln!(
                    out,
                    "  k{:<width$} = {}    [{side} ({},{}) s^{}]",
                    i + 1,
                    e.expr,
                    e.row + 1,
                    e.col + 1,
                    e.power
                );
            }
        } else {
            let _ = writeln!(out, "\nexhaustive summary: {} log-likelihood terms", r.summary_len);
        }
        let _ = writeln!(out, "\nparameters: {} ({})", r.params.len(), r.params.join(", "));
        let ranks: Vec<String> = r.trials.iter().map(|t| t.rank.to_string()).collect();
        let _ = writeln!(out, "generic rank: {} of {}", r.rank, r.params.len());
        let _ = writeln!(out, "per-trial ranks: {}", ranks.join(" "));
        if let Some(e) = r.extended_rank {
            let _ = writeln!(out, "rank with all requested terms: {e}");
        }
        let _ = writeln!(out, "deficiency: {}", r.deficiency);
        let _ = writeln!(out, "verdict: {}", r.verdict);
        if !r.redundant {
            let _ = writeln!(out, "the model is not parameter redundant");
        }
        let _ = writeln!(out, "\nlocal identifiability at generic parameter values:");
        let width = r.per_param.iter().map(|v| v.name.len()).max().unwrap_or(0);
        for v in &r.per_param {
            let tag = if v.identifiable {
                "identifiable"
            } else {
                "not identifiable"
            };
            let _ = writeln!(out, "  {:<width$}  {tag}", v.name);
        }
        if let Some(s) = r.null_basis_samples.first() {
            if !s.basis.is_empty() {
                let at: Vec<String> = r
                    .symbols
                    .iter()
                    .zip(&s.point)
                    .map(|(n, v)| format!("{n}={v}"))
                    .collect();
                let _ = writeln!(out, "\nnull space of the derivative matrix at {}:", at.join(", "));
                for (i, b) in s.basis.iter().enumerate() {
                    let _ = writeln!(out, "  alpha{} = ({})", i + 1, b.join(", "));
                }
            }
        }
        if let Some(cands) = &self.candidates {
            let _ = writeln!(out, "\nestimable combinations:");
            let width = cands.iter().map(|c| c.candidate.len()).max().unwrap_or(0);
            for c in cands {
                let tag = if c.estimable { "PASS" } else { "FAIL" };
                let ok = c.points.len() - c.failures.len();
                let _ = writeln!(out, "  {:<width$}  {tag}  {ok}/{} points", c.candidate, c.points.len());
            }
        }
        out
    }
}
