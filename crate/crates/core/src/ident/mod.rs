//! Derivative matrix of an exhaustive summary, its generic rank and what
//! follows from it: deficiency, left null vectors, individually
//! identifiable parameters and estimable combinations.
//!
//! Everything here is exact. Ranks are computed at seeded random rational
//! points, so a verdict concerns local identifiability at generic
//! parameter values.

pub mod linalg;

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::algebra::{MPoly, Matrix, Rational};
use crate::error::Error;
use crate::expr::Expr;
use crate::model::{ModelSpec, Symbols};
use crate::sampling::{check_ranges, trial_seed, Sampler};
use crate::specden::spectral_summary;
use crate::summary::ExhaustiveSummary;
use crate::transfer::{deterministic_summary, expectation_summary};

pub use linalg::{left_null_space, rank};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Spectral,
    Deterministic,
    Expectation,
    Kalman,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Spectral,
        Method::Deterministic,
        Method::Expectation,
        Method::Kalman,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Deterministic => "deterministic",
            Method::Expectation => "expectation",
            Method::Kalman => "kalman",
        }
    }

    pub fn parse(text: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.as_str() == text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentOptions {
    pub trials: usize,
    pub seed: u64,
    /// Attempts to find a point where a candidate is defined, per trial.
    pub resample_cap: usize,
}

impl Default for IdentOptions {
    fn default() -> Self {
        IdentOptions {
            trials: 5,
            seed: 0,
            resample_cap: 20,
        }
    }
}

/// `p x n` matrix of partial derivatives: entry `(i, j)` is the derivative
/// of summary entry `j` with respect to parameter `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jacobian {
    pub params: Vec<usize>,
    pub entries: Matrix<MPoly>,
}

impl Jacobian {
    pub fn eval(&self, point: &[Rational]) -> Matrix<Rational> {
        self.entries.map(|p| p.eval(point))
    }
}

pub fn jacobian(summary: &ExhaustiveSummary) -> Jacobian {
    let entries = Matrix::from_fn(summary.params.len(), summary.entries.len(), |i, j| {
        summary.entries[j].diff(summary.params[i])
    });
    Jacobian {
        params: summary.params.clone(),
        entries,
    }
}

/// One random evaluation of the derivative matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Trial {
    pub seed: u64,
    /// Values of every symbol, parameters first.
    pub point: Vec<Rational>,
    pub rank: usize,
    /// Seed of the synthetic data set (Kalman analysis only).
    pub data_seed: Option<u64>,
    /// Singular values of the derivative matrix (Kalman analysis only).
    pub singular_values: Vec<f64>,
}

/// Max of the exact rank over `trials` seeded random points.
pub fn generic_rank(j: &Jacobian, symbols: &Symbols, opts: &IdentOptions) -> Result<(usize, Vec<Trial>), Error> {
    check_ranges(symbols)?;
    let trials: Vec<Trial> = (0..opts.trials.max(1))
        .map(|t| {
            let seed = trial_seed(opts.seed, t);
            let point = Sampler::new(seed).point(symbols);
            let rank = linalg::rank(&j.eval(&point));
            Trial {
                seed,
                point,
                rank,
                data_seed: None,
                singular_values: Vec::new(),
            }
        })
        .collect();
    let r = trials.iter().map(|t| t.rank).max().unwrap_or(0);
    Ok((r, trials))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamVerdict {
    pub name: String,
    pub identifiable: bool,
}

/// Left null vectors of the derivative matrix at one sampled point.
#[derive(Clone, Debug, PartialEq)]
pub struct NullBasisSample {
    pub point: Vec<Rational>,
    pub basis: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RankMode {
    Exact,
    /// Singular values above `tolerance` (or the default tolerance when
    /// `None`) count towards the rank.
    Numeric {
        tolerance: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentReport {
    pub model: Option<String>,
    pub method: Method,
    pub mode: RankMode,
    /// Names of all symbols, indexing the sampled points.
    pub symbols: Vec<String>,
    /// Names of the analysed parameters, in derivative-matrix row order.
    pub params: Vec<String>,
    pub summary_len: usize,
    pub rank: usize,
    pub deficiency: usize,
    pub redundant: bool,
    pub per_param: Vec<ParamVerdict>,
    pub null_basis_samples: Vec<NullBasisSample>,
    pub trials: Vec<Trial>,
    /// Rank using more terms than parameters (Kalman analysis with an
    /// explicit term count).
    pub extended_rank: Option<usize>,
}

impl IdentReport {
    pub fn identifiable_params(&self) -> Vec<&str> {
        self.per_param
            .iter()
            .filter(|v| v.identifiable)
            .map(|v| v.name.as_str())
            .collect()
    }
}

fn unit(p: usize, i: usize) -> Vec<Rational> {
    let mut e = alloc::vec![Rational::zero(); p];
    e[i] = Rational::one();
    e
}

/// Builds the full report for a summary.
pub fn deficiency_report(
    summary: &ExhaustiveSummary,
    method: Method,
    opts: &IdentOptions,
) -> Result<IdentReport, Error> {
    let j = jacobian(summary);
    let (r, trials) = generic_rank(&j, &summary.symbols, opts)?;
    let p = j.params.len();
    let mut identifiable = alloc::vec![true; p];
    let mut null_samples = Vec::new();
    for trial in &trials {
        let m = j.eval(&trial.point);
        let local = trial.rank;
        let mut by_rank = alloc::vec![false; p];
        for (i, flag) in by_rank.iter_mut().enumerate() {
            *flag = linalg::rank(&linalg::with_column(&m, &unit(p, i))) == local;
        }
        let basis = left_null_space(&m);
        debug_assert_eq!(basis.len(), p - local);
        for (i, &flag) in by_rank.iter().enumerate() {
            let by_null = basis.iter().all(|a| a[i].is_zero());
            assert_eq!(flag, by_null, "rank test and null space disagree");
            identifiable[i] &= flag;
        }
        null_samples.push(NullBasisSample {
            point: trial.point.clone(),
            basis,
        });
    }
    let names = summary.param_names();
    Ok(IdentReport {
        model: None,
        method,
        mode: RankMode::Exact,
        symbols: summary.symbols.names.clone(),
        params: names.clone(),
        summary_len: summary.len(),
        rank: r,
        deficiency: p - r,
        redundant: r < p,
        per_param: names
            .into_iter()
            .zip(identifiable)
            .map(|(name, identifiable)| ParamVerdict { name, identifiable })
            .collect(),
        null_basis_samples: null_samples,
        trials,
        extended_rank: None,
    })
}

/// Exhaustive summary of `spec` for one of the exact methods.
pub fn summary_for(spec: &ModelSpec, method: Method) -> Result<ExhaustiveSummary, Error> {
    match method {
        Method::Spectral => Ok(spectral_summary(spec)),
        Method::Deterministic => Ok(deterministic_summary(spec, None)),
        Method::Expectation => expectation_summary(spec),
        Method::Kalman => Err(Error::MethodMismatch {
            method: "kalman".into(),
            reason: "the model is in spectral form; Kalman analysis needs a Kalman-form model".into(),
        }),
    }
}

/// Summary plus report in one call.
pub fn analyze(
    spec: &ModelSpec,
    method: Method,
    opts: &IdentOptions,
) -> Result<(ExhaustiveSummary, IdentReport), Error> {
    let summary = summary_for(spec, method)?;
    let mut report = deficiency_report(&summary, method, opts)?;
    report.model = spec.name.clone();
    Ok((summary, report))
}

/// A parameter combination `f(theta)` proposed as estimable.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub text: String,
    pub expr: Expr,
}

impl Candidate {
    pub fn parse(text: &str) -> Result<Candidate, Error> {
        Candidate::parse_at(text, 1)
    }

    /// Parses a candidate found on `line` of a candidate file.
    pub fn parse_at(text: &str, line: usize) -> Result<Candidate, Error> {
        Ok(Candidate {
            text: text.trim().to_string(),
            expr: Expr::parse_at(text, line, 1)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateVerdict {
    pub candidate: String,
    pub estimable: bool,
    /// Points at which the gradient was tested.
    pub points: Vec<Vec<Rational>>,
    /// Indices into `points` where the gradient left the column space.
    pub failures: Vec<usize>,
}

/// Tests whether each candidate's gradient lies in the column space of the
/// derivative matrix at every sampled point.
pub fn check_estimable(
    summary: &ExhaustiveSummary,
    candidates: &[Candidate],
    opts: &IdentOptions,
) -> Result<Vec<CandidateVerdict>, Error> {
    check_ranges(&summary.symbols)?;
    let names = &summary.symbols.names;
    for c in candidates {
        c.expr.check_declared(names)?;
    }
    let j = jacobian(summary);
    candidates
        .iter()
        .map(|c| {
            let mut points = Vec::new();
            let mut failures = Vec::new();
            for t in 0..opts.trials.max(1) {
                let (point, grad) = defined_point(c, summary, opts, t)?;
                let m = j.eval(&point);
                if linalg::rank(&linalg::with_column(&m, &grad)) != linalg::rank(&m) {
                    failures.push(points.len());
                }
                points.push(point);
            }
            Ok(CandidateVerdict {
                candidate: c.text.clone(),
                estimable: failures.is_empty(),
                points,
                failures,
            })
        })
        .collect()
}

/// Draws points for trial `t` until the candidate is defined there.
fn defined_point(
    c: &Candidate,
    summary: &ExhaustiveSummary,
    opts: &IdentOptions,
    t: usize,
) -> Result<(Vec<Rational>, Vec<Rational>), Error> {
    let base = trial_seed(opts.seed, t);
    for attempt in 0..opts.resample_cap.max(1) {
        // the first attempt reuses the rank trial's point
        let seed = if attempt == 0 {
            base
        } else {
            base ^ ((attempt as u64) << 32)
        };
        let point = Sampler::new(seed).point(&summary.symbols);
        match c.expr.eval_dual(&summary.symbols.names, &point, &summary.params) {
            Ok(d) => return Ok((point, d.grad)),
            Err(Error::DivisionByZero(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Candidate {
        candidate: c.text.clone(),
        reason: alloc::format!(
            "undefined (division by zero) at {} sampled points",
            opts.resample_cap.max(1)
        ),
    })
}
