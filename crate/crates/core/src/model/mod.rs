//! Model data types, validation and conversion between the Kalman form
//! (separate process and observation noise) and the spectral form (one
//! stacked white-noise input).

mod dsl;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::algebra::rational::rat;
use crate::algebra::{MPoly, Matrix, Rational};
use crate::error::Error;

pub use dsl::{parse_model, print_model};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeDomain {
    Discrete,
    Continuous,
}

/// Open sampling interval for one symbol, used when drawing generic points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamRange {
    pub lo: Rational,
    pub hi: Rational,
}

impl Default for ParamRange {
    fn default() -> Self {
        ParamRange {
            lo: rat(1, 10),
            hi: rat(9, 10),
        }
    }
}

/// The symbols polynomials are written over. Parameters come first and are
/// the unknowns being analysed; `known` symbols (such as initial values)
/// follow and are sampled but never differentiated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbols {
    pub names: Vec<String>,
    pub n_params: usize,
    pub ranges: Vec<ParamRange>,
}

impl Symbols {
    pub fn new(params: Vec<String>, knowns: Vec<String>) -> Self {
        let n_params = params.len();
        let mut names = params;
        names.extend(knowns);
        let ranges = vec![ParamRange::default(); names.len()];
        Symbols {
            names,
            n_params,
            ranges,
        }
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn params(&self) -> &[String] {
        &self.names[..self.n_params]
    }

    pub fn knowns(&self) -> &[String] {
        &self.names[self.n_params..]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Overrides the sampling range of `name`.
    pub fn set_range(&mut self, name: &str, range: ParamRange) -> Result<(), Error> {
        let idx = self
            .index_of(name)
            .ok_or_else(|| Error::Invalid(format!("unknown symbol `{name}` in range override")))?;
        if range.lo >= range.hi {
            return Err(Error::DegenerateRange { name: name.into() });
        }
        self.ranges[idx] = range;
        Ok(())
    }

    fn diagnostics(&self, out: &mut Vec<String>) {
        for (i, n) in self.names.iter().enumerate() {
            if self.names[..i].contains(n) {
                out.push(format!("symbol `{n}` is declared twice"));
            }
        }
        for (n, r) in self.names.iter().zip(&self.ranges) {
            if r.lo >= r.hi {
                out.push(format!("range of `{n}` is empty"));
            }
        }
    }
}

/// Linear time-invariant model `x' = A x + B u`, `y = C x + D u` driven by
/// white noise `u ~ N(0, Q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub name: Option<String>,
    pub symbols: Symbols,
    pub n: usize,
    pub m: usize,
    pub a: Matrix<MPoly>,
    pub b: Matrix<MPoly>,
    pub c: Matrix<MPoly>,
    pub d: Matrix<MPoly>,
    pub q: Matrix<MPoly>,
    pub time_domain: TimeDomain,
    /// Initial state, used only by the expectation summary.
    pub init: Option<Vec<MPoly>>,
}

impl ModelSpec {
    /// Input dimension, taken from the width of `B`.
    pub fn p(&self) -> usize {
        self.b.cols()
    }

    pub fn nvars(&self) -> usize {
        self.symbols.nvars()
    }
}

/// Model with separate process and observation noise and an optional
/// constant deterministic input:
/// `x_{t+1} = A x_t + B u + e_t`, `y_t = C x_t + D u + n_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct KalmanModelSpec {
    pub name: Option<String>,
    pub symbols: Symbols,
    pub n: usize,
    pub m: usize,
    pub a: Matrix<MPoly>,
    pub b: Matrix<MPoly>,
    pub c: Matrix<MPoly>,
    pub d: Matrix<MPoly>,
    pub q: Matrix<MPoly>,
    pub r: Matrix<MPoly>,
    /// Process/observation noise cross-covariance (N x M).
    pub s: Option<Matrix<MPoly>>,
    pub input: Vec<Rational>,
    pub init_state: Vec<Rational>,
    /// Diagonal of the initial state covariance.
    pub init_cov: Vec<Rational>,
}

impl KalmanModelSpec {
    pub fn k(&self) -> usize {
        self.b.cols()
    }

    pub fn has_input(&self) -> bool {
        self.input.iter().any(|u| !u.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Spectral(ModelSpec),
    Kalman(KalmanModelSpec),
}

impl Model {
    pub fn name(&self) -> Option<&str> {
        match self {
            Model::Spectral(s) => s.name.as_deref(),
            Model::Kalman(k) => k.name.as_deref(),
        }
    }

    pub fn symbols(&self) -> &Symbols {
        match self {
            Model::Spectral(s) => &s.symbols,
            Model::Kalman(k) => &k.symbols,
        }
    }

    pub fn symbols_mut(&mut self) -> &mut Symbols {
        match self {
            Model::Spectral(s) => &mut s.symbols,
            Model::Kalman(k) => &mut k.symbols,
        }
    }
}

fn check_shape(out: &mut Vec<String>, label: &str, m: &Matrix<MPoly>, rows: (usize, &str), cols: (usize, &str)) {
    if m.rows() != rows.0 {
        out.push(format!("{label} has {} rows, expected {}={}", m.rows(), rows.1, rows.0));
    }
    if m.cols() != cols.0 {
        out.push(format!(
            "{label} has {} columns, expected {}={}",
            m.cols(),
            cols.1,
            cols.0
        ));
    }
}

fn check_symmetric(out: &mut Vec<String>, label: &str, m: &Matrix<MPoly>) {
    if !m.is_square() {
        return;
    }
    for i in 0..m.rows() {
        for j in (i + 1)..m.cols() {
            if m[(i, j)] != m[(j, i)] {
                out.push(format!(
                    "{label} is not symmetric: entry ({},{}) differs from ({},{})",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                ));
            }
        }
    }
}

fn check_vars(out: &mut Vec<String>, label: &str, m: &Matrix<MPoly>, nvars: usize) {
    if m.iter().any(|p| p.nvars() != nvars) {
        out.push(format!("{label} has entries over the wrong symbol list"));
    }
}

/// Returns human-readable diagnostics; empty iff the model is well formed.
pub fn validate_model(spec: &ModelSpec) -> Vec<String> {
    let mut out = Vec::new();
    spec.symbols.diagnostics(&mut out);
    if spec.m == 0 {
        out.push("output dimension must be positive".into());
    }
    let p = spec.p();
    check_shape(&mut out, "A", &spec.a, (spec.n, "N"), (spec.n, "N"));
    check_shape(&mut out, "B", &spec.b, (spec.n, "N"), (p, "P"));
    check_shape(&mut out, "C", &spec.c, (spec.m, "M"), (spec.n, "N"));
    check_shape(&mut out, "D", &spec.d, (spec.m, "M"), (p, "P"));
    check_shape(&mut out, "Q", &spec.q, (p, "P"), (p, "P"));
    check_symmetric(&mut out, "Q", &spec.q);
    let nv = spec.nvars();
    for (label, m) in [
        ("A", &spec.a),
        ("B", &spec.b),
        ("C", &spec.c),
        ("D", &spec.d),
        ("Q", &spec.q),
    ] {
        check_vars(&mut out, label, m, nv);
    }
    if let Some(init) = &spec.init {
        if init.len() != spec.n {
            out.push(format!("init has {} entries, expected N={}", init.len(), spec.n));
        }
    }
    out
}

pub fn validate_kalman_model(spec: &KalmanModelSpec) -> Vec<String> {
    let mut out = Vec::new();
    spec.symbols.diagnostics(&mut out);
    if spec.m == 0 {
        out.push("output dimension must be positive".into());
    }
    let k = spec.k();
    check_shape(&mut out, "A", &spec.a, (spec.n, "N"), (spec.n, "N"));
    check_shape(&mut out, "B", &spec.b, (spec.n, "N"), (k, "K"));
    check_shape(&mut out, "C", &spec.c, (spec.m, "M"), (spec.n, "N"));
    check_shape(&mut out, "D", &spec.d, (spec.m, "M"), (k, "K"));
    check_shape(&mut out, "Q", &spec.q, (spec.n, "N"), (spec.n, "N"));
    check_shape(&mut out, "R", &spec.r, (spec.m, "M"), (spec.m, "M"));
    check_symmetric(&mut out, "Q", &spec.q);
    check_symmetric(&mut out, "R", &spec.r);
    if let Some(s) = &spec.s {
        check_shape(&mut out, "S", s, (spec.n, "N"), (spec.m, "M"));
    }
    if spec.input.len() != k {
        out.push(format!("input has {} entries, expected K={k}", spec.input.len()));
    }
    if spec.init_state.len() != spec.n {
        out.push(format!(
            "init_state has {} entries, expected N={}",
            spec.init_state.len(),
            spec.n
        ));
    }
    if spec.init_cov.len() != spec.n {
        out.push(format!(
            "init_cov has {} entries, expected N={}",
            spec.init_cov.len(),
            spec.n
        ));
    }
    if spec.init_cov.iter().any(|v| v <= &Rational::zero()) {
        out.push("init_cov entries must be positive".into());
    }
    out
}

fn identity(n: usize, nvars: usize) -> Matrix<MPoly> {
    Matrix::from_fn(n, n, |i, j| if i == j { MPoly::one(nvars) } else { MPoly::zero(nvars) })
}

/// Rewrites a zero-input Kalman-form model as a spectral-form model with
/// stacked input `u = (process noise, observation noise)`.
pub fn to_spectral_form(k: &KalmanModelSpec) -> Result<ModelSpec, Error> {
    if k.has_input() {
        return Err(Error::NonzeroInput);
    }
    let diags = validate_kalman_model(k);
    if !diags.is_empty() {
        return Err(Error::InvalidModel(diags));
    }
    let (n, m) = (k.n, k.m);
    let nv = k.symbols.nvars();
    let zero = || MPoly::zero(nv);
    let id_n = identity(n, nv);
    let id_m = identity(m, nv);
    let b = Matrix::from_fn(n, n + m, |i, j| if j < n { id_n[(i, j)].clone() } else { zero() });
    let d = Matrix::from_fn(m, n + m, |i, j| if j >= n { id_m[(i, j - n)].clone() } else { zero() });
    let q = Matrix::from_fn(n + m, n + m, |i, j| match (i < n, j < n) {
        (true, true) => k.q[(i, j)].clone(),
        (false, false) => k.r[(i - n, j - n)].clone(),
        (true, false) => k.s.as_ref().map_or_else(zero, |s| s[(i, j - n)].clone()),
        (false, true) => k.s.as_ref().map_or_else(zero, |s| s[(j, i - n)].clone()),
    });
    Ok(ModelSpec {
        name: k.name.clone(),
        symbols: k.symbols.clone(),
        n,
        m,
        a: k.a.clone(),
        b,
        c: k.c.clone(),
        d,
        q,
        time_domain: TimeDomain::Discrete,
        init: None,
    })
}

/// Kalman-form defaults: zero initial state and identity initial covariance.
pub fn default_init(n: usize) -> (Vec<Rational>, Vec<Rational>) {
    (vec![Rational::zero(); n], vec![Rational::one(); n])
}
