//! Kalman-filter exhaustive summary: per-step terms
//! `l_t = ln det P_t + z_t' P_t^-1 z_t` of minus twice the log-likelihood,
//! differentiated in forward mode and ranked numerically.
//!
//! Unlike the symbolic methods this path is floating point, so its verdict
//! depends on a singular-value tolerance.

pub mod dual;

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::rational::to_f64;
use crate::algebra::{matrix::matmul, MPoly, Matrix};
use crate::error::Error;
use crate::ident::{IdentReport, Method, ParamVerdict, RankMode, Trial};
use crate::model::{validate_kalman_model, KalmanModelSpec};
use crate::sampling::{check_ranges, trial_seed, Sampler};

pub use dual::Dual;

/// Filter state before observing `y_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct KfState {
    pub x_pred: Vec<Dual>,
    pub p_pred: Matrix<Dual>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KfRun {
    /// `l_1 .. l_count`.
    pub terms: Vec<Dual>,
    /// Largest relative asymmetry of the updated covariance seen before it
    /// was symmetrized.
    pub max_asymmetry: f64,
}

fn check_supported(spec: &KalmanModelSpec) -> Result<(), Error> {
    let diags = validate_kalman_model(spec);
    if !diags.is_empty() {
        return Err(Error::InvalidModel(diags));
    }
    if spec.s.is_some() {
        return Err(Error::MethodMismatch {
            method: "kalman".into(),
            reason: "correlated process and observation noise (block S) is not supported by the filter".into(),
        });
    }
    Ok(())
}

fn dual_matrix(m: &Matrix<MPoly>, point: &[Dual]) -> Matrix<Dual> {
    m.map(|p| p.eval_with(point))
}

fn mm(a: &Matrix<Dual>, b: &Matrix<Dual>) -> Matrix<Dual> {
    matmul(a, b, Dual::zero)
}

fn add(a: &Matrix<Dual>, b: &Matrix<Dual>) -> Matrix<Dual> {
    Matrix::from_fn(a.rows(), a.cols(), |i, j| &a[(i, j)] + &b[(i, j)])
}

fn column(v: &[Dual]) -> Matrix<Dual> {
    Matrix::from_fn(v.len(), 1, |i, _| v[i].clone())
}

fn symmetrize(m: &mut Matrix<Dual>) -> f64 {
    let n = m.rows();
    let scale = m.iter().fold(1.0f64, |acc, x| acc.max(x.re.abs()));
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((m[(i, j)].re - m[(j, i)].re).abs() / scale);
            let avg = &(&m[(i, j)] + &m[(j, i)]) * &Dual::constant(0.5);
            m[(i, j)] = avg.clone();
            m[(j, i)] = avg;
        }
    }
    worst
}

/// Lower Cholesky factor, or `None` if `p` is not numerically positive
/// definite.
fn cholesky(p: &Matrix<Dual>) -> Option<Matrix<Dual>> {
    let n = p.rows();
    let scale = (0..n).fold(0.0f64, |acc, i| acc.max(p[(i, i)].re.abs()));
    let mut l = Matrix::from_fn(n, n, |_, _| Dual::zero());
    for j in 0..n {
        let mut d = p[(j, j)].clone();
        for k in 0..j {
            d = &d - &(&l[(j, k)] * &l[(j, k)]);
        }
        if d.re.is_nan() || d.re <= scale * 1e-14 || !d.re.is_finite() {
            return None;
        }
        let ljj = d.sqrt();
        for i in j + 1..n {
            let mut v = p[(i, j)].clone();
            for k in 0..j {
                v = &v - &(&l[(i, k)] * &l[(j, k)]);
            }
            l[(i, j)] = &v / &ljj;
        }
        l[(j, j)] = ljj;
    }
    Some(l)
}

/// Solves `L L' x = b`.
fn chol_solve(l: &Matrix<Dual>, b: &[Dual]) -> Vec<Dual> {
    let n = l.rows();
    let mut y: Vec<Dual> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = b[i].clone();
        for (k, yk) in y.iter().enumerate() {
            v = &v - &(&l[(i, k)] * yk);
        }
        y.push(&v / &l[(i, i)]);
    }
    let mut x = alloc::vec![Dual::zero(); n];
    for i in (0..n).rev() {
        let mut v = y[i].clone();
        for k in i + 1..n {
            v = &v - &(&l[(k, i)] * &x[k]);
        }
        x[i] = &v / &l[(i, i)];
    }
    x
}

/// Symbol values with derivative seeds on the parameters.
fn seeded_point(spec: &KalmanModelSpec, theta: &[f64]) -> Vec<Dual> {
    let p = spec.symbols.n_params;
    theta
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if i < p {
                Dual::variable(v, i, p)
            } else {
                Dual::constant(v)
            }
        })
        .collect()
}

/// Runs the filter over the first `count` observations. `theta` holds a
/// value for every symbol, parameters first.
pub fn kf_run(spec: &KalmanModelSpec, theta: &[f64], y: &[Vec<f64>], count: usize) -> Result<KfRun, Error> {
    check_supported(spec)?;
    if y.len() < count {
        return Err(Error::TooFewObservations {
            needed: count,
            got: y.len(),
        });
    }
    let point = seeded_point(spec, theta);
    let a = dual_matrix(&spec.a, &point);
    let b = dual_matrix(&spec.b, &point);
    let c = dual_matrix(&spec.c, &point);
    let d = dual_matrix(&spec.d, &point);
    let q = dual_matrix(&spec.q, &point);
    let r = dual_matrix(&spec.r, &point);
    let ct = c.transpose();
    let at = a.transpose();
    let u = column(&spec.input.iter().map(|v| Dual::constant(to_f64(v))).collect::<Vec<_>>());
    let bu = mm(&b, &u);
    let du = mm(&d, &u);
    let (n, m) = (spec.n, spec.m);

    let mut state = KfState {
        x_pred: spec.init_state.iter().map(|v| Dual::constant(to_f64(v))).collect(),
        p_pred: Matrix::from_fn(n, n, |i, j| {
            if i == j {
                Dual::constant(to_f64(&spec.init_cov[i]))
            } else {
                Dual::zero()
            }
        }),
    };
    let mut terms = Vec::with_capacity(count);
    let mut max_asymmetry = 0.0f64;
    for (t, yt) in y.iter().take(count).enumerate() {
        let step = t + 1;
        if yt.len() != m {
            return Err(Error::Invalid(alloc::format!(
                "observation {step} has {} values, expected {m}",
                yt.len()
            )));
        }
        let cx = mm(&c, &column(&state.x_pred));
        let z: Vec<Dual> = (0..m)
            .map(|i| &(&Dual::constant(yt[i]) - &cx[(i, 0)]) - &du[(i, 0)])
            .collect();
        let sct = mm(&state.p_pred, &ct);
        let mut pt = add(&mm(&c, &sct), &r);
        symmetrize(&mut pt);
        let l = cholesky(&pt).ok_or(Error::SingularInnovation { step })?;
        let logdet = (0..m).fold(Dual::zero(), |acc, i| &acc + &(&l[(i, i)].ln() * &Dual::constant(2.0)));
        let pinv_z = chol_solve(&l, &z);
        let quad = z.iter().zip(&pinv_z).fold(Dual::zero(), |acc, (a, b)| &acc + &(a * b));
        let term = &logdet + &quad;
        if !term.is_finite() {
            return Err(Error::FilterDivergence {
                step,
                reason: String::from("non-finite likelihood term"),
            });
        }
        terms.push(term);

        // K = Sigma C' P^-1, built column by column from P^-1 (C Sigma)
        let csig = sct.transpose();
        let mut kt = Matrix::from_fn(m, n, |_, _| Dual::zero());
        for j in 0..n {
            let col: Vec<Dual> = (0..m).map(|i| csig[(i, j)].clone()).collect();
            let sol = chol_solve(&l, &col);
            for i in 0..m {
                kt[(i, j)] = sol[i].clone();
            }
        }
        let k = kt.transpose();
        let kz = mm(&k, &column(&z));
        let x_upd: Vec<Dual> = (0..n).map(|i| &state.x_pred[i] + &kz[(i, 0)]).collect();
        let kc = mm(&k, &c);
        let i_kc = Matrix::from_fn(n, n, |i, j| {
            let id = if i == j { Dual::one() } else { Dual::zero() };
            &id - &kc[(i, j)]
        });
        let mut p_upd = mm(&i_kc, &state.p_pred);
        max_asymmetry = max_asymmetry.max(symmetrize(&mut p_upd));

        let ax = mm(&a, &column(&x_upd));
        let x_next = (0..n).map(|i| &ax[(i, 0)] + &bu[(i, 0)]).collect();
        let mut p_next = add(&mm(&mm(&a, &p_upd), &at), &q);
        symmetrize(&mut p_next);
        if !p_next.iter().all(Dual::is_finite) {
            return Err(Error::FilterDivergence {
                step,
                reason: String::from("non-finite state covariance"),
            });
        }
        state = KfState {
            x_pred: x_next,
            p_pred: p_next,
        };
    }
    Ok(KfRun { terms, max_asymmetry })
}

/// `l_1 .. l_count` with derivatives with respect to every parameter.
pub fn kf_loglik_terms(
    spec: &KalmanModelSpec,
    theta: &[f64],
    y: &[Vec<f64>],
    count: usize,
) -> Result<Vec<Dual>, Error> {
    kf_run(spec, theta, y, count).map(|r| r.terms)
}

fn eval_f64(m: &Matrix<MPoly>, theta: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].eval_with(theta))
}

/// Symmetric square root of a positive semidefinite matrix.
fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let roots = eig.eigenvalues.map(|v| libm::sqrt(v.max(0.0)));
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, 1, |_, _| StandardNormal.sample(rng))
}

/// Draws `len` observations from the model at `theta` (all symbols).
pub fn simulate(spec: &KalmanModelSpec, theta: &[f64], len: usize, seed: u64) -> Result<Vec<Vec<f64>>, Error> {
    check_supported(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = eval_f64(&spec.a, theta);
    let b = eval_f64(&spec.b, theta);
    let c = eval_f64(&spec.c, theta);
    let d = eval_f64(&spec.d, theta);
    let q_half = psd_sqrt(&eval_f64(&spec.q, theta));
    let r_half = psd_sqrt(&eval_f64(&spec.r, theta));
    let u = DMatrix::from_fn(spec.input.len(), 1, |i, _| to_f64(&spec.input[i]));
    let bu = &b * &u;
    let du = &d * &u;
    let mean0 = DMatrix::from_fn(spec.n, 1, |i, _| to_f64(&spec.init_state[i]));
    let sd0 = DMatrix::from_fn(spec.n, 1, |i, _| libm::sqrt(to_f64(&spec.init_cov[i]).max(0.0)));
    let mut x = mean0 + sd0.component_mul(&normals(&mut rng, spec.n));
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let y = &c * &x + &du + &r_half * normals(&mut rng, spec.m);
        out.push(y.iter().copied().collect());
        x = &a * &x + &bu + &q_half * normals(&mut rng, spec.n);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KalmanOptions {
    pub seed: u64,
    pub theta_trials: usize,
    pub data_trials: usize,
    /// Singular values at or below this count as zero. Default:
    /// `max(p, count) * eps * largest singular value`.
    pub tolerance: Option<f64>,
    /// Number of likelihood terms; defaults to the parameter count.
    pub count: Option<usize>,
    /// Observed data to use instead of synthetic draws.
    pub observations: Option<Vec<Vec<f64>>>,
}

impl Default for KalmanOptions {
    fn default() -> Self {
        KalmanOptions {
            seed: 0,
            theta_trials: 3,
            data_trials: 3,
            tolerance: None,
            count: None,
            observations: None,
        }
    }
}

/// Singular values of a dense row-major matrix, largest first.
pub fn singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Vec::new();
    }
    let m = DMatrix::from_fn(r, c, |i, j| rows[i][j]);
    let mut sv: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above the tolerance.
pub fn numeric_rank(rows: &[Vec<f64>], tolerance: Option<f64>) -> (usize, Vec<f64>) {
    let sv = singular_values(rows);
    let dim = rows.len().max(rows.first().map_or(0, Vec::len));
    let tol = tolerance.unwrap_or_else(|| dim as f64 * f64::EPSILON * sv.first().copied().unwrap_or(0.0));
    (sv.iter().filter(|&&s| s > tol).count(), sv)
}

/// `p x count` derivative matrix of the terms: row `i` holds the
/// derivatives with respect to parameter `i`.
pub fn term_jacobian(terms: &[Dual], p: usize) -> Vec<Vec<f64>> {
    (0..p).map(|i| terms.iter().map(|t| t.d(i)).collect()).collect()
}

fn with_unit_column(rows: &[Vec<f64>], i: usize) -> Vec<Vec<f64>> {
    rows.iter()
        .enumerate()
        .map(|(r, row)| {
            let mut row = row.clone();
            row.push(if r == i { 1.0 } else { 0.0 });
            row
        })
        .collect()
}

/// Seed of data draw `d` for the theta trial seeded with `theta_seed`.
pub fn data_seed(theta_seed: u64, d: usize) -> u64 {
    theta_seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(d as u64 + 1)
}

/// Rank of the derivative matrix of `(l_1, .., l_p)` over several parameter
/// points and data sets.
pub fn kf_rank_report(spec: &KalmanModelSpec, opts: &KalmanOptions) -> Result<IdentReport, Error> {
    check_supported(spec)?;
    check_ranges(&spec.symbols)?;
    let p = spec.symbols.n_params;
    let count = opts.count.unwrap_or(p);
    if count < p {
        return Err(Error::TooFewObservations { needed: p, got: count });
    }
    if let Some(obs) = &opts.observations {
        if obs.len() < count {
            return Err(Error::TooFewObservations {
                needed: count,
                got: obs.len(),
            });
        }
    }
    let mut trials = Vec::new();
    let mut extended = 0;
    let mut identifiable = alloc::vec![true; p];
    for t in 0..opts.theta_trials.max(1) {
        let seed = trial_seed(opts.seed, t);
        let point = Sampler::new(seed).point(&spec.symbols);
        let theta: Vec<f64> = point.iter().map(to_f64).collect();
        let draws = if opts.observations.is_some() {
            1
        } else {
            opts.data_trials.max(1)
        };
        for dtrial in 0..draws {
            let (y, dseed) = match &opts.observations {
                Some(obs) => (obs.clone(), None),
                None => {
                    let s = data_seed(seed, dtrial);
                    (simulate(spec, &theta, count, s)?, Some(s))
                }
            };
            let terms = kf_loglik_terms(spec, &theta, &y, count)?;
            let jac = term_jacobian(&terms, p);
            let square: Vec<Vec<f64>> = jac.iter().map(|r| r[..p].to_vec()).collect();
            let (rank, sv) = numeric_rank(&square, opts.tolerance);
            if count > p {
                extended = extended.max(numeric_rank(&jac, opts.tolerance).0);
            }
            for (i, flag) in identifiable.iter_mut().enumerate() {
                *flag &= numeric_rank(&with_unit_column(&square, i), opts.tolerance).0 == rank;
            }
            trials.push(Trial {
                seed,
                point: point.clone(),
                rank,
                data_seed: dseed,
                singular_values: sv,
            });
        }
    }
    let rank = trials.iter().map(|t| t.rank).max().unwrap_or(0);
    let params = spec.symbols.params().to_vec();
    Ok(IdentReport {
        model: spec.name.clone(),
        method: Method::Kalman,
        mode: RankMode::Numeric {
            tolerance: opts.tolerance,
        },
        symbols: spec.symbols.names.clone(),
        params: params.clone(),
        summary_len: count,
        rank,
        deficiency: p - rank,
        redundant: rank < p,
        per_param: params
            .into_iter()
            .zip(identifiable)
            .map(|(name, identifiable)| ParamVerdict { name, identifiable })
            .collect(),
        null_basis_samples: Vec::new(),
        trials,
        extended_rank: (count > p).then_some(extended),
    })
}
