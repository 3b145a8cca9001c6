//! Property checks shared by the core property tests and the acceptance
//! suite. Each check returns `Err(description)` on the first violation.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ssmident_core::algebra::matrix::matmul;
use ssmident_core::algebra::rational::{rat, to_f64};
use ssmident_core::algebra::{MPoly, Matrix, SPoly};
use ssmident_core::bundled;
use ssmident_core::ident::{analyze, IdentOptions, Method};
use ssmident_core::kalman::{kf_loglik_terms, kf_rank_report, kf_run, simulate, KalmanOptions};
use ssmident_core::model::{parse_model, KalmanModelSpec, Model, ModelSpec, Symbols, TimeDomain};
use ssmident_core::sampling::Sampler;
use ssmident_core::specden::{spectral_density, spectral_summary};
use ssmident_core::transfer::{char_adjugate, transfer_function};

pub type Check = Result<(), String>;

pub fn bundled_spectral() -> Vec<ModelSpec> {
    bundled::MODELS
        .iter()
        .filter_map(|(_, _, text)| match parse_model(text).unwrap() {
            Model::Spectral(s) => Some(s),
            Model::Kalman(_) => None,
        })
        .collect()
}

pub fn bundled_kalman() -> Vec<KalmanModelSpec> {
    bundled::MODELS
        .iter()
        .filter_map(|(_, _, text)| match parse_model(text).unwrap() {
            Model::Kalman(k) => Some(k),
            Model::Spectral(_) => None,
        })
        .collect()
}

fn names(p: usize) -> Vec<String> {
    (0..p).map(|i| format!("p{i}")).collect()
}

/// A sparse entry of low degree in the parameters.
fn random_entry(rng: &mut ChaCha8Rng, nv: usize, zero_prob: f64) -> MPoly {
    if rng.random_bool(zero_prob) {
        return MPoly::zero(nv);
    }
    let coef = |rng: &mut ChaCha8Rng| {
        let n = rng.random_range(-4..=4i64);
        MPoly::constant(nv, rat(if n == 0 { 1 } else { n }, rng.random_range(1..=3)))
    };
    let var = |rng: &mut ChaCha8Rng| MPoly::var(nv, rng.random_range(0..nv));
    match rng.random_range(0..4) {
        0 => coef(rng),
        1 => var(rng),
        2 => &(&coef(rng) * &var(rng)) + &coef(rng),
        _ => &var(rng) * &var(rng),
    }
}

/// Random spectral-form model with N <= 3 states and M <= 2 outputs.
pub fn random_spectral_model(seed: u64) -> ModelSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=3);
    let m = rng.random_range(1..=2);
    let k = rng.random_range(1..=3);
    let p = rng.random_range(1..=4);
    let nv = p;
    let symbols = Symbols::new(names(p), Vec::new());
    let a = Matrix::from_fn(n, n, |_, _| random_entry(&mut rng, nv, 0.4));
    let b = Matrix::from_fn(n, k, |_, _| random_entry(&mut rng, nv, 0.5));
    let c = Matrix::from_fn(m, n, |_, _| random_entry(&mut rng, nv, 0.4));
    let d = Matrix::from_fn(m, k, |_, _| random_entry(&mut rng, nv, 0.6));
    let mut q = Matrix::from_fn(k, k, |_, _| MPoly::zero(nv));
    for i in 0..k {
        for j in i..k {
            let e = random_entry(&mut rng, nv, if i == j { 0.1 } else { 0.7 });
            q[(i, j)] = e.clone();
            q[(j, i)] = e;
        }
    }
    let time_domain = if rng.random_bool(0.7) {
        TimeDomain::Discrete
    } else {
        TimeDomain::Continuous
    };
    ModelSpec {
        name: Some(format!("random{seed}")),
        symbols,
        n,
        m,
        a,
        b,
        c,
        d,
        q,
        time_domain,
        init: None,
    }
}

/// Random Kalman-form model with positive noise variances and a
/// contracting state matrix.
pub fn random_kalman_model(seed: u64) -> KalmanModelSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    let n = rng.random_range(1..=3);
    let m = rng.random_range(1..=2);
    // the last n + m parameters are the noise variances
    let extra = rng.random_range(1..=3);
    let p = extra + n + m;
    let symbols = Symbols::new(names(p), Vec::new());
    let scale = MPoly::constant(p, rat(1, 2 * n as i64));
    let small = |rng: &mut ChaCha8Rng| {
        let e = if rng.random_bool(0.5) {
            MPoly::var(p, rng.random_range(0..extra))
        } else {
            MPoly::zero(p)
        };
        &e * &scale
    };
    let a = Matrix::from_fn(n, n, |_, _| small(&mut rng));
    let b = Matrix::from_fn(n, 1, |_, _| random_entry(&mut rng, p, 0.5));
    let c = Matrix::from_fn(m, n, |i, j| {
        if i == j % m {
            MPoly::one(p)
        } else {
            random_entry(&mut rng, p, 0.6)
        }
    });
    let d = Matrix::from_fn(m, 1, |_, _| random_entry(&mut rng, p, 0.7));
    let q = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            MPoly::var(p, extra + i)
        } else {
            MPoly::zero(p)
        }
    });
    let r = Matrix::from_fn(m, m, |i, j| {
        if i == j {
            MPoly::var(p, extra + n + i)
        } else {
            MPoly::zero(p)
        }
    });
    let input = vec![if rng.random_bool(0.5) { rat(1, 1) } else { rat(0, 1) }];
    KalmanModelSpec {
        name: Some(format!("randomkf{seed}")),
        symbols,
        n,
        m,
        a,
        b,
        c,
        d,
        q,
        r,
        s: None,
        input,
        init_state: vec![rat(0, 1); n],
        init_cov: vec![rat(1, 1); n],
    }
}

fn s_minus_a(a: &Matrix<MPoly>, nv: usize) -> Matrix<SPoly> {
    Matrix::from_fn(a.rows(), a.cols(), |i, j| {
        let mut e = SPoly::constant(-&a[(i, j)]);
        if i == j {
            e += &SPoly::s(nv);
        }
        e
    })
}

/// `(sI - A) adj(sI - A) = chi I` and `chi(A) = 0`.
pub fn check_adjugate(spec: &ModelSpec) -> Check {
    let nv = spec.nvars();
    let (chi, adj) = char_adjugate(&spec.a, nv);
    let prod = matmul(&s_minus_a(&spec.a, nv), &adj, || SPoly::zero(nv));
    for (i, j, e) in prod.indexed() {
        let want = if i == j { chi.clone() } else { SPoly::zero(nv) };
        if *e != want {
            return Err(format!("adjugate identity fails at ({i},{j})"));
        }
    }
    // Cayley-Hamilton by Horner evaluation of chi at A
    let n = spec.n;
    let ident = |c: &MPoly| Matrix::from_fn(n, n, |i, j| if i == j { c.clone() } else { MPoly::zero(nv) });
    let mut acc = ident(&chi.coeff(n as i32));
    for k in (0..n).rev() {
        acc = matmul(&acc, &spec.a, || MPoly::zero(nv));
        let c = chi.coeff(k as i32);
        for i in 0..n {
            acc[(i, i)] += &c;
        }
    }
    if acc.iter().any(|p| !p.is_zero()) {
        return Err("chi(A) != 0".into());
    }
    Ok(())
}

/// Palindromic denominator and transpose-reflection symmetry of the
/// numerators (discrete time).
pub fn check_symmetry(spec: &ModelSpec) -> Check {
    if spec.time_domain != TimeDomain::Discrete {
        return Ok(());
    }
    let form = spectral_density(spec);
    let two_n = 2 * spec.n as i32;
    if form.den.max_power().unwrap_or(0) > two_n || form.den.min_power().unwrap_or(0) < 0 {
        return Err("denominator outside 0..2N".into());
    }
    for k in 0..=two_n {
        if form.den.coeff(k) != form.den.coeff(two_n - k) {
            return Err(format!("denominator not palindromic at s^{k}"));
        }
    }
    for (i, j, e) in form.num.indexed() {
        if e.max_power().unwrap_or(0) > two_n || e.min_power().unwrap_or(0) < 0 {
            return Err(format!("numerator ({i},{j}) outside 0..2N"));
        }
        for k in 0..=two_n {
            if e.coeff(k) != form.num[(j, i)].coeff(two_n - k) {
                return Err(format!("transpose-reflection symmetry fails at ({i},{j}) s^{k}"));
            }
        }
    }
    Ok(())
}

fn eval_spoly(p: &SPoly, theta: &[f64], s: Complex64) -> Complex64 {
    p.coeffs()
        .map(|(k, c)| Complex64::new(c.eval_with(theta), 0.0) * s.powi(k))
        .sum()
}

fn cmat(m: &Matrix<MPoly>, theta: &[f64]) -> Vec<Vec<Complex64>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| Complex64::new(m[(i, j)].eval_with(theta), 0.0))
                .collect()
        })
        .collect()
}

fn cmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect())
        .collect()
}

fn cinv(m: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = m.len();
    let mut a: Vec<Vec<Complex64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a[x][c].norm().total_cmp(&a[y][c].norm()))
            .unwrap();
        a.swap(c, p);
        let inv = a[c][c].inv();
        for v in a[c].iter_mut() {
            *v *= inv;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                let pivot_row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

fn direct_transfer(spec: &ModelSpec, theta: &[f64], s: Complex64) -> Vec<Vec<Complex64>> {
    let n = spec.n;
    let a = cmat(&spec.a, theta);
    let si_a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { s - a[i][j] } else { -a[i][j] }).collect())
        .collect();
    let h = cmul(&cmul(&cmat(&spec.c, theta), &cinv(&si_a)), &cmat(&spec.b, theta));
    let d = cmat(&spec.d, theta);
    h.iter()
        .zip(&d)
        .map(|(hr, dr)| hr.iter().zip(dr).map(|(x, y)| x + y).collect())
        .collect()
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    // mixed test so exact zeros compare against rounding noise
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

/// Polynomial forms agree with direct complex evaluation at random points
/// on the unit circle.
pub fn check_complex_evaluation(spec: &ModelSpec, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta: Vec<f64> = Sampler::new(seed).point(&spec.symbols).iter().map(to_f64).collect();
    let tf = transfer_function(spec);
    let form = spectral_density(spec);
    for _ in 0..3 {
        let s = Complex64::from_polar(1.0, rng.random_range(0.1..3.0));
        let h = direct_transfer(spec, &theta, s);
        let chi = eval_spoly(&tf.chi, &theta, s);
        for (i, j, g) in tf.g.indexed() {
            if !close(eval_spoly(g, &theta, s) / chi, h[i][j], 1e-10) {
                return Err(format!("transfer entry ({i},{j}) differs at s = {s}"));
            }
            let red = &tf.reduced[(i, j)];
            if !close(
                eval_spoly(&red.num, &theta, s) / eval_spoly(&red.den, &theta, s),
                h[i][j],
                1e-10,
            ) {
                return Err(format!("reduced transfer entry ({i},{j}) differs"));
            }
        }
        let sr = match spec.time_domain {
            TimeDomain::Discrete => s.inv(),
            TimeDomain::Continuous => -s,
        };
        let hr = direct_transfer(spec, &theta, sr);
        let hr_t: Vec<Vec<Complex64>> = (0..hr[0].len()).map(|j| hr.iter().map(|r| r[j]).collect()).collect();
        let direct = cmul(&cmul(&h, &cmat(&spec.q, &theta)), &hr_t);
        let den = eval_spoly(&form.den, &theta, s);
        for (i, j, num) in form.num.indexed() {
            let want = direct[i][j];
            let got = eval_spoly(num, &theta, s) / den;
            let red = &form.reduced[(i, j)];
            let got_red = eval_spoly(&red.num, &theta, s) / eval_spoly(&red.den, &theta, s);
            if !close(got, want, 1e-10) {
                return Err(format!("spectral entry ({i},{j}) {got} vs {want}"));
            }
            if !close(got_red, want, 1e-10) {
                return Err(format!("reduced spectral entry ({i},{j}) {got_red} vs {want}"));
            }
        }
    }
    Ok(())
}

/// Summary invariants and bit-identical reruns.
pub fn check_summary_determinism(spec: &ModelSpec) -> Check {
    let a = spectral_summary(spec);
    let b = spectral_summary(spec);
    if a != b {
        return Err("summary differs between runs".into());
    }
    if a.entries.iter().any(MPoly::is_constant) {
        return Err("summary contains a constant".into());
    }
    for (i, e) in a.entries.iter().enumerate() {
        if a.entries[..i].contains(e) {
            return Err("summary contains a duplicate".into());
        }
    }
    let opts = IdentOptions {
        trials: 2,
        seed: 11,
        ..IdentOptions::default()
    };
    let r1 = analyze(spec, Method::Spectral, &opts).map_err(|e| e.to_string())?;
    let r2 = analyze(spec, Method::Spectral, &opts).map_err(|e| e.to_string())?;
    if r1 != r2 {
        return Err("report differs between runs".into());
    }
    Ok(())
}

/// Dual-number derivatives against central finite differences.
pub fn check_gradients(spec: &KalmanModelSpec, seed: u64) -> Check {
    let count = 5;
    let theta: Vec<f64> = Sampler::new(seed).point(&spec.symbols).iter().map(to_f64).collect();
    let y = simulate(spec, &theta, count, seed).map_err(|e| e.to_string())?;
    let terms = kf_loglik_terms(spec, &theta, &y, count).map_err(|e| e.to_string())?;
    for i in 0..spec.symbols.n_params {
        let h = 1e-6 * theta[i].abs().max(1.0);
        let mut up = theta.clone();
        let mut down = theta.clone();
        up[i] += h;
        down[i] -= h;
        let lu = kf_loglik_terms(spec, &up, &y, count).map_err(|e| e.to_string())?;
        let ld = kf_loglik_terms(spec, &down, &y, count).map_err(|e| e.to_string())?;
        for t in 0..count {
            let fd = (lu[t].re - ld[t].re) / (2.0 * h);
            let ad = terms[t].d(i);
            if (fd - ad).abs() / ad.abs().max(fd.abs()).max(1.0) > 1e-6 {
                return Err(format!(
                    "d l_{} / d theta_{i}: dual {ad} vs finite difference {fd}",
                    t + 1
                ));
            }
        }
    }
    Ok(())
}

/// Minus twice the joint Gaussian log-density of `y`, built from the
/// stacked linear system, without the `2 pi` constant.
pub fn joint_gaussian(spec: &KalmanModelSpec, theta: &[f64], y: &[Vec<f64>]) -> f64 {
    let (n, m, len) = (spec.n, spec.m, y.len());
    let ev = |mat: &Matrix<MPoly>| DMatrix::from_fn(mat.rows(), mat.cols(), |i, j| mat[(i, j)].eval_with(theta));
    let (a, b, c, d, q, r) = (
        ev(&spec.a),
        ev(&spec.b),
        ev(&spec.c),
        ev(&spec.d),
        ev(&spec.q),
        ev(&spec.r),
    );
    let u = DMatrix::from_fn(spec.input.len(), 1, |i, _| to_f64(&spec.input[i]));
    let mut mean = DMatrix::from_fn(n, 1, |i, _| to_f64(&spec.init_state[i]));
    let mut var = DMatrix::from_fn(n, n, |i, j| if i == j { to_f64(&spec.init_cov[i]) } else { 0.0 });
    let (mut means, mut vars) = (Vec::new(), Vec::new());
    for _ in 0..len {
        means.push(mean.clone());
        vars.push(var.clone());
        mean = &a * &mean + &b * &u;
        var = &a * &var * a.transpose() + &q;
    }
    let mut apow = vec![DMatrix::identity(n, n)];
    for k in 1..len {
        apow.push(&a * &apow[k - 1]);
    }
    let big = DMatrix::from_fn(m * len, m * len, |i, j| {
        let (s, t) = (i / m, j / m);
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        let cov = &apow[hi - lo] * &vars[lo];
        let block = if s <= t {
            &c * cov.transpose() * c.transpose()
        } else {
            &c * cov * c.transpose()
        };
        block[(i % m, j % m)] + if s == t { r[(i % m, j % m)] } else { 0.0 }
    });
    let resid = DVector::from_fn(m * len, |i, _| {
        let t = i / m;
        let mu = &c * &means[t] + &d * &u;
        y[t][i % m] - mu[(i % m, 0)]
    });
    let chol = big.cholesky().expect("joint covariance is positive definite");
    let logdet = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    logdet + resid.dot(&chol.solve(&resid))
}

/// Sum of filter terms equals the brute-force joint likelihood for
/// T = 1..=5, and the updated covariance stays symmetric.
pub fn check_likelihood(spec: &KalmanModelSpec, seed: u64) -> Check {
    let theta: Vec<f64> = Sampler::new(seed).point(&spec.symbols).iter().map(to_f64).collect();
    for len in 1..=5 {
        let y = simulate(spec, &theta, len, seed.wrapping_add(1000)).map_err(|e| e.to_string())?;
        let run = kf_run(spec, &theta, &y, len).map_err(|e| e.to_string())?;
        let total: f64 = run.terms.iter().map(|l| l.re).sum();
        let oracle = joint_gaussian(spec, &theta, &y);
        if (total - oracle).abs() / oracle.abs().max(1e-300) > 1e-10 {
            return Err(format!("T={len}: filter {total} vs joint density {oracle}"));
        }
        if run.max_asymmetry > 1e-12 {
            return Err(format!("updated covariance asymmetry {}", run.max_asymmetry));
        }
    }
    Ok(())
}

pub fn check_kalman_determinism(spec: &KalmanModelSpec) -> Check {
    let opts = KalmanOptions {
        theta_trials: 1,
        data_trials: 2,
        seed: 5,
        ..KalmanOptions::default()
    };
    let a = kf_rank_report(spec, &opts).map_err(|e| e.to_string())?;
    let b = kf_rank_report(spec, &opts).map_err(|e| e.to_string())?;
    if a != b {
        return Err("Kalman report differs between runs".into());
    }
    Ok(())
}

/// Every spectral-side check on one model.
pub fn spectral_checks(spec: &ModelSpec, seed: u64) -> Check {
    let label = spec.name.clone().unwrap_or_default();
    check_adjugate(spec).map_err(|e| format!("{label}: {e}"))?;
    check_symmetry(spec).map_err(|e| format!("{label}: {e}"))?;
    check_complex_evaluation(spec, seed).map_err(|e| format!("{label}: {e}"))?;
    check_summary_determinism(spec).map_err(|e| format!("{label}: {e}"))
}

/// Every Kalman-side check on one model.
pub fn kalman_checks(spec: &KalmanModelSpec, seed: u64) -> Check {
    let label = spec.name.clone().unwrap_or_default();
    check_gradients(spec, seed).map_err(|e| format!("{label}: {e}"))?;
    check_likelihood(spec, seed).map_err(|e| format!("{label}: {e}"))?;
    check_kalman_determinism(spec).map_err(|e| format!("{label}: {e}"))
}

/// The whole suite: bundled models plus `randomized` random models of each
/// form. Returns the number of models checked.
pub fn full_suite(randomized: u64) -> Result<usize, String> {
    let mut checked = 0;
    for (i, spec) in bundled_spectral().iter().enumerate() {
        spectral_checks(spec, i as u64)?;
        checked += 1;
    }
    for (i, spec) in bundled_kalman().iter().enumerate() {
        kalman_checks(spec, i as u64)?;
        checked += 1;
    }
    for seed in 0..randomized {
        spectral_checks(&random_spectral_model(seed), seed)?;
        kalman_checks(&random_kalman_model(seed), seed)?;
        checked += 2;
    }
    Ok(checked)
}
