//! Characteristic polynomial, adjugate and transfer function of a linear
//! model, plus the transfer-function exhaustive summaries.

use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::rational::int;
use crate::algebra::{matrix::matmul, MPoly, Matrix, Rational, SPoly};
use crate::error::Error;
use crate::model::ModelSpec;
use crate::summary::{ExhaustiveSummary, Fraction, SummaryKind};

/// `H_s = G / chi`, with `chi` the characteristic polynomial of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferForm {
    pub chi: SPoly,
    /// `C adj(sI - A) B + D chi`.
    pub g: Matrix<SPoly>,
    /// Each entry of `H_s` after removing factors of `chi` it shares.
    pub reduced: Matrix<Fraction>,
}

fn trace(m: &Matrix<MPoly>, nvars: usize) -> MPoly {
    let mut t = MPoly::zero(nvars);
    for i in 0..m.rows().min(m.cols()) {
        t += &m[(i, i)];
    }
    t
}

/// Characteristic polynomial of a square polynomial matrix, coefficients
/// from `s^0` to `s^N` (monic).
pub fn char_poly(a: &Matrix<MPoly>, nvars: usize) -> Vec<MPoly> {
    char_adjugate_parts(a, nvars).0
}

/// Faddeev–LeVerrier recursion. Returns the characteristic polynomial
/// coefficients (`s^0..=s^N`) and the matrices `M_1..M_N` with
/// `adj(sI - A) = sum_k M_k s^(N-k)`.
fn char_adjugate_parts(a: &Matrix<MPoly>, nvars: usize) -> (Vec<MPoly>, Vec<Matrix<MPoly>>) {
    assert!(a.is_square(), "A must be square");
    let n = a.rows();
    let mut coeffs = vec![MPoly::zero(nvars); n + 1];
    coeffs[n] = MPoly::one(nvars);
    let mut ms: Vec<Matrix<MPoly>> = Vec::with_capacity(n);
    let mut prev = Matrix::from_fn(n, n, |_, _| MPoly::zero(nvars));
    for k in 1..=n {
        let mut mk = matmul(a, &prev, || MPoly::zero(nvars));
        let c = &coeffs[n - k + 1];
        for i in 0..n {
            mk[(i, i)] += c;
        }
        let am = matmul(a, &mk, || MPoly::zero(nvars));
        coeffs[n - k] = trace(&am, nvars).scale(&(Rational::from_integer((-1).into()) / int(k as i64)));
        ms.push(mk.clone());
        prev = mk;
    }
    (coeffs, ms)
}

/// `chi(s) = det(sI - A)` and `adj(sI - A)` with `(sI - A) adj = chi I`.
pub fn char_adjugate(a: &Matrix<MPoly>, nvars: usize) -> (SPoly, Matrix<SPoly>) {
    let n = a.rows();
    let (coeffs, ms) = char_adjugate_parts(a, nvars);
    let chi = SPoly::from_coeffs(nvars, coeffs.into_iter().enumerate().map(|(k, c)| (k as i32, c)));
    let adj = Matrix::from_fn(n, n, |i, j| {
        SPoly::from_coeffs(
            nvars,
            ms.iter()
                .enumerate()
                .map(|(k, m)| ((n - 1 - k) as i32, m[(i, j)].clone())),
        )
    });
    (chi, adj)
}

/// Characteristic polynomials of the irreducible diagonal blocks of `A`
/// (strongly connected components of its off-diagonal sparsity graph).
/// Their product is `chi`.
pub fn block_factors(a: &Matrix<MPoly>, nvars: usize) -> Vec<SPoly> {
    let n = a.rows();
    let mut reach = Matrix::from_fn(n, n, |i, j| i == j || !a[(i, j)].is_zero());
    for k in 0..n {
        for i in 0..n {
            if reach[(i, k)] {
                for j in 0..n {
                    if reach[(k, j)] {
                        reach[(i, j)] = true;
                    }
                }
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut factors = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&j| reach[(i, j)] && reach[(j, i)]).collect();
        for &j in &members {
            assigned[j] = true;
        }
        let sub = Matrix::from_fn(members.len(), members.len(), |r, c| a[(members[r], members[c])].clone());
        let coeffs = char_poly(&sub, nvars);
        factors.push(SPoly::from_coeffs(
            nvars,
            coeffs.into_iter().enumerate().map(|(k, c)| (k as i32, c)),
        ));
    }
    factors
}

/// Divides `num` and `den` by every candidate factor that divides both,
/// as often as it does. Monomials are units for Laurent polynomials and
/// are skipped; with `strip_s` a common power of `s` is removed instead.
pub(crate) fn cancel_common(
    mut num: SPoly,
    mut den: SPoly,
    divisors: &[SPoly],
    strip_s: bool,
) -> (SPoly, SPoly, Vec<SPoly>) {
    let nv = den.nvars();
    let mut removed = Vec::new();
    if num.is_zero() {
        return (num, SPoly::one(nv), removed);
    }
    for f in divisors {
        if f.is_zero() || f.min_power() == f.max_power() {
            continue;
        }
        while let Some(qd) = den.div_exact(f) {
            let Some(qn) = num.div_exact(f) else { break };
            num = qn;
            den = qd;
            removed.push(f.clone());
        }
    }
    if strip_s {
        let k = num.min_power().min(den.min_power()).unwrap_or(0);
        if k > 0 {
            num = num.shift(-k);
            den = den.shift(-k);
            removed.push(SPoly::monomial(k, MPoly::one(nv)));
        }
    }
    (num, den, removed)
}

fn constant_matrix(m: &Matrix<MPoly>) -> Matrix<SPoly> {
    m.map(|p| SPoly::constant(p.clone()))
}

pub(crate) fn spoly_matmul(a: &Matrix<SPoly>, b: &Matrix<SPoly>, nvars: usize) -> Matrix<SPoly> {
    matmul(a, b, || SPoly::zero(nvars))
}

fn reduce_all(g: &Matrix<SPoly>, chi: &SPoly, factors: &[SPoly]) -> Matrix<Fraction> {
    g.map(|entry| {
        let (num, den, cancelled) = cancel_common(entry.clone(), chi.clone(), factors, true);
        Fraction { num, den, cancelled }
    })
}

/// `H_s = C (sI - A)^-1 B + D` as `G / chi`.
pub fn transfer_function(spec: &ModelSpec) -> TransferForm {
    let nv = spec.nvars();
    let (chi, adj) = char_adjugate(&spec.a, nv);
    let cadj = spoly_matmul(&constant_matrix(&spec.c), &adj, nv);
    let mut g = spoly_matmul(&cadj, &constant_matrix(&spec.b), nv);
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let dchi = chi.scale(&spec.d[(i, j)]);
            g[(i, j)] += &dchi;
        }
    }
    let factors = block_factors(&spec.a, nv);
    let reduced = reduce_all(&g, &chi, &factors);
    TransferForm { chi, g, reduced }
}

/// Transfer function of the expected output from initial state `x0`:
/// `C (sI - A)^-1 A x0`.
pub fn expectation_transfer(spec: &ModelSpec, x0: &[MPoly]) -> TransferForm {
    let nv = spec.nvars();
    let (chi, adj) = char_adjugate(&spec.a, nv);
    let x0 = Matrix::from_fn(x0.len(), 1, |i, _| x0[i].clone());
    let ax0 = matmul(&spec.a, &x0, || MPoly::zero(nv));
    let cadj = spoly_matmul(&constant_matrix(&spec.c), &adj, nv);
    let g = spoly_matmul(&cadj, &constant_matrix(&ax0), nv);
    let factors = block_factors(&spec.a, nv);
    let reduced = reduce_all(&g, &chi, &factors);
    TransferForm { chi, g, reduced }
}

/// Parameters occurring in at least one of `used`, or in none of `ignored`.
pub(crate) fn params_in_scope(
    spec: &ModelSpec,
    used: &[&Matrix<MPoly>],
    extra: &[MPoly],
    ignored: &[&Matrix<MPoly>],
) -> Vec<usize> {
    let occurs = |i: usize, ms: &[&Matrix<MPoly>]| ms.iter().any(|m| m.iter().any(|p| p.involves(i)));
    (0..spec.symbols.n_params)
        .filter(|&i| occurs(i, used) || extra.iter().any(|p| p.involves(i)) || !occurs(i, ignored))
        .collect()
}

/// Transfer-function summary (`init = None`) or, with an initial state,
/// the expectation summary. Parameters that only enter matrices the summary
/// ignores (such as `Q`) are left out of the analysis.
pub fn deterministic_summary(spec: &ModelSpec, init: Option<&[MPoly]>) -> ExhaustiveSummary {
    let (form, kind, params) = match init {
        None => (
            transfer_function(spec),
            SummaryKind::Deterministic,
            params_in_scope(spec, &[&spec.a, &spec.b, &spec.c, &spec.d], &[], &[&spec.q]),
        ),
        Some(x0) => (
            expectation_transfer(spec, x0),
            SummaryKind::Expectation,
            params_in_scope(spec, &[&spec.a, &spec.c], x0, &[&spec.b, &spec.d, &spec.q]),
        ),
    };
    let mut summary = ExhaustiveSummary::new(kind, spec.symbols.clone(), params);
    for (i, j, frac) in form.reduced.indexed() {
        summary.extend_from_fraction(i, j, frac);
    }
    summary
}

/// Expectation summary using the model's declared initial state.
pub fn expectation_summary(spec: &ModelSpec) -> Result<ExhaustiveSummary, Error> {
    let init = spec.init.as_deref().ok_or_else(|| Error::MethodMismatch {
        method: "expectation".into(),
        reason: "the model declares no `init` block".into(),
    })?;
    Ok(deterministic_summary(spec, Some(init)))
}
