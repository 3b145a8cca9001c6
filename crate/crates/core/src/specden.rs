//! Output spectral density and its exhaustive summary.

use alloc::vec::Vec;

use crate::algebra::{MPoly, Matrix, SPoly};
use crate::model::{ModelSpec, Symbols, TimeDomain};
use crate::summary::{ExhaustiveSummary, Fraction, SummaryKind};
use crate::transfer::{block_factors, cancel_common, spoly_matmul, transfer_function};

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralForm {
    pub time_domain: TimeDomain,
    pub n: usize,
    pub symbols: Symbols,
    /// `G(s) Q G(r(s))^T`, normalized, where `r` is `1/s` or `-s`.
    pub num: Matrix<SPoly>,
    /// `chi(s) chi(r(s))`, normalized the same way.
    pub den: SPoly,
    /// Each entry with the factors of `chi` it shares with its numerator
    /// removed. The summary is read off these.
    pub reduced: Matrix<Fraction>,
}

fn reflect(p: &SPoly, domain: TimeDomain) -> SPoly {
    match domain {
        TimeDomain::Discrete => p.reflect_inverse(),
        TimeDomain::Continuous => p.reflect_negate(),
    }
}

/// Spectral density `S = H(s) Q H(r(s))^T` as a matrix of rational
/// functions with a common denominator.
pub fn spectral_density(spec: &ModelSpec) -> SpectralForm {
    let nv = spec.nvars();
    let domain = spec.time_domain;
    let tf = transfer_function(spec);
    let g = &tf.g;
    let g_reflected_t = g.transpose().map(|p| reflect(p, domain));
    let q = spec.q.map(|p| SPoly::constant(p.clone()));
    let laurent = spoly_matmul(&spoly_matmul(g, &q, nv), &g_reflected_t, nv);
    let laurent_den = &tf.chi * &reflect(&tf.chi, domain);

    let shift = match domain {
        TimeDomain::Discrete => spec.n as i32,
        TimeDomain::Continuous => 0,
    };
    let normalize = |p: &SPoly, shift: i32| {
        p.laurent_normalize(shift)
            .expect("spectral numerator has a pole of order above N at zero")
    };

    let mut divisors = Vec::new();
    for f in block_factors(&spec.a, nv) {
        let fr = reflect(&f, domain);
        divisors.push(f);
        divisors.push(fr);
    }
    let reduced = laurent.map(|entry| {
        let (num, den, cancelled) = cancel_common(
            entry.clone(),
            laurent_den.clone(),
            &divisors,
            domain == TimeDomain::Continuous,
        );
        // every removed 1/s-factor lowers the order of the pole at zero
        let eff = shift
            + cancelled
                .iter()
                .filter_map(SPoly::min_power)
                .map(|k| k.min(0))
                .sum::<i32>();
        let eff = if num.is_zero() { 0 } else { eff };
        Fraction {
            num: normalize(&num, eff),
            den: normalize(&den, eff),
            cancelled,
        }
    });

    SpectralForm {
        time_domain: domain,
        n: spec.n,
        symbols: spec.symbols.clone(),
        num: laurent.map(|p| normalize(p, shift)),
        den: normalize(&laurent_den, shift),
        reduced,
    }
}

/// Entry visiting order: upper triangle (with the diagonal) row by row,
/// then the strict lower triangle.
pub fn entry_order(m: usize) -> Vec<(usize, usize)> {
    let upper = (0..m).flat_map(|i| (i..m).map(move |j| (i, j)));
    let lower = (0..m).flat_map(|i| (0..i).map(move |j| (i, j)));
    upper.chain(lower).collect()
}

/// Non-constant coefficients of every spectral density entry, deduplicated.
pub fn exhaustive_summary(form: &SpectralForm) -> ExhaustiveSummary {
    let params = (0..form.symbols.n_params).collect();
    let mut summary = ExhaustiveSummary::new(SummaryKind::Spectral, form.symbols.clone(), params);
    for (i, j) in entry_order(form.num.rows()) {
        summary.extend_from_fraction(i, j, &form.reduced[(i, j)]);
    }
    summary
}

/// `exhaustive_summary(&spectral_density(spec))`.
pub fn spectral_summary(spec: &ModelSpec) -> ExhaustiveSummary {
    exhaustive_summary(&spectral_density(spec))
}

/// Coefficients of an entry of `S` as plain polynomials, lowest power first.
pub fn coefficient_list(p: &SPoly) -> Vec<MPoly> {
    p.coeffs().map(|(_, c)| c.clone()).collect()
}

#[cfg(test)]
mod tests;
