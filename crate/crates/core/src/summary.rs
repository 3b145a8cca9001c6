//! Exhaustive summaries: ordered, deduplicated lists of non-constant
//! coefficient polynomials with their provenance.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::algebra::{MPoly, SPoly};
use crate::model::Symbols;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SummaryKind {
    /// Coefficients of the output spectral density.
    Spectral,
    /// Coefficients of the transfer function.
    Deterministic,
    /// Coefficients of the transfer function of the expected output from a
    /// given initial state.
    Expectation,
}

impl SummaryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SummaryKind::Spectral => "spectral",
            SummaryKind::Deterministic => "deterministic",
            SummaryKind::Expectation => "expectation",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Numerator,
    Denominator,
}

/// Where a summary entry came from: matrix entry `(row, col)` (0-based),
/// power of `s` after normalization and which side of the fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub row: usize,
    pub col: usize,
    pub power: i32,
    pub part: Part,
}

/// A rational function in `s`, both sides with non-negative powers only.
#[derive(Clone, Debug, PartialEq)]
pub struct Fraction {
    pub num: SPoly,
    pub den: SPoly,
    /// Factors removed from both sides (in the Laurent form).
    pub cancelled: Vec<SPoly>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustiveSummary {
    pub kind: SummaryKind,
    pub symbols: Symbols,
    /// Indices (into `symbols.names`) of the parameters the summary is
    /// differentiated against.
    pub params: Vec<usize>,
    pub entries: Vec<MPoly>,
    pub provenance: Vec<Provenance>,
}

impl ExhaustiveSummary {
    pub fn new(kind: SummaryKind, symbols: Symbols, params: Vec<usize>) -> Self {
        ExhaustiveSummary {
            kind,
            symbols,
            params,
            entries: Vec::new(),
            provenance: Vec::new(),
        }
    }

    /// Appends the coefficients of `frac` (numerator by ascending power,
    /// then denominator), dropping constants and exact duplicates.
    pub fn extend_from_fraction(&mut self, row: usize, col: usize, frac: &Fraction) {
        for (part, poly) in [(Part::Numerator, &frac.num), (Part::Denominator, &frac.den)] {
            for (power, coeff) in poly.coeffs() {
                self.push(coeff.clone(), Provenance { row, col, power, part });
            }
        }
    }

    /// Adds one entry unless it is parameter-free or already present.
    pub fn push(&mut self, entry: MPoly, origin: Provenance) -> bool {
        if entry.is_constant() || self.entries.contains(&entry) {
            return false;
        }
        self.entries.push(entry);
        self.provenance.push(origin);
        true
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn param_names(&self) -> Vec<String> {
        self.params.iter().map(|&i| self.symbols.names[i].clone()).collect()
    }

    /// Entries printed in the model-file expression syntax.
    pub fn entry_strings(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|e| e.display(&self.symbols.names).to_string())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    #[test]
    fn drops_constants_and_duplicates() {
        let symbols = Symbols::new(alloc::vec!["a".into()], Vec::new());
        let mut s = ExhaustiveSummary::new(SummaryKind::Spectral, symbols, alloc::vec![0]);
        let a = MPoly::var(1, 0);
        let origin = Provenance {
            row: 0,
            col: 0,
            power: 0,
            part: Part::Numerator,
        };
        assert!(s.push(a.clone(), origin));
        assert!(!s.push(a.clone(), origin));
        assert!(!s.push(MPoly::constant(1, int(3)), origin));
        assert!(!s.push(MPoly::zero(1), origin));
        // a scalar multiple is a different entry
        assert!(s.push(a.scale(&int(-1)), origin));
        assert_eq!(s.entry_strings(), ["a", "-a"]);
    }
}
