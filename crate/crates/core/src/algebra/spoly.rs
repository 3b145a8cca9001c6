//! Laurent polynomials in the formal frequency variable `s` with
//! multivariate polynomial coefficients.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::One;

use super::mpoly::MPoly;
use super::rational::Rational;
use crate::error::Error;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SPoly {
    nvars: usize,
    coeffs: BTreeMap<i32, MPoly>,
}

impl SPoly {
    pub fn zero(nvars: usize) -> Self {
        SPoly {
            nvars,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(MPoly::one(nvars))
    }

    pub fn constant(c: MPoly) -> Self {
        Self::monomial(0, c)
    }

    /// `c * s^power`.
    pub fn monomial(power: i32, c: MPoly) -> Self {
        let mut p = Self::zero(c.nvars());
        if !c.is_zero() {
            p.coeffs.insert(power, c);
        }
        p
    }

    /// The variable `s` itself.
    pub fn s(nvars: usize) -> Self {
        Self::monomial(1, MPoly::one(nvars))
    }

    pub fn from_coeffs<I: IntoIterator<Item = (i32, MPoly)>>(nvars: usize, coeffs: I) -> Self {
        let mut p = Self::zero(nvars);
        for (k, c) in coeffs {
            p.add_coeff(k, &c);
        }
        p
    }

    fn add_coeff(&mut self, power: i32, c: &MPoly) {
        assert_eq!(c.nvars(), self.nvars, "variable count mismatch");
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(power).or_insert_with(|| MPoly::zero(c.nvars()));
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&power);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_power(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_power(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    /// Coefficient of `s^power` (zero when absent).
    pub fn coeff(&self, power: i32) -> MPoly {
        self.coeffs
            .get(&power)
            .cloned()
            .unwrap_or_else(|| MPoly::zero(self.nvars))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (i32, &MPoly)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    /// Multiplies every exponent by `s^shift`.
    pub fn shift(&self, shift: i32) -> Self {
        SPoly {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().map(|(k, c)| (k + shift, c.clone())).collect(),
        }
    }

    /// Multiplies by `s^shift` and checks that no negative power remains.
    pub fn laurent_normalize(&self, shift: i32) -> Result<Self, Error> {
        if let Some(lo) = self.min_power() {
            if lo + shift < 0 {
                return Err(Error::ShiftTooSmall { min_power: lo, shift });
            }
        }
        Ok(self.shift(shift))
    }

    /// Substitutes `s -> 1/s`.
    pub fn reflect_inverse(&self) -> Self {
        SPoly {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().map(|(k, c)| (-k, c.clone())).collect(),
        }
    }

    /// Substitutes `s -> -s`.
    pub fn reflect_negate(&self) -> Self {
        SPoly {
            nvars: self.nvars,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (*k, if k % 2 == 0 { c.clone() } else { -c }))
                .collect(),
        }
    }

    pub fn scale(&self, c: &MPoly) -> Self {
        let mut out = Self::zero(self.nvars);
        for (k, a) in &self.coeffs {
            out.add_coeff(*k, &(a * c));
        }
        out
    }

    pub fn map_coeffs<T>(&self, mut f: impl FnMut(&MPoly) -> T) -> BTreeMap<i32, T> {
        self.coeffs.iter().map(|(k, c)| (*k, f(c))).collect()
    }

    /// True when some coefficient involves a variable.
    pub fn is_parameter_free(&self) -> bool {
        self.coeffs.values().all(MPoly::is_constant)
    }

    /// Exact quotient `self / divisor` in the Laurent ring, or `None` when
    /// the division leaves a remainder or cannot be carried out without
    /// dividing by a non-constant coefficient. Needs a rational constant
    /// either as the leading or as the trailing coefficient of `divisor`.
    pub fn div_exact(&self, divisor: &SPoly) -> Option<SPoly> {
        let (lo_d, hi_d) = (divisor.min_power()?, divisor.max_power()?);
        if self.is_zero() {
            return Some(Self::zero(self.nvars));
        }
        if let Some(lead) = divisor.coeffs[&hi_d].constant_value() {
            return self.div_from(divisor, hi_d, lo_d, &lead, true);
        }
        if let Some(trail) = divisor.coeffs[&lo_d].constant_value() {
            return self.div_from(divisor, lo_d, hi_d, &trail, false);
        }
        None
    }

    fn div_from(
        &self,
        divisor: &SPoly,
        pivot: i32,
        other_end: i32,
        pivot_coeff: &Rational,
        from_top: bool,
    ) -> Option<SPoly> {
        let inv = Rational::one() / pivot_coeff;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        // Quotient powers are bounded by the two ends of the dividend.
        let (lo_n, hi_n) = (self.min_power()?, self.max_power()?);
        let span = if from_top {
            (lo_n - other_end)..=(hi_n - pivot)
        } else {
            (lo_n - pivot)..=(hi_n - other_end)
        };
        loop {
            let next = if from_top { rem.max_power() } else { rem.min_power() };
            let Some(k) = next else { break };
            let q_pow = k - pivot;
            if !span.contains(&q_pow) {
                break;
            }
            let q = rem.coeffs[&k].scale(&inv);
            let step = divisor.shift(q_pow).scale(&q);
            rem = &rem - &step;
            quot.add_coeff(q_pow, &q);
        }
        if rem.is_zero() {
            Some(quot)
        } else {
            None
        }
    }

    pub fn display<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> DisplaySPoly<'a, S> {
        DisplaySPoly { poly: self, names }
    }
}

pub struct DisplaySPoly<'a, S> {
    poly: &'a SPoly,
    names: &'a [S],
}

impl<S: AsRef<str>> fmt::Display for DisplaySPoly<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.poly.coeffs.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let unit = c.constant_value().is_some_and(|v| v.is_one());
            if self.poly.coeffs.len() == 1 && *k == 0 {
                write!(f, "{}", c.display(self.names))?;
                continue;
            }
            if unit && *k != 0 {
                match *k {
                    1 => f.write_str("s")?,
                    k => write!(f, "s^{k}")?,
                }
                continue;
            }
            write!(f, "({})", c.display(self.names))?;
            match *k {
                0 => {}
                1 => f.write_str("*s")?,
                k => write!(f, "*s^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add<&SPoly> for &SPoly {
    type Output = SPoly;
    fn add(self, rhs: &SPoly) -> SPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&SPoly> for SPoly {
    fn add_assign(&mut self, rhs: &SPoly) {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        for (k, c) in &rhs.coeffs {
            self.add_coeff(*k, c);
        }
    }
}

impl Sub<&SPoly> for &SPoly {
    type Output = SPoly;
    fn sub(self, rhs: &SPoly) -> SPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.coeffs {
            out.add_coeff(*k, &-c);
        }
        out
    }
}

impl Neg for &SPoly {
    type Output = SPoly;
    fn neg(self) -> SPoly {
        SPoly {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Mul<&SPoly> for &SPoly {
    type Output = SPoly;
    fn mul(self, rhs: &SPoly) -> SPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = SPoly::zero(self.nvars);
        for (ka, ca) in &self.coeffs {
            for (kb, cb) in &rhs.coeffs {
                out.add_coeff(ka + kb, &(ca * cb));
            }
        }
        out
    }
}

/// Collects the coefficient vector `c_lo .. c_hi` (inclusive) including zeros.
pub fn dense_coeffs(p: &SPoly, lo: i32, hi: i32) -> Vec<MPoly> {
    (lo..=hi).map(|k| p.coeff(k)).collect()
}
