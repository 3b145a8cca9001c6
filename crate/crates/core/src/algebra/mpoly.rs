//! Multivariate polynomials with exact rational coefficients.
//!
//! Monomials are dense exponent vectors, one slot per declared variable. The
//! term map never stores a zero coefficient, so structural equality of the
//! map is polynomial equality.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::rational::{is_negative, Rational};
use super::Scalar;
use crate::error::Error;

pub type Monomial = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    /// The polynomial consisting of the single variable `index`.
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars, "variable index {index} out of range");
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        Self::from_terms(nvars, [(exps, Rational::one())])
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated monomials and discarding zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(nvars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), nvars, "monomial length must equal variable count");
            p.add_term(exps, c);
        }
        p
    }

    fn add_term(&mut self, exps: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no variable occurs (this includes the zero polynomial).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    /// The value of a constant polynomial, `None` otherwise.
    pub fn constant_value(&self) -> Option<Rational> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.values().next().cloned().unwrap_or_else(Rational::zero))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// True when variable `index` occurs in some term.
    pub fn involves(&self, index: usize) -> bool {
        self.terms.keys().any(|e| e[index] > 0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, Error> {
        self.check_compatible(other)?;
        Ok(self + other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, Error> {
        self.check_compatible(other)?;
        Ok(self * other)
    }

    fn check_compatible(&self, other: &Self) -> Result<(), Error> {
        if self.nvars != other.nvars {
            return Err(Error::VariableMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact partial derivative with respect to variable `index`.
    pub fn diff(&self, index: usize) -> Self {
        assert!(index < self.nvars, "variable index {index} out of range");
        let mut out = Self::zero(self.nvars);
        for (exps, c) in &self.terms {
            let k = exps[index];
            if k == 0 {
                continue;
            }
            let mut e = exps.clone();
            e[index] = k - 1;
            out.add_term(e, c * Rational::from_integer(k.into()));
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars, "point length must equal variable count");
        self.eval_with(point)
    }

    /// Evaluation over any scalar type that admits rational constants.
    pub fn eval_with<T: Scalar>(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.nvars, "point length must equal variable count");
        let mut acc = T::from_rational(&Rational::zero());
        for (exps, c) in &self.terms {
            let mut term = T::from_rational(c);
            for (x, &k) in point.iter().zip(exps) {
                for _ in 0..k {
                    term = term * x.clone();
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Substitutes polynomials for the variables (all over a common
    /// variable count `target_nvars`).
    pub fn compose(&self, images: &[MPoly], target_nvars: usize) -> MPoly {
        assert_eq!(images.len(), self.nvars);
        let mut acc = MPoly::zero(target_nvars);
        for (exps, c) in &self.terms {
            let mut term = MPoly::constant(target_nvars, c.clone());
            for (img, &k) in images.iter().zip(exps) {
                if k > 0 {
                    term = &term * &img.pow(k);
                }
            }
            acc += &term;
        }
        acc
    }

    /// Terms in graded-lexicographic order (highest total degree first).
    pub fn sorted_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| grlex_desc(a, b));
        v
    }

    /// Display adapter printing in the model-file expression syntax.
    pub fn display<'a, S: AsRef<str>>(&'a self, names: &'a [S]) -> DisplayMPoly<'a, S> {
        DisplayMPoly { poly: self, names }
    }
}

fn grlex_desc(a: &Monomial, b: &Monomial) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

pub struct DisplayMPoly<'a, S> {
    poly: &'a MPoly,
    names: &'a [S],
}

impl<S: AsRef<str>> fmt::Display for DisplayMPoly<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.poly.sorted_terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (exps, c)) in terms.into_iter().enumerate() {
            let negative = is_negative(c);
            let mag = if negative { -c.clone() } else { c.clone() };
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let is_unit = mag.is_one();
            let mut wrote = false;
            if !is_unit || exps.iter().all(|&k| k == 0) {
                write!(f, "{mag}")?;
                wrote = true;
            }
            for (i, &k) in exps.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if wrote {
                    f.write_str("*")?;
                }
                f.write_str(self.names[i].as_ref())?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
                wrote = true;
            }
        }
        Ok(())
    }
}

impl Add<&MPoly> for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&MPoly> for MPoly {
    fn add_assign(&mut self, rhs: &MPoly) {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
}

impl SubAssign<&MPoly> for MPoly {
    fn sub_assign(&mut self, rhs: &MPoly) {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), -c.clone());
        }
    }
}

impl Sub<&MPoly> for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul<&MPoly> for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = MPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<MPoly> for MPoly {
            type Output = MPoly;
            fn $m(self, rhs: MPoly) -> MPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use alloc::format;
    use alloc::string::ToString;

    fn v(n: usize, i: usize) -> MPoly {
        MPoly::var(n, i)
    }

    #[test]
    fn monomial_product() {
        // (rho*phi1) * phia over (rho, phi1, phia)
        let p = &v(3, 0) * &v(3, 1);
        let q = &p * &v(3, 2);
        assert_eq!(q, MPoly::from_terms(3, [(vec![1, 1, 1], int(1))]));
        assert!((&q * &MPoly::zero(3)).is_zero());
    }

    #[test]
    fn squared_product_term() {
        // (rho*phi1*phia*s) squared contributes rho^2 phi1^2 phia^2 s^2
        let t = &(&(&v(4, 0) * &v(4, 1)) * &v(4, 2)) * &v(4, 3);
        let sq = &t * &t;
        assert_eq!(sq, MPoly::from_terms(4, [(vec![2, 2, 2, 2], int(1))]));
    }

    #[test]
    fn derivatives() {
        let names = ["rho", "phi1", "phia", "s2eta"];
        let rho = v(4, 0);
        let phi1 = v(4, 1);
        let phia = v(4, 2);
        let s2 = v(4, 3);
        let k1 = -&(&(&(&rho * &phi1) * &phia) * &s2);
        assert_eq!(k1.diff(0).display(&names).to_string(), "-phi1*phia*s2eta");
        assert!(s2.diff(0).is_zero());

        let d2 = &(&(&rho * &phi1) * &phia).pow(2) + &(&phia.pow(2) + &MPoly::one(4));
        assert_eq!(d2.diff(2).display(&names).to_string(), "2*rho^2*phi1^2*phia + 2*phia");
    }

    #[test]
    fn evaluation() {
        let rho = v(1, 0);
        let p = &rho.pow(2) + &MPoly::one(1);
        assert_eq!(p.eval(&[rat(1, 2)]), rat(5, 4));

        let m = -&(&(&v(3, 0) * &v(3, 1)) * &v(3, 2));
        assert_eq!(m.eval(&[rat(1, 3), rat(1, 5), rat(1, 7)]), rat(-1, 105));

        // rho^2*s2eta + s2eta + s2eps at rho=1/2, s2eta=1, s2eps=2
        let a2 = &(&(&v(3, 0).pow(2) * &v(3, 1)) + &v(3, 1)) + &v(3, 2);
        assert_eq!(a2.eval(&[rat(1, 2), int(1), int(2)]), rat(13, 4));
    }

    #[test]
    fn constants_and_display() {
        let c = MPoly::constant(2, rat(-3, 4));
        assert!(c.is_constant());
        assert_eq!(c.constant_value(), Some(rat(-3, 4)));
        assert_eq!(MPoly::zero(2).constant_value(), Some(int(0)));
        assert_eq!(format!("{}", c.display(&["a", "b"])), "-3/4");
        let p = &(&v(2, 0) * &v(2, 1)).scale(&rat(-1, 2)) + &v(2, 1);
        assert_eq!(format!("{}", p.display(&["a", "b"])), "-1/2*a*b + b");
    }

    #[test]
    fn mismatch_is_an_error() {
        assert!(MPoly::one(2).try_mul(&MPoly::one(3)).is_err());
        assert!(MPoly::one(2).try_add(&MPoly::one(2)).is_ok());
    }

    #[test]
    fn compose_substitutes() {
        // p(x) = x^2 with x := a + b
        let p = v(1, 0).pow(2);
        let img = &v(2, 0) + &v(2, 1);
        let q = p.compose(core::slice::from_ref(&img), 2);
        assert_eq!(q, &img * &img);
    }
}
