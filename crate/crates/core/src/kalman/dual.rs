//! Forward-mode dual numbers over `f64`.

use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use crate::algebra::rational::to_f64;
use crate::algebra::{Rational, Scalar};

/// A value and its gradient. An empty gradient stands for a zero gradient
/// of any length, so constants need not know the dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub du: Vec<f64>,
}

fn zip_with(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| f(a.get(i).copied().unwrap_or(0.0), b.get(i).copied().unwrap_or(0.0)))
        .collect()
}

impl Dual {
    pub fn constant(re: f64) -> Self {
        Dual { re, du: Vec::new() }
    }

    /// The `index`-th of `dim` independent variables, at value `re`.
    pub fn variable(re: f64, index: usize, dim: usize) -> Self {
        let mut du = alloc::vec![0.0; dim];
        du[index] = 1.0;
        Dual { re, du }
    }

    pub fn zero() -> Self {
        Dual::constant(0.0)
    }

    pub fn one() -> Self {
        Dual::constant(1.0)
    }

    /// Derivative with respect to variable `i`.
    pub fn d(&self, i: usize) -> f64 {
        self.du.get(i).copied().unwrap_or(0.0)
    }

    fn chain(&self, re: f64, slope: f64) -> Dual {
        Dual {
            re,
            du: self.du.iter().map(|d| d * slope).collect(),
        }
    }

    pub fn ln(&self) -> Dual {
        self.chain(libm::log(self.re), 1.0 / self.re)
    }

    pub fn sqrt(&self) -> Dual {
        let r = libm::sqrt(self.re);
        self.chain(r, 0.5 / r)
    }

    pub fn recip(&self) -> Dual {
        self.chain(1.0 / self.re, -1.0 / (self.re * self.re))
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.du.iter().all(|d| d.is_finite())
    }
}

impl Add for &Dual {
    type Output = Dual;
    fn add(self, rhs: &Dual) -> Dual {
        Dual {
            re: self.re + rhs.re,
            du: zip_with(&self.du, &rhs.du, |a, b| a + b),
        }
    }
}

impl Sub for &Dual {
    type Output = Dual;
    fn sub(self, rhs: &Dual) -> Dual {
        Dual {
            re: self.re - rhs.re,
            du: zip_with(&self.du, &rhs.du, |a, b| a - b),
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for &Dual {
    type Output = Dual;
    fn mul(self, rhs: &Dual) -> Dual {
        let (x, y) = (self.re, rhs.re);
        Dual {
            re: x * y,
            du: zip_with(&self.du, &rhs.du, |a, b| a * y + x * b),
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for &Dual {
    type Output = Dual;
    fn div(self, rhs: &Dual) -> Dual {
        self * &rhs.recip()
    }
}

impl Neg for &Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        self.chain(-self.re, -1.0)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Dual {
            type Output = Dual;
            fn $m(self, rhs: Dual) -> Dual {
                (&self).$m(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&Dual> for Dual {
    fn add_assign(&mut self, rhs: &Dual) {
        *self = &*self + rhs;
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        -&self
    }
}

impl Scalar for Dual {
    fn from_rational(r: &Rational) -> Self {
        Dual::constant(to_f64(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_derivatives() {
        let x = Dual::variable(2.0, 0, 2);
        let y = Dual::variable(3.0, 1, 2);
        let f = &(&x * &y) / &(&x + &Dual::constant(1.0));
        // f = xy/(x+1): df/dx = y/(x+1)^2, df/dy = x/(x+1)
        assert!((f.re - 2.0).abs() < 1e-15);
        assert!((f.d(0) - 3.0 / 9.0).abs() < 1e-15);
        assert!((f.d(1) - 2.0 / 3.0).abs() < 1e-15);
        let g = x.ln();
        assert!((g.d(0) - 0.5).abs() < 1e-15);
        let h = y.sqrt();
        assert!((h.d(1) - 0.5 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!((-&x).d(0), -1.0);
        assert_eq!(Dual::constant(4.0).d(7), 0.0);
    }
}
