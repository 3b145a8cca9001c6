//! Exact arithmetic kernel: rationals, multivariate polynomials in the model
//! parameters, and Laurent polynomials in the frequency variable.

pub mod matrix;
pub mod mpoly;
pub mod rational;
pub mod spoly;

use core::ops::{Add, Mul, Neg, Sub};

pub use matrix::Matrix;
pub use mpoly::MPoly;
pub use rational::Rational;
pub use spoly::SPoly;

/// Scalars a polynomial can be evaluated over.
pub trait Scalar: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn from_rational(r: &Rational) -> Self;
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        rational::to_f64(r)
    }
}
