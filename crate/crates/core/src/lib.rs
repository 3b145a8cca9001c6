//! Structural identifiability of linear time-invariant state-space models.
//!
//! The crate builds exhaustive summaries of a model (coefficients of the
//! output spectral density, of the transfer function, or Kalman-filter
//! log-likelihood terms), differentiates them and decides local
//! identifiability from the generic rank of the derivative matrix.
//!
//! All symbolic work is exact over the rationals. The crate is `no_std` and
//! needs only `alloc`.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod algebra;
pub mod bundled;
pub mod error;
pub mod expr;
pub mod ident;
pub mod kalman;
pub mod model;
pub mod sampling;
pub mod specden;
pub mod summary;
pub mod transfer;

#[cfg(test)]
mod testutil;

pub use error::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;
