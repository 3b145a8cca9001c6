//! Seeded generation of random rational points.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::Rational;
use crate::error::Error;
use crate::model::{ParamRange, Symbols};

/// Largest denominator of a sampled rational.
pub const MAX_DENOMINATOR: i64 = 1000;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A rational strictly inside `range` with denominator at most
    /// [`MAX_DENOMINATOR`].
    pub fn rational_in(&mut self, range: &ParamRange) -> Rational {
        assert!(range.lo < range.hi, "empty sampling range");
        loop {
            let q = self.rng.random_range(1..=MAX_DENOMINATOR);
            let qb = BigInt::from(q);
            // integers n with lo < n/q < hi
            let lo = (range.lo.numer() * &qb).div_floor(range.lo.denom()) + BigInt::one();
            let hi = (range.hi.numer() * &qb).div_ceil(range.hi.denom()) - BigInt::one();
            if lo > hi {
                continue;
            }
            let span = &hi - &lo + BigInt::one();
            let offset = match span.to_u64() {
                Some(w) => BigInt::from(self.rng.random_range(0..w)),
                // astronomically wide range: draw 64 random bits and reduce
                None => BigInt::from(self.rng.random::<u64>()).mod_floor(&span),
            };
            return Rational::new(lo + offset, qb);
        }
    }

    /// One value for every symbol (parameters and knowns) of `symbols`.
    pub fn point(&mut self, symbols: &Symbols) -> Vec<Rational> {
        symbols.ranges.iter().map(|r| self.rational_in(r)).collect()
    }
}

/// Checks every range of `symbols` is a non-empty interval.
pub fn check_ranges(symbols: &Symbols) -> Result<(), Error> {
    for (name, r) in symbols.names.iter().zip(&symbols.ranges) {
        if r.lo >= r.hi {
            return Err(Error::DegenerateRange { name: name.clone() });
        }
    }
    Ok(())
}

/// Seed of the `index`-th trial derived from a base seed.
pub fn trial_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}
