//! Numerical verification toolkit for delta-method estimates of
//! twisted sums over primes.

pub mod characters;
pub mod error;
pub mod exponent;
pub mod expsums;
pub mod num;
pub mod oscillatory;
pub mod report;
pub mod suites;
pub mod summation;

pub use error::{Error, Result};
