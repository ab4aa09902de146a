//! Divisors of integers in short windows `[X, X+Y]`: exact counting, the
//! exponent bounds governing how many such divisors can exist, the
//! certified constructions behind those bounds, and the explicit witnesses
//! showing they cannot be improved much.

pub mod arith;
pub mod bounds;
pub mod error;
pub mod sieve;
pub(crate) mod report;
pub mod split;
pub mod verify;
pub mod window;
pub mod witness;

pub use arith::{
    factorize, parse_ratio, ArithProfile, FactoredInteger, HighPrecisionReal, PrimePower,
};
pub use error::{Error, Result};
pub use window::{count_window, ExponentWindow, ScanTable};
