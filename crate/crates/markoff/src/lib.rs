//! Exact-arithmetic toolkit for the Markoff equation `a² + b² + c² = 3abc`.
//!
//! Everything here is computed over exact integers or rationals: the triple
//! tree and its matrix encodings, nilpotent automorph machinery, the
//! quadratic-residue parametrization of the associated Diophantine matrix
//! systems, residue profiles, binary quadratic form cycles and norm-form
//! solution classes.
//!
//! The crate is `no_std` (with `alloc`); all IO lives in the companion CLI
//! crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod mat3;
pub mod orbit;
pub mod profile;
pub mod qforms;
pub mod solutions;
pub mod tree;
pub mod uniqueness;

pub mod catalog;
pub mod report;

pub use mat3::Mat3;
pub use report::IdentityReport;
pub use tree::{MarkoffTriple, Orientation};

use num_bigint::BigInt;
use num_rational::Ratio;

/// Exact integer used throughout.
pub type Int = BigInt;
/// Exact rational used throughout.
pub type Rat = Ratio<BigInt>;

/// Shorthand for an exact integer from a machine integer.
pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Shorthand for an exact rational from a machine integer.
pub fn rat(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

/// Exact rational `n / d`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}
