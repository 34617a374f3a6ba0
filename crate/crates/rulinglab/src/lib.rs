//! Normal rulings, Ruling polynomials, LCH differential graded algebras and
//! finite-field augmentation counts for Legendrian tangle fronts.
//!
//! A front is a sequence of elementary slices (crossings, cusps, base
//! points). Strand positions are 1-based from the top in every public type.

pub mod augcount;
pub mod dga;
pub mod error;
pub mod front;
pub mod linalg;
pub mod mcs;
pub mod polynomial;
pub mod ruling;
pub mod types;

pub use error::{Error, Result};
pub use front::{PotentialTable, Slice, SliceInfo, TangleFront};
pub use linalg::{FilteredComplex, PrimeField};
pub use polynomial::{GenPoly, HalfPoly, LaurentPoly, RationalS};
pub use ruling::RulingPath;
pub use types::{BoundaryRuling, IsoType, Modulus};

/// Default cap on enumerated branches for sweeps and brute force.
pub const DEFAULT_BUDGET: u64 = 10_000_000;
