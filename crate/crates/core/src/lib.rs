//! Branched rough paths and their controlled paths.
//!
//! The crate is split in two layers. The algebraic layer works with exact
//! rationals on the decorated Connes–Kreimer Hopf algebra of rooted forests:
//! [`forest`], [`series`], [`hopf`], [`grafting`], [`growth`] and
//! [`basis`]. The analytic layer works in `f64` on time grids:
//! [`rough_path`], [`controlled`], [`approx`], [`rde`] and [`bundle`].
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! anything touching the file system live in the companion `branched` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod approx;
pub mod basis;
pub mod bundle;
pub mod controlled;
pub mod drivers;
pub mod error;
pub mod fit;
pub mod forest;
pub mod grafting;
pub mod growth;
pub mod holder;
pub mod hopf;
pub mod linalg;
pub mod literal;
pub(crate) mod math;
pub mod poly;
pub mod rde;
pub mod rough_path;
pub mod series;
pub mod tables;

pub use error::{AlgebraError, AnalysisError, ParseError};
pub use forest::{Alphabet, Forest, Label, Tree};
pub use series::{Basis, ForestSeries, TensorSeries, Q};

/// Largest forest degree any algebraic routine will agree to work with.
pub const DEFAULT_DEGREE_CAP: usize = 8;
