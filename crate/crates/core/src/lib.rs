//! Exact Hecke characteristic polynomials on level-one cusp forms, their
//! factorizations modulo small primes, and Galois-theoretic certificates
//! built from those factorizations.

pub mod arith;
pub mod cache;
pub mod error;
pub mod galois;
pub mod gfpoly;
pub mod hecke;
pub mod modfactor;
pub mod qseries;
pub mod traceformula;

pub use error::{Error, Result};
pub use gfpoly::{factor, reduce_mod, roots, FactorMultiset, FpPoly};
pub use cache::CharpolyCache;
pub use hecke::{charpoly, dim_cusp, hecke_matrix, HeckeSpec, IntMatrix, IntPoly};
pub use qseries::QExpansion;
pub use modfactor::{Engine, PeriodTable, RootSequence, Window};
pub use galois::{Certificate, Claim, Rule};
