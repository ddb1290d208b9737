//! Noncommutative geometry of the Kronecker foliation.
//!
//! The crate builds the crossed product `O(T²) ⋊ R`, represents it on
//! four-component sections over the torus lattice, and checks the spectra,
//! differential calculi and determinant nonvanishing claims of the two spectral triples
//! attached to it, together with the rotation-algebra triple.

pub mod algebra;
pub mod calculus;
pub mod error;
pub mod exact;
pub mod hankel;
pub mod hilbert;
pub mod precise;
pub mod report;
pub mod scalar;
pub mod spectral;
pub mod torus;

pub use error::{Error, Result};
