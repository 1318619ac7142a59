//! Weighted pure simplicial complexes, their high-order random walks and the
//! spectral machinery that bounds how fast those walks mix.
//!
//! The crate is organised bottom-up:
//!
//! * [`complex`]: faces, weight functions, validation and links.
//! * [`cochain`]: cochains, the weighted inner product, localization.
//! * [`operators`]: upper/lower/non-lazy walks and the signless differential.
//! * [`spectra`]: per-link spectra, local spectral expansion, descent checks.
//! * [`decomposition`]: the cochain ladder and its energy identities.
//! * [`mixing`]: mixing bounds for walks and for locally thin binary cochains.
//! * [`generators`]: seeded test complexes.
//! * [`io`] and [`suite`]: JSON formats and the verification battery.

pub mod cochain;
pub mod complex;
pub mod decomposition;
pub mod error;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod mixing;
pub mod operators;
pub mod spectra;
pub mod suite;

pub use cochain::Cochain;
pub use complex::{Link, Simplex, SimplicialComplex, WeightFunction, WeightedComplex};
pub use error::{HdxError, Result};
