//! Numerical laboratory for convex cocompact hyperbolic surfaces given as
//! Schottky groups: length spectra, Selberg zeta functions and their zeros
//! (resonances), congruence covers, rapidly-decaying test functions, and the
//! wave 0-trace formula.

pub mod congruence;
pub mod counting;
pub mod error;
pub mod mobius;
pub mod quad;
pub mod schottky;
pub mod testfn;
pub mod traceformula;
pub mod zeta;

pub use error::{Error, Result};
