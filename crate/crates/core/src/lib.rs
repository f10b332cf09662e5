//! Simulation of the measurement-induced two-node gate that turns a finitely
//! squeezed cubic phase state into conditional Schrödinger-cat states.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: real Airy function and the quadrature engines.
//! * [`states`]: grids, wavefunctions and the state constructors
//!   (squeezed vacuum, cubic phase state, ideal coherent-state cat).
//! * [`gate`]: the Airy-form added factor, the conditional output state and
//!   the outcome probability density.
//! * [`phase_space`]: Wigner transform, Wigner logarithmic negativity and the
//!   semiclassical shear picture.
//! * [`oracle`]: brute-force reference implementations used for validation.
//! * [`analysis`]: fidelity, squeezing conversion, efficiency score and sweeps.
//! * [`verify`]: the closed-form versus quadrature cross-check suite.
//!
//! Units are canonical with ħ = 1, so the vacuum has coordinate variance 1/2.

pub mod analysis;
pub mod error;
pub mod gate;
pub mod numerics;
pub mod oracle;
pub mod phase_space;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
