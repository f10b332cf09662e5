//! Special functions and quadrature shared by every other module.

pub mod airy;
pub mod quadrature;

pub use airy::{airy_ai, airy_ai_scaled, airy_ai_with_derivative};
pub use quadrature::{
    integrate_adaptive, integrate_oscillatory_gaussian, integrate_truncated, trapezoid, trapezoid_complex,
    NeumaierSum, QuadratureSpec,
};
