//! The conditional gate: the Airy-form factor imprinted on the target by the
//! ancilla momentum measurement, the resulting output state, and the
//! probability density of the measurement outcome.
//!
//! For a target ψ(x) and outcome y_m the unnormalized output is
//! ψ̃(x) = ψ(x)·φ̃(x − y_m) with
//!
//! ```text
//! φ̃(δ) = √(2s) π^{1/4} (3γ)^{-1/3} exp[(s²/6γ)(δ + s⁴/18γ)] Ai[(3γ)^{-1/3}(δ + s⁴/12γ)]
//! ```
//!
//! which equals (√s / (π^{3/4}√2)) ∫ exp(i x'(δ + γx'²)) exp(-(s x')²/2) dx'.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{airy_ai, airy_ai_scaled, trapezoid};
use crate::states::{GateParams, WaveFunction};

/// Outcomes whose probability density falls below this are rejected.
pub const PROBABILITY_FLOOR: f64 = 1e-300;

/// Normalized conditional output of the gate together with the outcome density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalOutput {
    #[serde(skip)]
    pub state: WaveFunction,
    /// P(y_m), per unit momentum.
    pub probability_density: f64,
    pub params: GateParams,
}

/// The Airy-form added factor φ̃(x − y_m) for γ > 0.
///
/// Assembled in log space whenever the Airy argument is positive so that the
/// growing exponential and the decaying Airy function never overflow or
/// underflow separately.
pub fn added_factor(x: f64, params: &GateParams) -> Result<Complex64> {
    params.require_airy()?;
    if !x.is_finite() {
        return Err(Error::domain("added_factor: x must be finite"));
    }
    let GateParams { gamma, s, y_m } = *params;
    let delta = x - y_m;
    let s2 = s * s;
    let s4 = s2 * s2;
    let scale = (3.0 * gamma).cbrt().recip();
    let log_prefactor = (2.0 * s).sqrt().ln() + 0.25 * PI.ln() + scale.ln();
    let exponent = s2 / (6.0 * gamma) * (delta + s4 / (18.0 * gamma));
    let z = scale * (delta + s4 / (12.0 * gamma));
    let value = if z > 0.0 {
        let zeta = 2.0 / 3.0 * z * z.sqrt();
        (log_prefactor + exponent + airy_ai_scaled(z)?.ln() - zeta).exp()
    } else {
        (log_prefactor + exponent).exp() * airy_ai(z)?
    };
    Ok(Complex64::new(value, 0.0))
}

/// The γ = 0 factor: π^{-1/4} s^{-1/2} exp(−(x − y_m)²/(2s²)).
pub fn gaussian_added_factor(x: f64, s: f64, y_m: f64) -> Result<Complex64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("squeeze factor must be positive, got {s}")));
    }
    let delta = x - y_m;
    Ok(Complex64::new(
        PI.powf(-0.25) / s.sqrt() * (-delta * delta / (2.0 * s * s)).exp(),
        0.0,
    ))
}

fn factor_for(x: f64, params: &GateParams) -> Result<Complex64> {
    if params.gamma == 0.0 {
        gaussian_added_factor(x, params.s, params.y_m)
    } else {
        added_factor(x, params)
    }
}

/// ψ̃(x) = ψ(x)·φ̃(x − y_m) on the input grid. γ = 0 uses the Gaussian factor.
pub fn unnormalized_output(input: &WaveFunction, params: &GateParams) -> Result<Vec<Complex64>> {
    params.validate()?;
    input
        .grid()
        .nodes()
        .zip(input.amplitudes())
        .map(|(x, a)| Ok(a * factor_for(x, params)?))
        .collect()
}

fn density_of(amplitudes: &[Complex64], step: f64) -> Result<f64> {
    let density: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    let p = trapezoid(&density, step);
    if !(p >= PROBABILITY_FLOOR) || !p.is_finite() {
        return Err(Error::ZeroProbability(p));
    }
    Ok(p)
}

/// Runs the gate on a normalized input and conditions on `params.y_m`.
pub fn apply_gate(input: &WaveFunction, params: &GateParams) -> Result<ConditionalOutput> {
    input.require_normalized("apply_gate")?;
    let raw = unnormalized_output(input, params)?;
    let probability_density = density_of(&raw, input.grid().step())?;
    let scale = 1.0 / probability_density.sqrt();
    let state = WaveFunction::new(
        *input.grid(),
        raw.into_iter().map(|a| a * scale).collect(),
        format!("gate output gamma={} s={} y_m={}", params.gamma, params.s, params.y_m),
    )?;
    Ok(ConditionalOutput { state, probability_density, params: *params })
}

/// P(y_m) = ∫|ψ̃(x)|² dx for the given outcome.
pub fn outcome_probability_density(input: &WaveFunction, gamma: f64, s: f64, y_m: f64) -> Result<f64> {
    input.require_normalized("outcome_probability_density")?;
    let params = GateParams::new(gamma, s, y_m)?;
    let raw = unnormalized_output(input, &params)?;
    density_of(&raw, input.grid().step())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_oscillatory_gaussian, QuadratureSpec};
    use crate::states::{make_squeezed_vacuum, Grid};

    fn vacuum() -> WaveFunction {
        make_squeezed_vacuum(1.0, Grid::symmetric(12.0, 2048).unwrap()).unwrap()
    }

    fn quadrature_factor(delta: f64, gamma: f64, s: f64) -> Complex64 {
        let integral = integrate_oscillatory_gaussian(delta, gamma, s, &QuadratureSpec::for_squeeze(s)).unwrap();
        integral * (s.sqrt() / (PI.powf(0.75) * 2f64.sqrt()))
    }

    #[test]
    fn closed_form_matches_quadrature_at_origin() {
        let params = GateParams::new(0.1, 1.0, 0.0).unwrap();
        let closed = added_factor(0.0, &params).unwrap();
        let quad = quadrature_factor(0.0, 0.1, 1.0);
        assert!((closed - quad).norm() <= 1e-8 * quad.norm());
        assert!(quad.im.abs() <= 1e-8 * quad.norm());
        assert_eq!(closed.im, 0.0);
    }

    #[test]
    fn factor_vanishes_as_root_s() {
        let at = |s: f64| added_factor(0.0, &GateParams::new(0.1, s, 0.0).unwrap()).unwrap().re;
        let limit = 2f64.sqrt() * PI.powf(0.25) * 0.3f64.cbrt().recip() * crate::numerics::airy::AI_ZERO;
        for s in [1e-3, 1e-4, 1e-6] {
            assert!((at(s) / s.sqrt() - limit).abs() < 1e-6 * limit);
        }
        assert!(at(1e-6) < 1e-2 * at(1.0));
        let ratio = at(0.05) / at(1.0);
        let oracle = quadrature_factor(0.0, 0.1, 0.05).re / quadrature_factor(0.0, 0.1, 1.0).re;
        assert!((ratio - oracle).abs() < 1e-8);
    }

    #[test]
    fn zero_gamma_is_routed_away_from_airy() {
        let params = GateParams::new(0.0, 1.0, 0.0).unwrap();
        assert!(matches!(added_factor(0.0, &params), Err(Error::Domain(_))));
        for delta in [-2.0, 0.0, 1.5] {
            let g = gaussian_added_factor(delta, 0.7, 0.0).unwrap();
            let q = quadrature_factor(delta, 0.0, 0.7);
            assert!((g - q).norm() < 1e-13);
        }
    }

    #[test]
    fn no_overflow_in_extreme_regime() {
        // large s⁴/γ: exponent and Airy decay are individually out of range
        let params = GateParams::new(0.001, 1.0, 0.0).unwrap();
        for x in [-5.0, 0.0, 5.0, 50.0] {
            let v = added_factor(x, &params).unwrap();
            assert!(v.re.is_finite() && v.re >= 0.0, "x={x}: {v}");
        }
    }

    #[test]
    fn output_is_normalized() {
        let params = GateParams::new(0.1, 1.0 / 1.78, 3.0).unwrap();
        let out = apply_gate(&vacuum(), &params).unwrap();
        assert!((out.state.norm_sqr() - 1.0).abs() < 1e-9);
        assert!(out.probability_density > 0.0);
        let p = outcome_probability_density(&vacuum(), 0.1, 1.0 / 1.78, 3.0).unwrap();
        assert_eq!(p, out.probability_density);
    }

    #[test]
    fn output_ignores_input_phase_and_scale() {
        let params = GateParams::new(0.2, 0.5, 4.0).unwrap();
        let base = apply_gate(&vacuum(), &params).unwrap().state;
        let rotated = vacuum().scaled(Complex64::from_polar(1.0, 1.1)).unwrap();
        let out = apply_gate(&rotated, &params).unwrap().state;
        let overlap = base.inner(&out).unwrap();
        let phase = overlap / overlap.norm();
        let dist: f64 = base
            .amplitudes()
            .iter()
            .zip(out.amplitudes())
            .map(|(a, b)| (a * phase - b).norm_sqr())
            .sum::<f64>()
            * base.grid().step();
        assert!(dist.sqrt() <= 1e-10);
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let params = GateParams::new(0.1, 1.0, 3.0).unwrap();
        let doubled = vacuum().scaled(Complex64::new(2.0, 0.0)).unwrap();
        assert!(matches!(apply_gate(&doubled, &params), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_probability_outcome() {
        // outcome far in the Airy tail
        let params = GateParams::new(0.1, 1.0, -200.0).unwrap();
        assert!(matches!(apply_gate(&vacuum(), &params), Err(Error::ZeroProbability(_))));
    }

    #[test]
    fn probability_is_grid_independent() {
        let coarse = make_squeezed_vacuum(1.0, Grid::symmetric(12.0, 1024).unwrap()).unwrap();
        let fine = make_squeezed_vacuum(1.0, Grid::symmetric(12.0, 2047).unwrap()).unwrap();
        for &(g, s, y) in &[(0.1, 1.0, 3.0), (0.5, 0.2, 15.0), (0.2, 0.355, 6.0)] {
            let a = outcome_probability_density(&coarse, g, s, y).unwrap();
            let b = outcome_probability_density(&fine, g, s, y).unwrap();
            assert!(((a - b) / b).abs() < 1e-8);
        }
    }
}
