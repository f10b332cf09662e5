//! Brute-force references for the gate: direct quadrature of the added-factor
//! integral, and a two-mode grid simulation of entangling followed by the
//! ancilla momentum projection.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gate::{ConditionalOutput, PROBABILITY_FLOOR};
use crate::numerics::{integrate_oscillatory_gaussian, trapezoid, NeumaierSum, QuadratureSpec};
use crate::states::{make_squeezed_vacuum, GateParams, Grid, WaveFunction};

/// Upper bound on n₁·n₂ for a two-mode grid.
pub const MAX_TWO_MODE_ENTRIES: usize = 1 << 26;
/// Ancilla half-width in units of 1/s.
pub const ANCILLA_HALF_WIDTH: f64 = 10.0;
/// Required decay exponent of the first alias of the ancilla sum.
pub const ALIAS_EXPONENT: f64 = 36.0;

/// √s/(π^{3/4}√2) ∫ exp(i x'(δ + γx'²)) exp(−(s x')²/2) dx' by panel quadrature.
pub fn oracle_added_factor(x: f64, params: &GateParams, spec: &QuadratureSpec) -> Result<Complex64> {
    params.validate()?;
    let integral = integrate_oscillatory_gaussian(x - params.y_m, params.gamma, params.s, spec)?;
    Ok(integral * (params.s.sqrt() / (PI.powf(0.75) * 2f64.sqrt())))
}

/// Largest ancilla step for which the trapezoid sum over x₂ is alias free.
///
/// By Poisson summation the sum differs from the integral by the integral
/// evaluated at δ ± 2π/Δx₂. For γ > 0 the nearer image decays like
/// exp(−s²(2π/Δx₂ − |δ|)/(6γ)); for γ = 0 like exp(−(2π/Δx₂ − |δ|)²/(2s²)).
pub fn ancilla_step(params: &GateParams, max_abs_delta: f64) -> f64 {
    let GateParams { gamma, s, .. } = *params;
    let band = if gamma > 0.0 {
        ALIAS_EXPONENT * 6.0 * gamma / (s * s)
    } else {
        s * (2.0 * ALIAS_EXPONENT).sqrt()
    };
    2.0 * PI / (band + max_abs_delta)
}

/// Decay exponent of the first alias for a given step, the quantity bounded by [`ALIAS_EXPONENT`].
pub fn alias_exponent(params: &GateParams, max_abs_delta: f64, step: f64) -> f64 {
    let GateParams { gamma, s, .. } = *params;
    let gap = 2.0 * PI / step - max_abs_delta;
    if gamma > 0.0 {
        s * s * gap / (6.0 * gamma)
    } else {
        gap * gap / (2.0 * s * s)
    }
}

/// Joint wavefunction of target and ancilla, row-major in the target coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeGrid {
    pub grid_1: Grid,
    pub grid_2: Grid,
    pub amplitudes: Vec<Complex64>,
}

impl TwoModeGrid {
    pub fn row(&self, i: usize) -> &[Complex64] {
        let n2 = self.grid_2.n_points;
        &self.amplitudes[i * n2..(i + 1) * n2]
    }

    /// ∑|ψ|² Δx₁ Δx₂.
    pub fn norm_sqr(&self) -> f64 {
        let mut acc = NeumaierSum::default();
        for a in &self.amplitudes {
            acc.add(Complex64::new(a.norm_sqr(), 0.0));
        }
        acc.total().re * self.grid_1.step() * self.grid_2.step()
    }
}

fn product_state(input: &WaveFunction, ancilla: &WaveFunction) -> TwoModeGrid {
    let amplitudes = input
        .amplitudes()
        .iter()
        .flat_map(|a| ancilla.amplitudes().iter().map(move |b| a * b))
        .collect();
    TwoModeGrid { grid_1: *input.grid(), grid_2: *ancilla.grid(), amplitudes }
}

/// Applies e^{iγx₂³} and the C_Z phase e^{ix₁x₂}.
fn entangle_in_place(state: &mut TwoModeGrid, gamma: f64) {
    let grid_1 = state.grid_1;
    let grid_2 = state.grid_2;
    let n2 = grid_2.n_points;
    state.amplitudes.par_chunks_mut(n2).enumerate().for_each(|(i, row)| {
        let x1 = grid_1.node(i);
        for (j, a) in row.iter_mut().enumerate() {
            let x2 = grid_2.node(j);
            *a *= Complex64::from_polar(1.0, gamma * x2 * x2 * x2 + x1 * x2);
        }
    });
}

/// Builds the entangled two-mode state for `input` and a squeezed ancilla.
///
/// `refinement` divides the ancilla step chosen by [`ancilla_step`].
pub fn entangled_state(input: &WaveFunction, params: &GateParams, refinement: usize) -> Result<TwoModeGrid> {
    params.validate()?;
    input.require_normalized("entangled_state")?;
    if refinement == 0 {
        return Err(Error::domain("refinement must be at least 1"));
    }
    let grid_1 = *input.grid();
    let max_abs_delta = (grid_1.x_min - params.y_m).abs().max((grid_1.x_max - params.y_m).abs());
    let half_width = ANCILLA_HALF_WIDTH / params.s;
    let step = ancilla_step(params, max_abs_delta) / refinement as f64;
    let n2 = (2.0 * half_width / step).ceil() as usize + 1;
    let grid_2 = Grid::symmetric(half_width, n2)?;
    let exponent = alias_exponent(params, max_abs_delta, grid_2.step());
    if exponent < ALIAS_EXPONENT {
        return Err(Error::Numerical(format!("ancilla alias exponent {exponent} below {ALIAS_EXPONENT}")));
    }
    let entries = grid_1.n_points * n2;
    if entries > MAX_TWO_MODE_ENTRIES {
        return Err(Error::domain(format!(
            "two-mode grid needs {} x {n2} = {entries} entries, above the cap of {MAX_TWO_MODE_ENTRIES}",
            grid_1.n_points
        )));
    }
    let ancilla = make_squeezed_vacuum(params.s, grid_2)?;
    let mut state = product_state(input, &ancilla);
    entangle_in_place(&mut state, params.gamma);
    Ok(state)
}

/// Projects the ancilla on momentum `y_m`: (2π)^{-1/2} ∫ e^{−i y_m x₂} ψ(x₁, x₂) dx₂.
pub fn project_ancilla_momentum(state: &TwoModeGrid, y_m: f64) -> Vec<Complex64> {
    let grid_2 = state.grid_2;
    let weight = grid_2.step() / (2.0 * PI).sqrt();
    let n2 = grid_2.n_points;
    let kernel: Vec<Complex64> = (0..n2)
        .map(|j| {
            let end = if j == 0 || j + 1 == n2 { 0.5 } else { 1.0 };
            Complex64::from_polar(end * weight, -y_m * grid_2.node(j))
        })
        .collect();
    (0..state.grid_1.n_points)
        .into_par_iter()
        .map(|i| {
            let mut acc = NeumaierSum::default();
            for (a, k) in state.row(i).iter().zip(&kernel) {
                acc.add(a * k);
            }
            acc.total()
        })
        .collect()
}

/// Full two-mode simulation of the gate with the default ancilla step.
pub fn oracle_two_mode(input: &WaveFunction, params: &GateParams) -> Result<ConditionalOutput> {
    oracle_two_mode_refined(input, params, 1)
}

/// As [`oracle_two_mode`] with the ancilla step divided by `refinement`.
pub fn oracle_two_mode_refined(input: &WaveFunction, params: &GateParams, refinement: usize) -> Result<ConditionalOutput> {
    let state = entangled_state(input, params, refinement)?;
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::Numerical(format!("two-mode state norm {norm} after entangling")));
    }
    let projected = project_ancilla_momentum(&state, params.y_m);
    let density: Vec<f64> = projected.iter().map(|a| a.norm_sqr()).collect();
    let probability_density = trapezoid(&density, input.grid().step());
    if !(probability_density >= PROBABILITY_FLOOR) || !probability_density.is_finite() {
        return Err(Error::ZeroProbability(probability_density));
    }
    let scale = 1.0 / probability_density.sqrt();
    let state = WaveFunction::new(
        *input.grid(),
        projected.into_iter().map(|a| a * scale).collect(),
        format!("two-mode oracle gamma={} s={} y_m={}", params.gamma, params.s, params.y_m),
    )?;
    Ok(ConditionalOutput { state, probability_density, params: *params })
}

/// L² distance between two states on the same grid after removing the relative phase.
pub fn phase_aligned_distance(a: &WaveFunction, b: &WaveFunction) -> Result<f64> {
    let overlap = a.inner(b)?;
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    let diff: Vec<f64> = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x * phase - y).norm_sqr())
        .collect();
    Ok(trapezoid(&diff, a.grid().step()).sqrt())
}
