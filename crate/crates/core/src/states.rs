//! Grids, wavefunctions, gate parameters and the state constructors:
//! squeezed vacuum, cubic phase state and the ideal two-component cat.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{trapezoid, trapezoid_complex};

/// Tolerance on ∫|ψ|² for a state to count as normalized.
pub const NORM_TOLERANCE: f64 = 1e-6;
/// Largest amplitude envelope allowed at the edges of a constructor grid.
pub const EDGE_ENVELOPE_LIMIT: f64 = 1e-12;
/// Default number of grid points.
pub const DEFAULT_POINTS: usize = 2048;

/// Uniform coordinate grid with inclusive endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::domain(format!("grid needs finite x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n_points < 16 {
            return Err(Error::domain(format!("grid needs at least 16 points, got {n_points}")));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    /// Symmetric grid [-half_width, half_width].
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    /// Default grid for cat-state work: |x| ≤ p⁺ + 8 with 2048 points.
    pub fn for_cat(p_plus: f64) -> Self {
        Self::symmetric(p_plus.max(0.0) + 8.0, DEFAULT_POINTS).expect("valid default grid")
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        // anchor the last node exactly on x_max
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.node(i))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Same bounds with `n_points` replaced.
    pub fn with_points(&self, n_points: usize) -> Result<Self> {
        Self::new(self.x_min, self.x_max, n_points)
    }
}

/// The physical knobs of the gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    /// Cubic deformation coefficient γ in exp(iγq³).
    pub gamma: f64,
    /// Momentum squeeze factor s (1/s is the coordinate stretching factor).
    pub s: f64,
    /// Measured ancilla momentum.
    pub y_m: f64,
}

impl GateParams {
    pub fn new(gamma: f64, s: f64, y_m: f64) -> Result<Self> {
        let params = Self { gamma, s, y_m };
        params.validate()?;
        Ok(params)
    }

    /// Parameters with the squeezing given in dB.
    pub fn from_db(gamma: f64, db: f64, y_m: f64) -> Result<Self> {
        Self::new(gamma, crate::analysis::db_to_s(db)?, y_m)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() || !self.y_m.is_finite() {
            return Err(Error::domain("gamma and y_m must be finite"));
        }
        if !(self.s > 0.0) || !self.s.is_finite() {
            return Err(Error::domain(format!("squeeze factor s must be positive, got {}", self.s)));
        }
        if self.gamma < 0.0 {
            return Err(Error::domain(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Checks the preconditions of the Airy-form path (γ > 0).
    pub fn require_airy(&self) -> Result<()> {
        self.validate()?;
        if self.gamma <= 0.0 {
            return Err(Error::domain(
                "gamma must be positive for the Airy closed form; use the Gaussian special case for gamma = 0",
            ));
        }
        Ok(())
    }
}

/// How a coherent amplitude α maps to a coordinate wavefunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CoherentConvention {
    /// α = x₀ + i p₀ displaces the vacuum by x₀ in coordinate and p₀ in
    /// momentum: π^{-1/4} exp(-(x - x₀)²/2 + i p₀ x). With α = i p⁺ the two
    /// cat components sit at p = ±p⁺.
    #[default]
    MomentumShift,
    /// The usual a = (q + ip)/√2 convention:
    /// π^{-1/4} exp(-(x - √2 Re α)²/2 + i √2 Im α x - i Re α Im α).
    Sqrt2,
}

impl CoherentConvention {
    /// ⟨-α|α⟩, which is real in both conventions.
    pub fn mirror_overlap(&self, alpha: Complex64) -> f64 {
        match self {
            CoherentConvention::MomentumShift => (-alpha.norm_sqr()).exp(),
            CoherentConvention::Sqrt2 => (-2.0 * alpha.norm_sqr()).exp(),
        }
    }

    /// Coordinate wavefunction of |α⟩ at `x`.
    pub fn amplitude(&self, alpha: Complex64, x: f64) -> Complex64 {
        let norm = PI.powf(-0.25);
        match self {
            CoherentConvention::MomentumShift => {
                let d = x - alpha.re;
                Complex64::from_polar(norm * (-0.5 * d * d).exp(), alpha.im * x)
            }
            CoherentConvention::Sqrt2 => {
                let d = x - std::f64::consts::SQRT_2 * alpha.re;
                let phase = std::f64::consts::SQRT_2 * alpha.im * x - alpha.re * alpha.im;
                Complex64::from_polar(norm * (-0.5 * d * d).exp(), phase)
            }
        }
    }
}

/// Parameters of the ideal cat (e^{iθ}|α⟩ + e^{-iθ}|-α⟩)/N with α = i p⁺.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatParams {
    pub alpha: Complex64,
    pub theta: f64,
    pub p_plus: f64,
}

impl CatParams {
    /// Builds α = i·p_plus with θ reduced to (-π, π].
    pub fn new(p_plus: f64, theta: f64) -> Result<Self> {
        if !(p_plus >= 0.0) || !p_plus.is_finite() || !theta.is_finite() {
            return Err(Error::domain(format!("invalid cat parameters p_plus={p_plus}, theta={theta}")));
        }
        Ok(Self {
            alpha: Complex64::new(0.0, p_plus),
            theta: reduce_angle(theta),
            p_plus,
        })
    }
}

/// Reduces an angle to (-π, π].
pub fn reduce_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let r = theta - two_pi * ((theta + PI) / two_pi).floor();
    if r <= -PI {
        r + two_pi
    } else {
        r
    }
}

/// Complex amplitudes on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    amplitudes: Vec<Complex64>,
    label: String,
    normalized: bool,
}

impl WaveFunction {
    pub fn new(grid: Grid, amplitudes: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        let grid = Grid::new(grid.x_min, grid.x_max, grid.n_points)?;
        if amplitudes.len() != grid.n_points {
            return Err(Error::domain(format!(
                "expected {} amplitudes, got {}",
                grid.n_points,
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::domain("wavefunction amplitudes must be finite"));
        }
        let mut wf = Self { grid, amplitudes, label: label.into(), normalized: false };
        wf.normalized = (wf.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE;
        Ok(wf)
    }

    /// Samples `f` on the grid nodes.
    pub fn from_fn<F>(grid: Grid, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        let amplitudes = grid.nodes().map(f).collect();
        Self::new(grid, amplitudes, label)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn require_normalized(&self, what: &str) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "{what}: state '{}' is not normalized (norm² = {})",
                self.label,
                self.norm_sqr()
            )))
        }
    }

    /// Trapezoidal ∫|ψ|² dx.
    pub fn norm_sqr(&self) -> f64 {
        trapezoid(&self.density(), self.grid.step())
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Returns ψ/‖ψ‖.
    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::domain(format!("cannot normalize state with norm² = {n}")));
        }
        let scale = 1.0 / n.sqrt();
        Self::new(self.grid, self.amplitudes.iter().map(|a| a * scale).collect(), self.label.clone())
    }

    /// Trapezoidal ⟨self|other⟩ on a shared grid.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::domain("inner product requires identical grids"));
        }
        let products: Vec<Complex64> = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .collect();
        Ok(trapezoid_complex(&products, self.grid.step()))
    }

    /// ⟨x^k⟩ with respect to the density |ψ|²/‖ψ‖².
    pub fn moment(&self, k: i32) -> f64 {
        let weighted: Vec<f64> = self
            .grid
            .nodes()
            .zip(&self.amplitudes)
            .map(|(x, a)| x.powi(k) * a.norm_sqr())
            .collect();
        trapezoid(&weighted, self.grid.step()) / self.norm_sqr()
    }

    pub fn mean_x(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance_x(&self) -> f64 {
        let m = self.mean_x();
        self.moment(2) - m * m
    }

    /// Momentum-space amplitude φ(p) = (2π)^{-1/2} ∫ ψ(x) e^{-ipx} dx.
    pub fn momentum_amplitude(&self, p: f64) -> Complex64 {
        let values: Vec<Complex64> = self
            .grid
            .nodes()
            .zip(&self.amplitudes)
            .map(|(x, a)| a * Complex64::from_polar(1.0, -p * x))
            .collect();
        trapezoid_complex(&values, self.grid.step()) / (2.0 * PI).sqrt()
    }

    /// |ψ(x)|² by linear interpolation; zero outside the grid.
    pub fn density_at(&self, x: f64) -> f64 {
        if !self.grid.contains(x) {
            return 0.0;
        }
        let pos = (x - self.grid.x_min) / self.grid.step();
        let i = (pos.floor() as usize).min(self.grid.n_points - 2);
        let t = pos - i as f64;
        (1.0 - t) * self.amplitudes[i].norm_sqr() + t * self.amplitudes[i + 1].norm_sqr()
    }

    /// Band-limited (Whittaker–Shannon) interpolation of ψ at `x`.
    pub fn sinc_interpolate(&self, x: f64) -> Complex64 {
        let h = self.grid.step();
        let pos = (x - self.grid.x_min) / h;
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, a) in self.amplitudes.iter().enumerate() {
            let u = pos - n as f64;
            let w = if u == 0.0 { 1.0 } else { (PI * u).sin() / (PI * u) };
            acc += a * w;
        }
        acc
    }

    /// Resamples onto `grid` by band-limited interpolation.
    pub fn resample(&self, grid: Grid) -> Result<Self> {
        if grid == self.grid {
            return Ok(self.clone());
        }
        Self::from_fn(grid, self.label.clone(), |x| self.sinc_interpolate(x))
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Result<Self> {
        Self::new(self.grid, self.amplitudes.iter().map(|a| a * factor).collect(), self.label.clone())
    }

    pub fn to_record(&self) -> WaveFunctionRecord {
        WaveFunctionRecord {
            x_min: self.grid.x_min,
            x_max: self.grid.x_max,
            n_points: self.grid.n_points,
            re: self.amplitudes.iter().map(|a| a.re).collect(),
            im: self.amplitudes.iter().map(|a| a.im).collect(),
            label: self.label.clone(),
        }
    }

    pub fn from_record(record: WaveFunctionRecord) -> Result<Self> {
        if record.re.len() != record.im.len() {
            return Err(Error::domain("re and im arrays differ in length"));
        }
        let grid = Grid::new(record.x_min, record.x_max, record.n_points)?;
        let amps = record.re.iter().zip(&record.im).map(|(r, i)| Complex64::new(*r, *i)).collect();
        Self::new(grid, amps, record.label)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&self.to_record()).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: WaveFunctionRecord = serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))?;
        Self::from_record(record)
    }
}

/// Serialized form of a [`WaveFunction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFunctionRecord {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub label: String,
}

fn squeezed_amplitude(s: f64, x: f64) -> f64 {
    s.sqrt() * PI.powf(-0.25) * (-0.5 * (s * x) * (s * x)).exp()
}

fn check_squeezed_grid(s: f64, grid: &Grid) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("squeeze factor must be positive, got {s}")));
    }
    let edge = squeezed_amplitude(s, grid.x_min).max(squeezed_amplitude(s, grid.x_max));
    if edge > EDGE_ENVELOPE_LIMIT {
        return Err(Error::domain(format!(
            "grid [{}, {}] too narrow for s = {s}: envelope {edge:e} at the edge (need [-8/s, 8/s])",
            grid.x_min, grid.x_max
        )));
    }
    Ok(())
}

/// Squeezed vacuum √s π^{-1/4} exp(-(s x)²/2); s = 1 is the vacuum.
pub fn make_squeezed_vacuum(s: f64, grid: Grid) -> Result<WaveFunction> {
    check_squeezed_grid(s, &grid)?;
    WaveFunction::from_fn(grid, format!("squeezed vacuum s={s}"), |x| {
        Complex64::new(squeezed_amplitude(s, x), 0.0)
    })
}

/// exp(iγx³) applied to the squeezed vacuum.
pub fn make_cubic_phase_state(gamma: f64, s: f64, grid: Grid) -> Result<WaveFunction> {
    check_squeezed_grid(s, &grid)?;
    if !gamma.is_finite() {
        return Err(Error::domain("gamma must be finite"));
    }
    WaveFunction::from_fn(grid, format!("cubic phase gamma={gamma} s={s}"), |x| {
        Complex64::from_polar(squeezed_amplitude(s, x), gamma * x * x * x)
    })
}

/// Ideal cat state in the default (momentum-shift) convention.
pub fn make_ideal_cat(cat: &CatParams, grid: Grid) -> Result<WaveFunction> {
    make_ideal_cat_with(cat, grid, CoherentConvention::default())
}

/// (e^{iθ}|α⟩ + e^{-iθ}|-α⟩)/√(2(1 + cos2θ ⟨-α|α⟩)) in the given convention.
pub fn make_ideal_cat_with(cat: &CatParams, grid: Grid, convention: CoherentConvention) -> Result<WaveFunction> {
    let overlap = convention.mirror_overlap(cat.alpha);
    let denom = 2.0 * (1.0 + (2.0 * cat.theta).cos() * overlap);
    if denom <= 1e-14 {
        return Err(Error::DegenerateSuperposition);
    }
    let norm = 1.0 / denom.sqrt();
    let plus = Complex64::from_polar(norm, cat.theta);
    let minus = Complex64::from_polar(norm, -cat.theta);
    let wf = WaveFunction::from_fn(grid, format!("cat p+={} theta={}", cat.p_plus, cat.theta), |x| {
        plus * convention.amplitude(cat.alpha, x) + minus * convention.amplitude(-cat.alpha, x)
    })?;
    // a grid that clips either component shows up as lost norm
    if !wf.is_normalized() {
        return Err(Error::domain(format!(
            "grid [{}, {}] does not support both cat components (norm² = {})",
            grid.x_min,
            grid.x_max,
            wf.norm_sqr()
        )));
    }
    Ok(wf)
}

/// Cat parameters matched to a gate configuration:
/// p⁺ = √(y_m/3γ), θ = π/4 − (2/(3√(3γ))) y_m^{3/2}.
pub fn cat_params_from_gate(params: &GateParams) -> Result<CatParams> {
    params.require_airy()?;
    if params.y_m < 0.0 {
        return Err(Error::domain(format!(
            "cat parameters need y_m >= 0, got {}",
            params.y_m
        )));
    }
    let p_plus = (params.y_m / (3.0 * params.gamma)).sqrt();
    let theta = FRAC_PI_4 - 2.0 / (3.0 * (3.0 * params.gamma).sqrt()) * params.y_m.powf(1.5);
    CatParams::new(p_plus, theta)
}
