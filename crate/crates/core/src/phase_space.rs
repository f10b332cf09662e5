//! Phase-space pictures: the Wigner transform of a sampled wavefunction, the
//! Wigner logarithmic negativity, and the semiclassical shear of the squeezed
//! ancilla ellipse.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::NeumaierSum;
use crate::states::WaveFunction;

/// Default number of Wigner samples along each axis.
pub const DEFAULT_WIGNER_POINTS: usize = 256;
/// Largest density allowed on the boundary of a Wigner window.
pub const EDGE_DENSITY_LIMIT: f64 = 1e-10;
/// Largest imaginary residue tolerated before discarding it.
pub const IMAGINARY_RESIDUE_LIMIT: f64 = 1e-8;

const SUPPORT_THRESHOLD: f64 = 1e-13;

/// Rectangle of the phase plane sampled by a Wigner grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl PhaseBounds {
    pub fn new(x_min: f64, x_max: f64, p_min: f64, p_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, p_min, p_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || p_min >= p_max {
            return Err(Error::domain(format!(
                "invalid phase-space window [{x_min}, {x_max}] x [{p_min}, {p_max}]"
            )));
        }
        Ok(Self { x_min, x_max, p_min, p_max })
    }

    /// Smallest window, padded by `margin`, outside which both the position
    /// and momentum densities of `state` are negligible.
    pub fn covering(state: &WaveFunction, margin: f64) -> Result<Self> {
        let grid = state.grid();
        let density = state.density();
        let (lo, hi) = support_indices(&density)
            .ok_or_else(|| Error::domain("state has no support above threshold"))?;
        let x_min = (grid.node(lo) - margin).max(grid.x_min);
        let x_max = (grid.node(hi) + margin).min(grid.x_max);

        let (momenta, momentum_density) = momentum_density_fft(state);
        let (plo, phi) = support_indices(&momentum_density)
            .ok_or_else(|| Error::domain("state has no momentum support above threshold"))?;
        Self::new(x_min, x_max, momenta[plo] - margin, momenta[phi] + margin)
    }
}

fn support_indices(values: &[f64]) -> Option<(usize, usize)> {
    let lo = values.iter().position(|&v| v > SUPPORT_THRESHOLD)?;
    let hi = values.iter().rposition(|&v| v > SUPPORT_THRESHOLD)?;
    Some((lo, hi))
}

/// Momentum density on the FFT frequency grid, ordered by increasing p.
fn momentum_density_fft(state: &WaveFunction) -> (Vec<f64>, Vec<f64>) {
    let n = state.amplitudes().len();
    let dx = state.grid().step();
    let mut buffer = state.amplitudes().to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
    let dp = 2.0 * PI / (n as f64 * dx);
    let scale = dx * dx / (2.0 * PI);
    let mut pairs: Vec<(f64, f64)> = buffer
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let signed = if k <= (n - 1) / 2 { k as f64 } else { k as f64 - n as f64 };
            (signed * dp, v.norm_sqr() * scale)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Samples of W(x, p) on a uniform rectangle, stored row-major in x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_x: usize,
    pub n_p: usize,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_x - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.n_p - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        axis_node(self.x_min, self.x_max, self.n_x, i)
    }

    pub fn p(&self, j: usize) -> f64 {
        axis_node(self.p_min, self.p_max, self.n_p, j)
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_p + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_p..(i + 1) * self.n_p]
    }

    fn weighted_sum(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = NeumaierSum::default();
        for &v in &self.values {
            acc.add(Complex64::new(f(v), 0.0));
        }
        acc.total().re * self.dx() * self.dp()
    }

    /// ∑ W Δx Δp.
    pub fn total_mass(&self) -> f64 {
        self.weighted_sum(|v| v)
    }

    /// ∑ |W| Δx Δp.
    pub fn absolute_mass(&self) -> f64 {
        self.weighted_sum(f64::abs)
    }

    /// 2π ∑ W² Δx Δp, equal to one for pure states.
    pub fn purity(&self) -> f64 {
        2.0 * PI * self.weighted_sum(|v| v * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// ∑_p W Δp at every x node.
    pub fn position_marginal(&self) -> Vec<f64> {
        let dp = self.dp();
        (0..self.n_x).map(|i| self.row(i).iter().sum::<f64>() * dp).collect()
    }

    /// Unit mass to 1e-3 and |W| ≤ 1/π + 1e-6.
    pub fn check_invariants(&self) -> Result<()> {
        let mass = self.total_mass();
        if (mass - 1.0).abs() > 1e-3 {
            return Err(Error::Numerical(format!("Wigner mass {mass} differs from 1 by more than 1e-3")));
        }
        let peak = self.max_abs();
        if peak > 1.0 / PI + 1e-6 {
            return Err(Error::Numerical(format!("Wigner magnitude {peak} exceeds 1/pi")));
        }
        Ok(())
    }

    /// Writes a names line, a bounds line, then one CSV row of values per x node.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x_min,x_max,p_min,p_max,n_x,n_p")?;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            self.x_min, self.x_max, self.p_min, self.p_max, self.n_x, self.n_p
        )?;
        for i in 0..self.n_x {
            let line: Vec<String> = self.row(i).iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

fn axis_node(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// Shared FFT plans and the transformed Bluestein kernel for one transform.
struct ChirpPlan {
    length: usize,
    half_span: usize,
    beta: f64,
    p_min: f64,
    dx: f64,
    n_p: usize,
    kernel: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl ChirpPlan {
    fn new(planner: &mut FftPlanner<f64>, half_span: usize, n_p: usize, dx: f64, p_min: f64, dp: f64) -> Self {
        let span = 2 * half_span + 1;
        let length = (span + n_p - 1).next_power_of_two();
        let beta = 2.0 * dp * dx;
        let chirp = |n: usize| Complex64::from_polar(1.0, -0.5 * beta * (n as f64) * (n as f64));
        let mut kernel = vec![Complex64::new(0.0, 0.0); length];
        for (n, slot) in kernel.iter_mut().enumerate().take(n_p) {
            *slot = chirp(n);
        }
        for n in 1..span {
            kernel[length - n] = chirp(n);
        }
        let forward = planner.plan_fft_forward(length);
        let inverse = planner.plan_fft_inverse(length);
        forward.process(&mut kernel);
        Self { length, half_span, beta, p_min, dx, n_p, kernel, forward, inverse }
    }

    /// Σ_m c_m exp(2i p_j m dx) for m = -half_span..=half_span, every p_j at once.
    fn evaluate(&self, products: &[Complex64]) -> Vec<Complex64> {
        let span = 2 * self.half_span + 1;
        debug_assert_eq!(products.len(), span);
        let mut buffer = vec![Complex64::new(0.0, 0.0); self.length];
        for (m, (slot, c)) in buffer.iter_mut().zip(products).enumerate() {
            let mf = m as f64;
            let phase = 2.0 * self.p_min * mf * self.dx + 0.5 * self.beta * mf * mf;
            *slot = c * Complex64::from_polar(1.0, phase);
        }
        self.forward.process(&mut buffer);
        for (b, k) in buffer.iter_mut().zip(&self.kernel) {
            *b *= k;
        }
        self.inverse.process(&mut buffer);
        let norm = 1.0 / self.length as f64;
        let offset = self.half_span as f64;
        (0..self.n_p)
            .map(|j| {
                let jf = j as f64;
                let p = self.p_min + jf * self.beta / (2.0 * self.dx);
                let phase = 0.5 * self.beta * jf * jf - 2.0 * p * offset * self.dx;
                buffer[j] * norm * Complex64::from_polar(1.0, phase)
            })
            .collect()
    }
}

/// Band-limited translation: returns samples of ψ(x_j + shift).
fn fractional_shift(
    amplitudes: &[Complex64],
    dx: f64,
    shift: f64,
    forward: &Arc<dyn Fft<f64>>,
    inverse: &Arc<dyn Fft<f64>>,
) -> Vec<Complex64> {
    let n = amplitudes.len();
    let mut buffer = amplitudes.to_vec();
    forward.process(&mut buffer);
    let base = 2.0 * PI * shift / (n as f64 * dx);
    for (k, b) in buffer.iter_mut().enumerate() {
        if n.is_multiple_of(2) && k == n / 2 {
            *b *= (base * k as f64).cos();
            continue;
        }
        let signed = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
        *b *= Complex64::from_polar(1.0, base * signed);
    }
    inverse.process(&mut buffer);
    let norm = 1.0 / n as f64;
    buffer.iter_mut().for_each(|b| *b *= norm);
    buffer
}

/// W(x, p) = (1/π) ∫ ψ*(x + y) ψ(x − y) e^{2ipy} dy on an `n_x` × `n_p` grid.
///
/// The y quadrature uses the state's own grid spacing over the full grid;
/// Wigner rows between lattice nodes use a band-limited shift of the state.
pub fn wigner_transform(state: &WaveFunction, bounds: PhaseBounds, n_x: usize, n_p: usize) -> Result<WignerGrid> {
    state.require_normalized("wigner_transform")?;
    if n_x < 2 || n_p < 2 {
        return Err(Error::domain("Wigner grid needs at least two points per axis"));
    }
    let bounds = PhaseBounds::new(bounds.x_min, bounds.x_max, bounds.p_min, bounds.p_max)?;
    for x in [bounds.x_min, bounds.x_max] {
        let d = state.density_at(x);
        if d >= EDGE_DENSITY_LIMIT {
            return Err(Error::domain(format!("Wigner window edge x={x} cuts the state (density {d:e})")));
        }
    }
    for p in [bounds.p_min, bounds.p_max] {
        let d = state.momentum_amplitude(p).norm_sqr();
        if d >= EDGE_DENSITY_LIMIT {
            return Err(Error::domain(format!(
                "Wigner window edge p={p} cuts the state (momentum density {d:e})"
            )));
        }
    }

    let grid = *state.grid();
    let amplitudes = state.amplitudes();
    let n = amplitudes.len();
    let dx = grid.step();
    let dp = (bounds.p_max - bounds.p_min) / (n_p - 1) as f64;
    let half_span = (n - 1) / 2;

    let mut planner = FftPlanner::new();
    let chirp = ChirpPlan::new(&mut planner, half_span, n_p, dx, bounds.p_min, dp);
    let shift_forward = planner.plan_fft_forward(n);
    let shift_inverse = planner.plan_fft_inverse(n);

    let rows: Vec<Result<Vec<f64>>> = (0..n_x)
        .into_par_iter()
        .map(|i| {
            let x = axis_node(bounds.x_min, bounds.x_max, n_x, i);
            let position = (x - grid.x_min) / dx;
            let k = position.floor();
            if k < 0.0 || k > (n - 1) as f64 {
                return Ok(vec![0.0; n_p]);
            }
            let k = k as usize;
            let shift = (position - k as f64) * dx;
            let shifted;
            let phi: &[Complex64] = if shift.abs() <= 1e-12 * dx {
                amplitudes
            } else {
                shifted = fractional_shift(amplitudes, dx, shift, &shift_forward, &shift_inverse);
                &shifted
            };
            let reach = k.min(n - 1 - k);
            let mut products = vec![Complex64::new(0.0, 0.0); 2 * half_span + 1];
            for m in 0..=reach.min(half_span) {
                let plus = phi[k + m].conj() * phi[k - m];
                products[half_span + m] = plus;
                if m > 0 {
                    products[half_span - m] = phi[k - m].conj() * phi[k + m];
                }
            }
            let sums = chirp.evaluate(&products);
            let scale = dx / PI;
            let mut row = Vec::with_capacity(n_p);
            for (j, v) in sums.iter().enumerate() {
                let w = v * scale;
                if w.im.abs() > IMAGINARY_RESIDUE_LIMIT {
                    return Err(Error::Numerical(format!(
                        "Wigner value at x={x}, p={} has imaginary residue {:e}",
                        axis_node(bounds.p_min, bounds.p_max, n_p, j),
                        w.im
                    )));
                }
                row.push(w.re);
            }
            Ok(row)
        })
        .collect();

    let mut values = Vec::with_capacity(n_x * n_p);
    for row in rows {
        values.extend(row?);
    }
    Ok(WignerGrid {
        x_min: bounds.x_min,
        x_max: bounds.x_max,
        p_min: bounds.p_min,
        p_max: bounds.p_max,
        n_x,
        n_p,
        values,
    })
}

/// ln ∑ |W| Δx Δp.
pub fn wigner_log_negativity(w: &WignerGrid) -> f64 {
    w.absolute_mass().ln()
}

/// The phase-plane shear (x, y) → (x, y + 3γx²) approximating the cubic evolution.
pub fn semiclassical_shear(x: f64, y: f64, gamma: f64) -> (f64, f64) {
    (x, y + 3.0 * gamma * x * x)
}

/// Closed polyline bounding the sheared ancilla ellipse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportRegion {
    pub boundary: Vec<(f64, f64)>,
    pub sigma_level: f64,
}

impl SupportRegion {
    pub fn is_closed(&self) -> bool {
        self.boundary.len() > 3 && self.boundary.first() == self.boundary.last()
    }

    /// Shoelace area of the polygon.
    pub fn area(&self) -> f64 {
        let twice: f64 = self
            .boundary
            .windows(2)
            .map(|w| w[0].0 * w[1].1 - w[1].0 * w[0].1)
            .sum();
        0.5 * twice.abs()
    }

    /// Disjoint x-intervals where the line p = `p` lies inside the region.
    pub fn horizontal_intersections(&self, p: f64) -> Vec<(f64, f64)> {
        let mut crossings: Vec<f64> = self
            .boundary
            .windows(2)
            .filter_map(|w| {
                let ((x0, p0), (x1, p1)) = (w[0], w[1]);
                if (p0 <= p) == (p1 <= p) {
                    return None;
                }
                Some(x0 + (p - p0) * (x1 - x0) / (p1 - p0))
            })
            .collect();
        crossings.sort_by(f64::total_cmp);
        crossings.chunks_exact(2).map(|c| (c[0], c[1])).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,p")?;
        for (x, p) in &self.boundary {
            writeln!(out, "{x:e},{p:e}")?;
        }
        Ok(())
    }
}

/// The `sigma_level` contour of the squeezed vacuum (semi-axes level/(√2 s)
/// in x and level·s/√2 in p) mapped through [`semiclassical_shear`].
///
/// Vertices are placed at uniform angles starting on the x axis, so the
/// vertex set is mirror symmetric in p and the polygon area is unchanged by
/// the shear.
pub fn build_support_region(s: f64, gamma: f64, sigma_level: f64, n_boundary: usize) -> Result<SupportRegion> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("squeeze factor must be positive, got {s}")));
    }
    if !gamma.is_finite() || !(sigma_level > 0.0) || !sigma_level.is_finite() {
        return Err(Error::domain("gamma and sigma_level must be finite, sigma_level positive"));
    }
    if n_boundary < 32 {
        return Err(Error::domain(format!("support region needs at least 32 points, got {n_boundary}")));
    }
    let semi_x = sigma_level / (2f64.sqrt() * s);
    let semi_p = sigma_level * s / 2f64.sqrt();
    let mut boundary: Vec<(f64, f64)> = (0..n_boundary)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n_boundary as f64;
            semiclassical_shear(semi_x * t.cos(), semi_p * t.sin(), gamma)
        })
        .collect();
    boundary.push(boundary[0]);
    Ok(SupportRegion { boundary, sigma_level })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::apply_gate;
    use crate::states::{cat_params_from_gate, make_cubic_phase_state, make_ideal_cat, make_squeezed_vacuum, CatParams, GateParams, Grid};
    use proptest::prelude::*;

    fn vacuum() -> WaveFunction {
        make_squeezed_vacuum(1.0, Grid::symmetric(12.0, 1024).unwrap()).unwrap()
    }

    fn auto(state: &WaveFunction, n: usize) -> WignerGrid {
        let bounds = PhaseBounds::covering(state, 0.5).unwrap();
        wigner_transform(state, bounds, n, n).unwrap()
    }

    #[test]
    fn vacuum_wigner_is_gaussian() {
        let w = wigner_transform(&vacuum(), PhaseBounds::new(-7.0, 7.0, -7.0, 7.0).unwrap(), 141, 141).unwrap();
        assert!((w.value(70, 70) - 1.0 / PI).abs() < 1e-6);
        for &(i, j) in &[(10, 20), (60, 75), (90, 33)] {
            let (x, p) = (w.x(i), w.p(j));
            assert!((w.value(i, j) - (-x * x - p * p).exp() / PI).abs() < 1e-9);
        }
        w.check_invariants().unwrap();
        assert!(wigner_log_negativity(&w).abs() < 1e-3);
    }

    #[test]
    fn off_lattice_rows_use_band_limited_shift() {
        // ±6.9629 are not lattice nodes of the state grid
        let w = wigner_transform(&vacuum(), PhaseBounds::new(-6.9629, 6.9629, -6.0, 6.0).unwrap(), 7, 121).unwrap();
        for i in 0..7 {
            let x = w.x(i);
            assert!((w.value(i, 60) - (-x * x).exp() / PI).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn tight_window_is_rejected() {
        let err = wigner_transform(&vacuum(), PhaseBounds::new(-2.0, 2.0, -7.0, 7.0).unwrap(), 32, 32).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let err = wigner_transform(&vacuum(), PhaseBounds::new(-7.0, 7.0, -7.0, 2.0).unwrap(), 32, 32).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn purity_and_marginal_of_gate_output() {
        let out = apply_gate(&vacuum(), &GateParams::from_db(0.1, 5.0, 3.0).unwrap()).unwrap().state;
        let w = auto(&out, DEFAULT_WIGNER_POINTS);
        w.check_invariants().unwrap();
        assert!((w.purity() - 1.0).abs() < 1e-3);
        for (i, m) in w.position_marginal().iter().enumerate() {
            assert!((m - out.sinc_interpolate(w.x(i)).norm_sqr()).abs() < 1e-4);
        }
    }

    #[test]
    fn marginal_reproduces_density() {
        let cat = make_ideal_cat(&CatParams::new(10f64.sqrt(), 0.3).unwrap(), Grid::for_cat(10f64.sqrt())).unwrap();
        let w = auto(&cat, 301);
        for (i, m) in w.position_marginal().iter().enumerate() {
            let exact = cat.sinc_interpolate(w.x(i)).norm_sqr();
            assert!((m - exact).abs() < 1e-4, "x={}: {m} vs {exact}", w.x(i));
        }
    }

    #[test]
    fn high_fidelity_output_has_fringes() {
        let params = GateParams::from_db(0.5, 14.0, 15.0).unwrap();
        let out = apply_gate(&vacuum(), &params).unwrap().state;
        let w = auto(&out, DEFAULT_WIGNER_POINTS);
        w.check_invariants().unwrap();
        assert!(w.min_value() < -0.05);
        // positive lobes near p = ±√10 on the x = 0 line
        let centre = (0..w.n_x).min_by(|&a, &b| w.x(a).abs().total_cmp(&w.x(b).abs())).unwrap();
        let cat = cat_params_from_gate(&params).unwrap();
        for target in [cat.p_plus, -cat.p_plus] {
            let j = (0..w.n_p).min_by(|&a, &b| (w.p(a) - target).abs().total_cmp(&(w.p(b) - target).abs())).unwrap();
            assert!(w.value(centre, j) > 0.1);
        }
    }

    #[test]
    fn cat_log_negativity_converges() {
        let p_plus = 10f64.sqrt();
        let grid = Grid::for_cat(p_plus);
        let cat = make_ideal_cat(&CatParams::new(p_plus, PI / 4.0).unwrap(), grid).unwrap();
        let bounds = PhaseBounds::covering(&cat, 0.5).unwrap();
        let coarse = wigner_log_negativity(&wigner_transform(&cat, bounds, 511, 511).unwrap());
        let fine = wigner_log_negativity(&wigner_transform(&cat, bounds, 1021, 1021).unwrap());
        assert!(coarse > 0.0);
        assert!((coarse - fine).abs() < 1e-3, "{coarse} vs {fine}");
    }

    #[test]
    fn cubic_log_negativity_grows_with_gamma() {
        let s = 1.0 / 1.78;
        let grid = Grid::symmetric(8.0 / s, 4096).unwrap();
        let mut previous = -1.0;
        for gamma in [0.0, 0.02, 0.05, 0.1] {
            let state = make_cubic_phase_state(gamma, s, grid).unwrap();
            let w = auto(&state, 201);
            let wln = wigner_log_negativity(&w);
            assert!(wln >= previous, "gamma {gamma}: {wln} < {previous}");
            previous = wln;
        }
        assert!(previous > 0.05);
    }

    #[test]
    fn shear_examples() {
        assert_eq!(semiclassical_shear(0.0, 1.7, 0.4), (0.0, 1.7));
        let (x, y) = semiclassical_shear(3.0, 0.0, 0.1);
        assert_eq!(x, 3.0);
        assert!((y - 2.7).abs() < 1e-15);
    }

    #[test]
    fn support_region_geometry() {
        let flat = build_support_region(0.5, 0.0, 2.0, 64).unwrap();
        assert!(flat.is_closed());
        for &(x, p) in &flat.boundary {
            let semi_x = 2.0 / (2f64.sqrt() * 0.5);
            let semi_p = 2.0 * 0.5 / 2f64.sqrt();
            assert!(((x / semi_x).powi(2) + (p / semi_p).powi(2) - 1.0).abs() < 1e-12);
        }
        let s = 10f64.powf(-14.0 / 20.0);
        let unsheared = build_support_region(s, 0.0, 2.0, 400).unwrap();
        let sheared = build_support_region(s, 0.1, 2.0, 400).unwrap();
        assert!((sheared.area() - unsheared.area()).abs() < 1e-6);
        let ellipse = PI * (2.0 / (2f64.sqrt() * s)) * (2.0 * s / 2f64.sqrt());
        assert!((unsheared.area() - ellipse).abs() < 1e-3 * ellipse);
        let pieces = sheared.horizontal_intersections(3.0);
        assert_eq!(pieces.len(), 2);
        assert!(pieces[0].1 < pieces[1].0);
        assert!(build_support_region(s, 0.1, 2.0, 16).is_err());
    }

    #[test]
    fn csv_layout() {
        let w = wigner_transform(&vacuum(), PhaseBounds::new(-7.0, 7.0, -7.0, 7.0).unwrap(), 4, 3).unwrap();
        let mut buf = Vec::new();
        w.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x_min,x_max,p_min,p_max,n_x,n_p");
        assert_eq!(lines[1], "-7,7,-7,7,4,3");
        assert_eq!(lines.len(), 6);
        assert!(lines[2..].iter().all(|l| l.split(',').count() == 3));
    }

    proptest! {
        #[test]
        fn shear_inverse_is_identity(x in -50.0f64..50.0, y in -50.0f64..50.0, gamma in -2.0f64..2.0) {
            let (a, b) = semiclassical_shear(x, y, gamma);
            let (c, d) = semiclassical_shear(a, b, -gamma);
            prop_assert_eq!(c, x);
            prop_assert!((d - y).abs() <= 1e-12 * (1.0 + y.abs() + 3.0 * gamma.abs() * x * x));
        }

        #[test]
        fn shear_has_unit_jacobian(x in -20.0f64..20.0, y in -20.0f64..20.0, gamma in -1.0f64..1.0) {
            let h = 1e-6;
            let (_, dy_dx_plus) = semiclassical_shear(x + h, y, gamma);
            let (_, dy_dx_minus) = semiclassical_shear(x - h, y, gamma);
            let dy_dx = (dy_dx_plus - dy_dx_minus) / (2.0 * h);
            let (dx_dy, _) = semiclassical_shear(x, y + h, gamma);
            let (dx_dy_m, _) = semiclassical_shear(x, y - h, gamma);
            // det [[1, 0], [dy/dx, 1]] with dx/dy = 0
            let det = 1.0 * 1.0 - ((dx_dy - dx_dy_m) / (2.0 * h)) * dy_dx;
            prop_assert!((det - 1.0).abs() < 1e-9);
        }
    }
}
