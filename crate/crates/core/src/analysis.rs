//! Fidelity, squeezing conversion, and parameter sweeps over 1/s or y_m.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::apply_gate;
use crate::phase_space::{wigner_log_negativity, wigner_transform, PhaseBounds, DEFAULT_WIGNER_POINTS};
use crate::states::{cat_params_from_gate, make_ideal_cat, make_squeezed_vacuum, CatParams, GateParams, Grid, WaveFunction};

/// Number of 1/s samples in the default sweep.
pub const DEFAULT_SWEEP_POINTS: usize = 60;

/// Squeeze factor s = 10^(−dB/20) for a squeezing level in decibels.
pub fn db_to_s(db: f64) -> Result<f64> {
    if !(db >= 0.0) || !db.is_finite() {
        return Err(Error::domain(format!("squeezing in dB must be finite and non-negative, got {db}")));
    }
    Ok(10f64.powf(-db / 20.0))
}

/// Squeezing in dB, 20·log₁₀(1/s).
pub fn s_to_db(s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("squeeze factor must be positive, got {s}")));
    }
    Ok(-20.0 * s.log10())
}

fn coarser_first<'a>(a: &'a WaveFunction, b: &'a WaveFunction) -> (&'a WaveFunction, &'a WaveFunction) {
    let key = |w: &WaveFunction| {
        let g = w.grid();
        (g.step(), g.x_min, g.x_max)
    };
    let (ka, kb) = (key(a), key(b));
    let a_coarser = ka
        .0
        .total_cmp(&kb.0)
        .then(ka.1.total_cmp(&kb.1))
        .then(ka.2.total_cmp(&kb.2))
        .is_gt();
    if a_coarser {
        (a, b)
    } else {
        (b, a)
    }
}

/// |⟨a|b⟩|² by trapezoidal overlap.
///
/// States on different grids are compared on the finer grid; the coarser
/// state is moved there by band-limited interpolation.
pub fn fidelity(a: &WaveFunction, b: &WaveFunction) -> Result<f64> {
    a.require_normalized("fidelity")?;
    b.require_normalized("fidelity")?;
    if a.grid() == b.grid() {
        return Ok(a.inner(b)?.norm_sqr());
    }
    let (coarse, fine) = coarser_first(a, b);
    let moved = coarse.resample(*fine.grid())?;
    Ok(moved.inner(fine)?.norm_sqr())
}

/// F_cat · P(y_m), one admissible way of weighting fidelity by success rate.
pub fn efficiency_score(f_cat: f64, probability_density: f64) -> f64 {
    f_cat * probability_density
}

/// `n` values of 1/s, logarithmically spaced over [lo, hi].
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() || n < 2 {
        return Err(Error::domain(format!("invalid logarithmic range [{lo}, {hi}] with {n} points")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|k| match k {
            0 => lo,
            k if k + 1 == n => hi,
            k => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

/// The default 1/s grid: 60 log-spaced points over [1, 10].
pub fn default_inverse_s_values() -> Vec<f64> {
    log_spaced(1.0, 10.0, DEFAULT_SWEEP_POINTS).expect("static range")
}

/// 1/s values for `n` squeezing levels evenly spaced in dB over [db_lo, db_hi].
pub fn inverse_s_from_db_range(db_lo: f64, db_hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(db_hi > db_lo) || n < 2 {
        return Err(Error::domain(format!("invalid dB range {db_lo}:{db_hi}")));
    }
    (0..n)
        .map(|k| {
            let db = if k + 1 == n { db_hi } else { db_lo + (db_hi - db_lo) * k as f64 / (n - 1) as f64 };
            Ok(1.0 / db_to_s(db)?)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    InverseS,
    YM,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaRule {
    Fixed,
    /// γ = y_m / 30.
    ProportionalYmOver30,
}

impl GammaRule {
    pub fn gamma(&self, fixed: f64, y_m: f64) -> f64 {
        match self {
            GammaRule::Fixed => fixed,
            GammaRule::ProportionalYmOver30 => y_m / 30.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOutput {
    Infidelity,
    Probability,
    Wln,
    Efficiency,
}

/// Declarative description of a one-dimensional scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    /// Template; the swept coordinate and γ (under a proportional rule) are overwritten.
    pub fixed: GateParams,
    pub gamma_rule: GammaRule,
    pub outputs: BTreeSet<SweepOutput>,
    /// Grid of the vacuum target.
    pub input_grid: Grid,
    /// Refine (p⁺, θ) locally to maximize F_cat instead of using the
    /// gate-derived values. Not part of the modelled protocol.
    #[serde(default)]
    pub optimize_cat: bool,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, values: Vec<f64>, fixed: GateParams, gamma_rule: GammaRule) -> Self {
        Self {
            variable,
            values,
            fixed,
            gamma_rule,
            outputs: [SweepOutput::Infidelity, SweepOutput::Probability, SweepOutput::Efficiency]
                .into_iter()
                .collect(),
            input_grid: Grid::symmetric(12.0, crate::states::DEFAULT_POINTS).expect("static grid"),
            optimize_cat: false,
        }
    }

    pub fn with_outputs(mut self, outputs: impl IntoIterator<Item = SweepOutput>) -> Self {
        self.outputs = outputs.into_iter().collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::domain("sweep needs at least one value"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("sweep values must be finite"));
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("sweep values must be strictly increasing"));
        }
        if self.variable == SweepVariable::InverseS && self.values[0] <= 0.0 {
            return Err(Error::domain("1/s values must be positive"));
        }
        if self.outputs.is_empty() {
            return Err(Error::domain("sweep must request at least one output"));
        }
        Ok(())
    }

    fn params_at(&self, value: f64) -> Result<GateParams> {
        let (s, y_m) = match self.variable {
            SweepVariable::InverseS => (1.0 / value, self.fixed.y_m),
            SweepVariable::YM => (self.fixed.s, value),
        };
        GateParams::new(self.gamma_rule.gamma(self.fixed.gamma, y_m), s, y_m)
    }
}

/// One line of sweep output; unrequested quantities are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub variable_value: f64,
    pub infidelity: Option<f64>,
    pub probability_density: Option<f64>,
    pub wln: Option<f64>,
    pub efficiency: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(variable_value: f64, error: Error) -> Self {
        Self {
            variable_value,
            infidelity: None,
            probability_density: None,
            wln: None,
            efficiency: None,
            error: Some(error.to_string()),
        }
    }
}

fn cat_fidelity(output: &WaveFunction, cat: &CatParams) -> Result<f64> {
    let target = make_ideal_cat(cat, *output.grid())?;
    fidelity(output, &target)
}

fn golden_section_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, iterations: usize) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iterations {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

/// Alternating golden-section search over θ ∈ θ₀ ± π/2 and p⁺ ∈ p⁺₀ ± 1.
pub fn optimize_cat_params(output: &WaveFunction, start: &CatParams) -> Result<(CatParams, f64)> {
    let score = |p_plus: f64, theta: f64| {
        CatParams::new(p_plus, theta)
            .and_then(|c| cat_fidelity(output, &c))
            .unwrap_or(0.0)
    };
    let (mut p_plus, mut theta) = (start.p_plus, start.theta);
    for _ in 0..4 {
        theta = golden_section_max(&|t| score(p_plus, t), theta - PI / 2.0, theta + PI / 2.0, 40);
        p_plus = golden_section_max(&|p| score(p, theta), (p_plus - 1.0).max(0.0), p_plus + 1.0, 40);
    }
    let best = CatParams::new(p_plus, theta)?;
    let f = cat_fidelity(output, &best)?;
    let f0 = cat_fidelity(output, start)?;
    Ok(if f >= f0 { (best, f) } else { (*start, f0) })
}

fn evaluate_row(spec: &SweepSpec, input: &WaveFunction, value: f64) -> Result<SweepRow> {
    let params = spec.params_at(value)?;
    let out = apply_gate(input, &params)?;
    let wants = |o: SweepOutput| spec.outputs.contains(&o);

    let needs_fidelity = wants(SweepOutput::Infidelity) || wants(SweepOutput::Efficiency);
    let f_cat = if needs_fidelity {
        let cat = cat_params_from_gate(&params)?;
        Some(if spec.optimize_cat {
            optimize_cat_params(&out.state, &cat)?.1
        } else {
            cat_fidelity(&out.state, &cat)?
        })
    } else {
        None
    };
    let wln = if wants(SweepOutput::Wln) {
        let bounds = PhaseBounds::covering(&out.state, 0.5)?;
        let w = wigner_transform(&out.state, bounds, DEFAULT_WIGNER_POINTS, DEFAULT_WIGNER_POINTS)?;
        Some(wigner_log_negativity(&w))
    } else {
        None
    };
    Ok(SweepRow {
        variable_value: value,
        infidelity: f_cat.filter(|_| wants(SweepOutput::Infidelity)).map(|f| 1.0 - f),
        probability_density: wants(SweepOutput::Probability).then_some(out.probability_density),
        wln,
        efficiency: f_cat
            .filter(|_| wants(SweepOutput::Efficiency))
            .map(|f| efficiency_score(f, out.probability_density)),
        error: None,
    })
}

/// Evaluates every row of `spec` with a vacuum target; failures are kept in-row.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let input = make_squeezed_vacuum(1.0, spec.input_grid)?;
    Ok(spec
        .values
        .par_iter()
        .map(|&v| evaluate_row(spec, &input, v).unwrap_or_else(|e| SweepRow::failed(v, e)))
        .collect())
}

/// CSV with header `variable_value,infidelity,probability_density,wln,efficiency,error`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    if rows.is_empty() {
        writer
            .write_record(["variable_value", "infidelity", "probability_density", "wln", "efficiency", "error"])
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

/// Indices i (0 < i < n−1) with ys[i−1] < ys[i] ≥ ys[i+1].
pub fn interior_maxima(ys: &[f64]) -> Vec<usize> {
    (1..ys.len().saturating_sub(1))
        .filter(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1])
        .collect()
}

/// Index of the largest second difference of `ys` against `xs`, the point
/// where a decaying curve bends into its plateau.
pub fn knee_index(xs: &[f64], ys: &[f64]) -> Option<usize> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return None;
    }
    (1..xs.len() - 1)
        .map(|i| {
            let left = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
            let right = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
            (i, (right - left) / (0.5 * (xs[i + 1] - xs[i - 1])))
        })
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
}
