//! Quadrature engines: a globally adaptive Gauss–Kronrod integrator for
//! generic complex integrands, and a phase-controlled composite Gauss rule
//! for the Gaussian-damped cubic oscillatory integral
//!
//! ```text
//!     I(δ; γ, s) = ∫ exp(i x (δ + γ x²)) exp(-(s x)² / 2) dx.
//! ```

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances and budget for a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of intervals (adaptive) or panels (oscillatory).
    pub max_subdivisions: usize,
    /// Half-width of the window used in place of an infinite range.
    pub truncation_radius: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-11,
            max_subdivisions: 4_000_000,
            truncation_radius: 10.0,
        }
    }
}

impl QuadratureSpec {
    /// Spec for the Gaussian-damped integral at squeeze factor `s`:
    /// truncation at 10/s, where the envelope is below 2e-22.
    pub fn for_squeeze(s: f64) -> Self {
        Self {
            truncation_radius: 10.0 / s,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        if !(self.truncation_radius > 0.0 && self.truncation_radius.is_finite()) {
            return Err(Error::domain("truncation_radius must be positive and finite"));
        }
        Ok(())
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

// 8-point Gauss–Legendre, used on the phase-controlled panels.
const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_804_939_476_142_360_184,
    0.525_532_409_916_328_985_817_739_049_189_254,
    0.796_666_477_413_626_739_591_553_936_475_831,
    0.960_289_856_497_536_231_683_560_868_569_473,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_361_982_965_150_449_277_196,
    0.313_706_645_877_887_287_337_962_201_986_601,
    0.222_381_034_453_374_470_544_355_994_426_241,
    0.101_228_536_290_376_259_152_531_354_309_962,
];

/// Maximum phase advance per panel in the oscillatory rule, in radians.
pub const MAX_PANEL_PHASE: f64 = 0.5;

fn kronrod15<F>(f: &F, a: f64, b: f64) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).norm())
}

struct Interval {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        // largest error first; ties broken by position for reproducibility
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature of a complex integrand.
///
/// Returns the value and the summed error estimate. Fails with a
/// convergence error, carrying the best estimate, if `max_subdivisions`
/// intervals are not enough to reach `max(abs_tol, rel_tol·|value|)`.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    spec.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!("integrate_adaptive: need finite a < b, got [{a}, {b}]")));
    }
    let (value, error) = kronrod15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Interval { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    loop {
        if total_err <= spec.abs_tol.max(spec.rel_tol * total.norm()) {
            break;
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(Error::Convergence {
                message: format!("adaptive quadrature on [{a}, {b}] exhausted {} intervals", spec.max_subdivisions),
                best_estimate: summed(&heap),
                error_estimate: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval cannot be split further in double precision
            return Err(Error::Convergence {
                message: format!("adaptive quadrature hit round-off limit near x = {mid}"),
                best_estimate: total,
                error_estimate: total_err,
            });
        }
        let (lv, le) = kronrod15(&f, worst.a, mid);
        let (rv, re) = kronrod15(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Interval { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Interval { a: mid, b: worst.b, value: rv, error: re });
    }
    // recompute the sums from scratch to shed the drift of the running updates
    let mut intervals = heap.into_vec();
    intervals.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut acc = NeumaierSum::default();
    let mut err = 0.0;
    for iv in &intervals {
        acc.add(iv.value);
        err += iv.error;
    }
    Ok((acc.total(), err))
}

fn summed(heap: &BinaryHeap<Interval>) -> Complex64 {
    let mut acc = NeumaierSum::default();
    for iv in heap.iter() {
        acc.add(iv.value);
    }
    acc.total()
}

/// Integral of `f` over the symmetric window [-R, R] of `spec`.
pub fn integrate_truncated<F>(f: F, spec: &QuadratureSpec) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    integrate_adaptive(f, -spec.truncation_radius, spec.truncation_radius, spec)
}

/// The Gaussian-damped cubic oscillatory integral
/// `∫ exp(i x (delta + gamma x²)) exp(-(s x)²/2) dx` over |x| ≤ truncation_radius.
///
/// Panels are laid out left to right so that the largest local angular
/// frequency on each panel times its width stays below [`MAX_PANEL_PHASE`];
/// each panel uses an 8-point Gauss–Legendre rule.
pub fn integrate_oscillatory_gaussian(delta: f64, gamma: f64, s: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    spec.validate()?;
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("squeeze factor must be positive, got {s}")));
    }
    if !delta.is_finite() || !gamma.is_finite() {
        return Err(Error::domain("delta and gamma must be finite"));
    }
    let radius = spec.truncation_radius;
    let s2 = s * s;
    // local rate of change of the integrand's log: phase frequency plus envelope slope
    let rate = |x: f64| (delta + 3.0 * gamma * x * x).abs() + s2 * x.abs() + s;
    let max_rate = |a: f64, b: f64| {
        let mut m = rate(a).max(rate(b));
        if a < 0.0 && b > 0.0 {
            m = m.max(rate(0.0));
        }
        m
    };
    let integrand = |x: f64| {
        let phase = x * (delta + gamma * x * x);
        let envelope = (-0.5 * s2 * x * x).exp();
        Complex64::from_polar(envelope, phase)
    };

    let mut acc = NeumaierSum::default();
    let mut left = -radius;
    let mut panels = 0usize;
    while left < radius {
        let trial = (MAX_PANEL_PHASE / rate(left)).min(radius - left);
        let width = (MAX_PANEL_PHASE / max_rate(left, left + trial)).min(trial);
        let right = if radius - (left + width) < 1e-12 * radius { radius } else { left + width };
        let center = 0.5 * (left + right);
        let half = 0.5 * (right - left);
        let mut panel = Complex64::new(0.0, 0.0);
        for (x, w) in GL8_X.iter().zip(GL8_W.iter()) {
            panel += (integrand(center - half * x) + integrand(center + half * x)) * *w;
        }
        acc.add(panel * half);
        panels += 1;
        if panels > spec.max_subdivisions {
            return Err(Error::Convergence {
                message: format!(
                    "oscillatory quadrature needs more than {} panels (delta={delta}, gamma={gamma}, s={s})",
                    spec.max_subdivisions
                ),
                best_estimate: acc.total(),
                error_estimate: f64::INFINITY,
            });
        }
        left = right;
    }
    Ok(acc.total())
}

/// Compensated (Neumaier) summation of complex numbers.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: Complex64,
    compensation: Complex64,
}

impl NeumaierSum {
    pub fn add(&mut self, value: Complex64) {
        let re = neumaier_step(self.sum.re, &mut self.compensation.re, value.re);
        let im = neumaier_step(self.sum.im, &mut self.compensation.im, value.im);
        self.sum = Complex64::new(re, im);
    }

    pub fn total(&self) -> Complex64 {
        self.sum + self.compensation
    }
}

fn neumaier_step(sum: f64, compensation: &mut f64, value: f64) -> f64 {
    let t = sum + value;
    if sum.abs() >= value.abs() {
        *compensation += (sum - t) + value;
    } else {
        *compensation += (value - t) + sum;
    }
    t
}

/// Trapezoidal rule on uniformly spaced samples.
pub fn trapezoid(samples: &[f64], step: f64) -> f64 {
    match samples.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = samples[1..n - 1].iter().sum();
            step * (inner + 0.5 * (samples[0] + samples[n - 1]))
        }
    }
}

/// Trapezoidal rule on uniformly spaced complex samples.
pub fn trapezoid_complex(samples: &[Complex64], step: f64) -> Complex64 {
    match samples.len() {
        0 | 1 => Complex64::new(0.0, 0.0),
        n => {
            let mut acc = NeumaierSum::default();
            for v in &samples[1..n - 1] {
                acc.add(*v);
            }
            acc.add(0.5 * (samples[0] + samples[n - 1]));
            acc.total() * step
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_integrand() {
        let (v, _) = integrate_adaptive(|_| Complex64::new(1.0, 0.0), 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v.re - 1.0).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn gaussian_over_truncated_line() {
        let spec = QuadratureSpec::default();
        let (v, _) = integrate_truncated(|x| Complex64::new((-x * x).exp(), 0.0), &spec).unwrap();
        assert!(((v.re - PI.sqrt()) / PI.sqrt()).abs() < spec.rel_tol);
    }

    #[test]
    fn adaptive_rejects_bad_interval() {
        let spec = QuadratureSpec::default();
        assert!(matches!(
            integrate_adaptive(|_| Complex64::new(1.0, 0.0), 1.0, 0.0, &spec),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn adaptive_budget_exhaustion_reports_best_estimate() {
        let spec = QuadratureSpec { max_subdivisions: 3, abs_tol: 1e-15, rel_tol: 1e-15, ..Default::default() };
        let err = integrate_adaptive(|x| Complex64::new((200.0 * x).sin().abs(), 0.0), 0.0, 10.0, &spec).unwrap_err();
        match err {
            Error::Convergence { best_estimate, .. } => assert!(best_estimate.re > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn oscillatory_gaussian_limit() {
        // γ = 0: Fourier transform of a Gaussian
        let spec = QuadratureSpec::for_squeeze(1.0);
        for delta in [-3.0, -0.5, 0.0, 1.25, 4.0] {
            let v = integrate_oscillatory_gaussian(delta, 0.0, 1.0, &spec).unwrap();
            let exact = (2.0 * PI).sqrt() * (-delta * delta / 2.0f64).exp();
            assert!((v.re - exact).abs() < 1e-13, "delta {delta}: {v} vs {exact}");
            assert!(v.im.abs() < 1e-13);
        }
    }

    #[test]
    fn oscillatory_conjugation_symmetry() {
        let spec = QuadratureSpec::for_squeeze(0.7);
        for &(delta, gamma) in &[(0.0, 0.1), (-2.0, 0.3), (1.5, 0.05), (3.0, 0.2)] {
            let direct = integrate_oscillatory_gaussian(delta, gamma, 0.7, &spec).unwrap();
            let mirrored = integrate_oscillatory_gaussian(-delta, -gamma, 0.7, &spec).unwrap();
            assert!((direct - mirrored.conj()).norm() < 1e-13);
            // x -> -x maps the integrand onto its conjugate, so the integral is real
            assert!(direct.im.abs() < 1e-12 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn oscillatory_converges_under_radius_doubling() {
        let base = QuadratureSpec::for_squeeze(1.0);
        let doubled = QuadratureSpec { truncation_radius: 2.0 * base.truncation_radius, ..base };
        let a = integrate_oscillatory_gaussian(0.0, 0.1, 1.0, &base).unwrap();
        let b = integrate_oscillatory_gaussian(0.0, 0.1, 1.0, &doubled).unwrap();
        assert!((a - b).norm() <= 1e-9 * b.norm());
    }

    #[test]
    fn oscillatory_panel_budget() {
        let spec = QuadratureSpec { max_subdivisions: 10, ..QuadratureSpec::for_squeeze(0.2) };
        assert!(matches!(
            integrate_oscillatory_gaussian(0.0, 0.5, 0.2, &spec),
            Err(Error::Convergence { .. })
        ));
    }

    #[test]
    fn trapezoid_edges() {
        assert_eq!(trapezoid(&[], 1.0), 0.0);
        assert_eq!(trapezoid(&[1.0, 1.0, 1.0], 0.5), 1.0);
    }

    #[test]
    fn oscillatory_matches_adaptive() {
        for &(delta, gamma, s) in &[(0.0, 0.1, 1.0), (-4.5, 0.2, 0.5623), (7.0, 0.5, 0.1995), (-10.0, 0.5, 1.0)] {
            let spec = QuadratureSpec::for_squeeze(s);
            let panel = integrate_oscillatory_gaussian(delta, gamma, s, &spec).unwrap();
            let (adaptive, _) = integrate_truncated(
                |x| Complex64::from_polar((-(s * x).powi(2) / 2.0).exp(), x * (delta + gamma * x * x)),
                &spec,
            )
            .unwrap();
            assert!((panel - adaptive).norm() <= 1e-8 * adaptive.norm().max(1e-4), "{delta} {gamma} {s}");
        }
    }
}
