//! Airy function of the first kind for real argument.
//!
//! The real line is split into five regions:
//!
//! * `|z| <= 2`: Maclaurin series in the two standard power series.
//! * `2 < z <= 9`: Taylor steps of the Airy equation from a node table that
//!   is integrated *backwards* from z = 9. Ai is the recessive solution on
//!   the positive axis, so backward integration is the stable direction.
//! * `-9 <= z < -2`: node table integrated forwards from the origin; both
//!   solutions are bounded there.
//! * `|z| > 9`: asymptotic expansions (exponentially decaying branch for
//!   z > 0, oscillatory branch for z < 0). With ζ = (2/3)|z|^{3/2} ≥ 18 the
//!   optimally truncated series is accurate to below double precision.
//!
//! A Maclaurin/asymptotic split alone loses 6-7 digits in the band
//! 4 < |z| < 8 (cancellation in the series, e^{-2ζ} truncation error in the
//! expansions), which is why the middle band is covered by the node tables.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Ai(0) = 3^{-2/3} / Γ(2/3).
pub const AI_ZERO: f64 = 0.355_028_053_887_817_239_260_063_186_004;
/// -Ai'(0) = 3^{-1/3} / Γ(1/3).
const NEG_AI_PRIME_ZERO: f64 = 0.258_819_403_792_806_798_405_183_560_189;

const SERIES_LIMIT: f64 = 2.0;
const ASYMPTOTIC_LIMIT: f64 = 9.0;
const NODE_STEP: f64 = 0.125;

/// Returns Ai(z).
///
/// For large positive `z` the result underflows to zero only once
/// Ai(z) itself drops below the smallest normal double.
pub fn airy_ai(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::domain(format!("airy_ai: non-finite argument {z}")));
    }
    Ok(ai_and_derivative(z).0)
}

/// Returns Ai(z)·exp((2/3) z^{3/2}) for z ≥ 0.
pub fn airy_ai_scaled(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::domain(format!("airy_ai_scaled: non-finite argument {z}")));
    }
    if z < 0.0 {
        return Err(Error::domain(format!(
            "airy_ai_scaled: scaling is undefined on the oscillatory branch (z = {z})"
        )));
    }
    if z > ASYMPTOTIC_LIMIT {
        let (ai, _) = asymptotic_positive_scaled(z);
        Ok(ai)
    } else {
        let zeta = 2.0 / 3.0 * z * z.sqrt();
        Ok(ai_and_derivative(z).0 * zeta.exp())
    }
}

/// Returns (Ai(z), Ai'(z)).
pub fn airy_ai_with_derivative(z: f64) -> Result<(f64, f64)> {
    if !z.is_finite() {
        return Err(Error::domain(format!("airy_ai: non-finite argument {z}")));
    }
    Ok(ai_and_derivative(z))
}

fn ai_and_derivative(z: f64) -> (f64, f64) {
    if z.abs() <= SERIES_LIMIT {
        maclaurin(z)
    } else if z > ASYMPTOTIC_LIMIT {
        let (ai, dai) = asymptotic_positive_scaled(z);
        let decay = (-(2.0 / 3.0) * z * z.sqrt()).exp();
        (ai * decay, dai * decay)
    } else if z < -ASYMPTOTIC_LIMIT {
        asymptotic_negative(-z)
    } else if z > 0.0 {
        tables().positive.evaluate(z)
    } else {
        tables().negative.evaluate(z)
    }
}

/// Ai and Ai' from the power series Ai = c1 f - c2 g.
fn maclaurin(z: f64) -> (f64, f64) {
    let z3 = z * z * z;
    let (mut f, mut g) = (1.0, z);
    let (mut df, mut dg) = (0.0, 1.0);
    let (mut tf, mut tg) = (1.0, z);
    let (mut tdf, mut tdg) = (0.0, 1.0);
    for k in 1..60 {
        let kf = k as f64;
        tf *= z3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg *= z3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        tdf = if k == 1 {
            z * z / 2.0
        } else {
            tdf * z3 / (3.0 * (kf - 1.0) * (3.0 * kf - 1.0))
        };
        tdg *= z3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        f += tf;
        g += tg;
        df += tdf;
        dg += tdg;
        let scale = f.abs() + g.abs() + df.abs() + dg.abs();
        if tf.abs() + tg.abs() + tdf.abs() + tdg.abs() <= 1e-18 * scale {
            break;
        }
    }
    (
        AI_ZERO * f - NEG_AI_PRIME_ZERO * g,
        AI_ZERO * df - NEG_AI_PRIME_ZERO * dg,
    )
}

/// Coefficients u_k of the large-argument expansions.
fn u_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut u = vec![1.0];
        for k in 1..48 {
            let kf = k as f64;
            let prev = u[k - 1];
            u.push(
                prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                    / ((2.0 * kf - 1.0) * 216.0 * kf),
            );
        }
        u
    })
}

fn v_coefficient(u: &[f64], k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        let kf = k as f64;
        -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k]
    }
}

/// Scaled (Ai, Ai') = e^{ζ}(Ai, Ai') for z > 0 from the decaying expansion.
fn asymptotic_positive_scaled(z: f64) -> (f64, f64) {
    let u = u_coefficients();
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let (mut sum_u, mut sum_v) = (0.0, 0.0);
    let mut pow = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..u.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = u[k] * pow;
        // stop at the smallest term (optimal truncation)
        if term.abs() > last {
            break;
        }
        last = term.abs();
        sum_u += sign * term;
        sum_v += sign * v_coefficient(u, k) * pow;
        if term.abs() < 1e-18 {
            break;
        }
        pow /= zeta;
    }
    let q = z.sqrt().sqrt();
    let norm = 0.5 / PI.sqrt();
    (norm / q * sum_u, -norm * q * sum_v)
}

/// (Ai(-x), Ai'(-x)) for x > 0 from the oscillatory expansion.
fn asymptotic_negative(x: f64) -> (f64, f64) {
    let u = u_coefficients();
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let (mut even_u, mut odd_u, mut even_v, mut odd_v) = (0.0, 0.0, 0.0, 0.0);
    let mut pow = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..u.len() {
        let term = u[k] * pow;
        if term.abs() > last {
            break;
        }
        last = term.abs();
        let vk = v_coefficient(u, k) * pow;
        // (-1)^{floor(k/2)} on the even and odd sub-series
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            even_u += sign * term;
            even_v += sign * vk;
        } else {
            odd_u += sign * term;
            odd_v += sign * vk;
        }
        if term.abs() < 1e-18 {
            break;
        }
        pow /= zeta;
    }
    let (sin, cos) = (zeta - PI / 4.0).sin_cos();
    let q = x.sqrt().sqrt();
    let root_pi = PI.sqrt();
    let ai = (cos * even_u + sin * odd_u) / (root_pi * q);
    let dai = q / root_pi * (sin * even_v - cos * odd_v);
    (ai, dai)
}

/// Values of (Ai, Ai') on a uniform node lattice, evaluated between nodes by
/// a Taylor expansion of the Airy equation y'' = z y.
struct NodeTable {
    origin: f64,
    step: f64,
    values: Vec<(f64, f64)>,
}

impl NodeTable {
    fn evaluate(&self, z: f64) -> (f64, f64) {
        let pos = (z - self.origin) / self.step;
        let idx = (pos.round().max(0.0) as usize).min(self.values.len() - 1);
        let node = self.origin + idx as f64 * self.step;
        let (y, dy) = self.values[idx];
        taylor_step(node, y, dy, z - node)
    }
}

struct Tables {
    positive: NodeTable,
    negative: NodeTable,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let n = ((ASYMPTOTIC_LIMIT - SERIES_LIMIT) / NODE_STEP).round() as usize + 2;

        // positive axis: seed at the asymptotic limit, integrate towards the origin
        let (ai, dai) = asymptotic_positive_scaled(ASYMPTOTIC_LIMIT);
        let decay = (-(2.0 / 3.0) * ASYMPTOTIC_LIMIT * ASYMPTOTIC_LIMIT.sqrt()).exp();
        let mut state = (ai * decay, dai * decay);
        let mut descending = vec![state];
        let mut z = ASYMPTOTIC_LIMIT;
        for _ in 1..n {
            state = taylor_step(z, state.0, state.1, -NODE_STEP);
            z -= NODE_STEP;
            descending.push(state);
        }
        descending.reverse();
        let positive = NodeTable {
            origin: ASYMPTOTIC_LIMIT - (n - 1) as f64 * NODE_STEP,
            step: NODE_STEP,
            values: descending,
        };

        // negative axis: seed at the origin, integrate outwards
        let m = (ASYMPTOTIC_LIMIT / NODE_STEP).round() as usize + 2;
        let mut state = (AI_ZERO, -NEG_AI_PRIME_ZERO);
        let mut outward = vec![state];
        let mut z = 0.0;
        for _ in 1..m {
            state = taylor_step(z, state.0, state.1, -NODE_STEP);
            z -= NODE_STEP;
            outward.push(state);
        }
        outward.reverse();
        let negative = NodeTable {
            origin: -((m - 1) as f64) * NODE_STEP,
            step: NODE_STEP,
            values: outward,
        };
        Tables { positive, negative }
    })
}

/// Advances (y, y') of the Airy equation from `z0` by `t` using its Taylor series.
fn taylor_step(z0: f64, y: f64, dy: f64, t: f64) -> (f64, f64) {
    // (n+2)(n+1) a_{n+2} = z0 a_n + a_{n-1}
    let mut a = [0.0f64; 64];
    a[0] = y;
    a[1] = dy;
    a[2] = z0 * y / 2.0;
    let mut value = a[0] + a[1] * t + a[2] * t * t;
    let mut deriv = a[1] + 2.0 * a[2] * t;
    let mut power = t * t;
    let mut previous_small = false;
    for n in 1..61 {
        a[n + 2] = (z0 * a[n] + a[n - 1]) / (((n + 2) * (n + 1)) as f64);
        let dterm = (n + 2) as f64 * a[n + 2] * power;
        power *= t;
        let term = a[n + 2] * power;
        deriv += dterm;
        value += term;
        // every third coefficient can vanish (e.g. at z0 = 0), so require
        // two consecutive negligible terms
        let small = term.abs() <= 1e-19 * value.abs().max(1e-300)
            && dterm.abs() <= 1e-19 * deriv.abs().max(1e-300);
        if small && previous_small {
            break;
        }
        previous_small = small;
    }
    (value, deriv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_origin() {
        assert!((airy_ai(0.0).unwrap() - 0.355_028_053_9).abs() < 1e-10);
        assert_eq!(airy_ai_scaled(0.0).unwrap(), airy_ai(0.0).unwrap());
    }

    #[test]
    fn reference_values() {
        // DLMF / Abramowitz-Stegun tabulated values
        let cases = [
            (1.0, 0.135_292_416_312_881_4),
            (-1.0, 0.535_560_883_292_352_1),
            (2.5, 0.015_725_923_380_470_49),
            (5.0, 1.083_444_281_360_744_3e-4),
            (-5.0, 0.350_761_009_024_114_3),
            (10.0, 1.104_753_255_289_868_6e-10),
            (-10.0, 0.040_241_238_486_443_19),
        ];
        for (z, expected) in cases {
            let got = airy_ai(z).unwrap();
            assert!(
                ((got - expected) / expected).abs() < 1e-13,
                "Ai({z}) = {got:e}, expected {expected:e}"
            );
        }
    }

    #[test]
    fn derivative_reference() {
        let (_, d) = airy_ai_with_derivative(1.0).unwrap();
        assert!((d + 0.159_147_441_296_793_2).abs() < 1e-14);
        let (_, d) = airy_ai_with_derivative(-4.0).unwrap();
        assert!((d + 0.790_628_575_368_581_4).abs() < 1e-13);
    }

    #[test]
    fn seams_are_continuous() {
        for seam in [SERIES_LIMIT, -SERIES_LIMIT, ASYMPTOTIC_LIMIT, -ASYMPTOTIC_LIMIT] {
            let eps = 1e-12;
            let below = airy_ai(seam - eps).unwrap();
            let above = airy_ai(seam + eps).unwrap();
            let (_, slope) = airy_ai_with_derivative(seam).unwrap();
            let jump = above - below - 2.0 * eps * slope;
            assert!((jump / below).abs() < 1e-12, "seam {seam}: jump {jump:e}");
        }
    }

    #[test]
    fn non_finite_input_is_rejected() {
        assert!(airy_ai(f64::NAN).is_err());
        assert!(airy_ai(f64::INFINITY).is_err());
        assert!(airy_ai_scaled(-0.5).is_err());
    }

    #[test]
    fn underflow_only_for_tiny_values() {
        // Ai(100) ≈ 2.6e-291, still a normal number
        let v = airy_ai(100.0).unwrap();
        assert!(v > f64::MIN_POSITIVE);
        assert!(airy_ai(200.0).unwrap() >= 0.0);
    }

    #[test]
    fn positive_axis_is_decreasing() {
        let mut prev = airy_ai(0.0).unwrap();
        for i in 1..=400 {
            let v = airy_ai(i as f64 * 0.1).unwrap();
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn differential_equation_residual() {
        let h = 1e-3;
        for i in 0..=150 {
            let z = -10.0 + 0.1 * i as f64;
            let centre = airy_ai(z).unwrap();
            let second = (airy_ai(z + h).unwrap() - 2.0 * centre + airy_ai(z - h).unwrap()) / (h * h);
            let residual = (second - z * centre).abs();
            assert!(residual <= 1e-6 * (z * centre).abs().max(1.0), "z={z}: {residual:e}");
        }
    }

    #[test]
    fn scaled_matches_plain() {
        for i in 0..=300 {
            let z = 0.1 * i as f64;
            let plain = airy_ai(z).unwrap();
            let back = airy_ai_scaled(z).unwrap() * (-2.0 / 3.0 * z * z.sqrt()).exp();
            assert!(((back - plain) / plain).abs() < 1e-12, "z={z}");
        }
        for z in [1.0, 10.0, 100.0] {
            let plain = airy_ai(z).unwrap();
            let back = airy_ai_scaled(z).unwrap() * (-2.0 / 3.0 * z * z.sqrt()).exp();
            assert!(((back - plain) / plain).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_leading_asymptote() {
        let z: f64 = 100.0;
        let leading = 1.0 / (2.0 * std::f64::consts::PI.sqrt() * z.powf(0.25));
        assert!((airy_ai_scaled(z).unwrap() / leading - 1.0).abs() < 1e-3);
    }

    #[test]
    fn integral_representation_at_one() {
        use crate::numerics::{integrate_adaptive, QuadratureSpec};
        use num_complex::Complex64;
        // (1/π)∫₀^∞ cos(t³/3 + t) dt, cut at T with a two-term integration-by-parts tail
        let z = 1.0;
        let cut = 30.0;
        let spec = QuadratureSpec { abs_tol: 1e-12, rel_tol: 1e-12, ..Default::default() };
        let (head, _) =
            integrate_adaptive(|t| Complex64::new((t * t * t / 3.0 + z * t).cos(), 0.0), 0.0, cut, &spec).unwrap();
        let phase = cut * cut * cut / 3.0 + z * cut;
        let rate = cut * cut + z;
        let tail = -phase.sin() / rate + phase.cos() * 2.0 * cut / rate.powi(3);
        let oracle = (head.re + tail) / std::f64::consts::PI;
        assert!((airy_ai(z).unwrap() - oracle).abs() < 1e-10, "{oracle}");
    }
}
