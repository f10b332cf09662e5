//! Closed-form versus quadrature cross-check of the added factor over the
//! standard parameter grid.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::db_to_s;
use crate::error::{Error, Result};
use crate::gate::added_factor;
use crate::numerics::QuadratureSpec;
use crate::oracle::oracle_added_factor;
use crate::states::GateParams;

pub const RELATIVE_TOLERANCE: f64 = 1e-8;
pub const ABSOLUTE_FLOOR: f64 = 1e-12;

pub const GAMMAS: [f64; 3] = [0.1, 0.2, 0.5];
pub const SQUEEZING_DB: [f64; 4] = [0.0, 5.0, 9.0, 14.0];
pub const OUTCOMES: [f64; 3] = [3.0, 6.0, 15.0];

/// x − y_m from −10 to 10 in steps of 0.5.
pub fn offsets() -> Vec<f64> {
    (0..=40).map(|k| -10.0 + 0.5 * k as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyPoint {
    pub gamma: f64,
    pub db: f64,
    pub y_m: f64,
    pub delta: f64,
    pub closed_form: f64,
    pub oracle_re: f64,
    pub oracle_im: f64,
    /// |closed − oracle| / max(|oracle|, floor/tolerance); passes at ≤ tolerance.
    pub deviation: f64,
}

impl VerifyPoint {
    pub fn passes(&self) -> bool {
        self.deviation <= RELATIVE_TOLERANCE
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub tolerance: f64,
    pub absolute_floor: f64,
    pub max_deviation: f64,
    pub failures: usize,
    pub points: Vec<VerifyPoint>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn worst(&self) -> Option<&VerifyPoint> {
        self.points.iter().max_by(|a, b| a.deviation.total_cmp(&b.deviation))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for p in &self.points {
            writer.serialize(p).map_err(|e| Error::Io(e.to_string()))?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Compares one point of the grid.
pub fn verify_point(gamma: f64, db: f64, y_m: f64, delta: f64) -> Result<VerifyPoint> {
    let params = GateParams::from_db(gamma, db, y_m)?;
    let x = y_m + delta;
    let closed = added_factor(x, &params)?;
    let oracle = oracle_added_factor(x, &params, &QuadratureSpec::for_squeeze(params.s))?;
    let scale = oracle.norm().max(ABSOLUTE_FLOOR / RELATIVE_TOLERANCE);
    Ok(VerifyPoint {
        gamma,
        db,
        y_m,
        delta,
        closed_form: closed.re,
        oracle_re: oracle.re,
        oracle_im: oracle.im,
        deviation: (closed - oracle).norm() / scale,
    })
}

/// Runs the points in parallel and reports them in input order.
pub fn run_points(points: &[(f64, f64, f64, f64)]) -> Result<VerifyReport> {
    for &(_, db, _, _) in points {
        db_to_s(db)?;
    }
    let results: Vec<Result<VerifyPoint>> =
        points.par_iter().map(|&(g, db, y, d)| verify_point(g, db, y, d)).collect();
    let points = results.into_iter().collect::<Result<Vec<_>>>()?;
    let max_deviation = points.iter().map(|p| p.deviation).fold(0.0, f64::max);
    let failures = points.iter().filter(|p| !p.passes()).count();
    Ok(VerifyReport { tolerance: RELATIVE_TOLERANCE, absolute_floor: ABSOLUTE_FLOOR, max_deviation, failures, points })
}

/// Every (γ, dB, y_m, x − y_m) of the standard grid, in nested order.
pub fn standard_points() -> Vec<(f64, f64, f64, f64)> {
    let deltas = offsets();
    let mut points = Vec::with_capacity(GAMMAS.len() * SQUEEZING_DB.len() * OUTCOMES.len() * deltas.len());
    for &g in &GAMMAS {
        for &db in &SQUEEZING_DB {
            for &y in &OUTCOMES {
                for &d in &deltas {
                    points.push((g, db, y, d));
                }
            }
        }
    }
    points
}

/// The full standard suite.
pub fn run_verification() -> Result<VerifyReport> {
    run_points(&standard_points())
}

/// Deviation of a complex pair under the suite's metric.
pub fn deviation(closed: Complex64, oracle: Complex64) -> f64 {
    (closed - oracle).norm() / oracle.norm().max(ABSOLUTE_FLOOR / RELATIVE_TOLERANCE)
}
