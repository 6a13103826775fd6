//! Empirical separation bounds for positive cubature.
//!
//! For each degree `K` the table holds the largest `ρ` (to bisection
//! resolution, seed 0) at which [`solve_weights`](super::solve_weights)
//! succeeds on a generated lattice. Defaults use `0.7 ×` the tabulated value.

use serde::{Deserialize, Serialize};

use crate::lattice::{generate, SphereLattice};
use crate::{Error, Result};

/// `(degree, largest feasible rho)`.
pub const CALIBRATION: &[(usize, f64)] = &[
    (1, 1.8756),
    (2, 1.1625),
    (3, 0.8297),
    (4, 0.6806),
    (5, 0.5602),
    (6, 0.4801),
    (7, 0.4241),
    (8, 0.3676),
    (9, 0.3329),
    (10, 0.3007),
    (11, 0.2783),
    (12, 0.2618),
    (13, 0.2386),
    (14, 0.2248),
    (15, 0.2094),
    (16, 0.1971),
    (17, 0.1867),
    (18, 0.1763),
    (19, 0.1696),
    (20, 0.1605),
    (21, 0.1523),
    (22, 0.1457),
    (23, 0.1400),
    (24, 0.1344),
    (25, 0.1293),
    (26, 0.1241),
    (27, 0.1197),
    (28, 0.1163),
    (29, 0.1124),
    (30, 0.1081),
    (31, 0.1057),
    (32, 0.1015),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub degree: usize,
    pub rho: f64,
    pub points: usize,
}

/// Default lattice separation for exactness degree `degree`.
pub fn calibrated_rho(degree: usize) -> Result<f64> {
    CALIBRATION.iter().find(|(k, _)| *k == degree).map(|(_, r)| 0.7 * r).ok_or_else(|| Error::DegreeTooHigh {
        requested: degree,
        cap: CALIBRATION.last().map(|(k, _)| *k).unwrap_or(0),
    })
}

/// Bisects for the largest `ρ ∈ [lo, hi]` at which the solver succeeds.
pub fn calibrate(degree: usize, seed: u64, lo: f64, hi: f64, steps: usize) -> Result<CalibrationPoint> {
    let ok = |rho: f64| -> Option<usize> {
        let l: SphereLattice = generate(rho, seed).ok()?;
        super::solve_weights(&l, degree).ok().map(|_| l.points.len())
    };
    let mut points = ok(lo).ok_or_else(|| Error::Infeasible(format!("degree {degree} fails already at rho = {lo}")))?;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..steps {
        let mid = 0.5 * (a + b);
        match ok(mid) {
            Some(n) => {
                a = mid;
                points = n;
            }
            None => b = mid,
        }
    }
    Ok(CalibrationPoint { degree, rho: a, points })
}
