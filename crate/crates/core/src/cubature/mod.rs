//! Positive cubature rules exact on bandlimited functions.
//!
//! On S² the weights come from nonnegative least squares on the moment
//! system `Σ_ν μ_ν Y_k^i(x_ν) = √(4π) δ_{k0}`, rows scaled by `1/√(2k+1)`.
//! Points that receive zero weight are dropped and the system is re-solved
//! on the support, so a rule's nodes are a subset of the lattice it was
//! solved on. Product rules on S² × S² are tensor products of S² rules.

mod calibration;
mod nnls;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use serde::{Deserialize, Serialize};

use crate::harmonics::{eval_all, sphere_len, HarmonicIndex, SpherePoint, SphereSpectrum};
use crate::lattice::{MetricPoint, Space, SphereLattice, SpherePair};
use crate::par::{add_vec, fold_indexed, sum_indexed};
use crate::splines::{fit_with, Functional, SolveStrategy, SplineProblem};
use crate::{Error, Result};

pub use calibration::{calibrate, calibrated_rho, CalibrationPoint, CALIBRATION};
pub use nnls::{least_squares, nnls, NnlsSolution};

/// Absolute tolerance on the scaled moment residual.
pub const MOMENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "P: MetricPoint")]
pub struct CubatureRule<P: MetricPoint> {
    pub space: Space,
    /// Exactness degree per factor.
    pub degree: usize,
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    /// Scaled moment residual; for product rules the larger factor residual.
    pub residual: f64,
}

pub type SphereRule = CubatureRule<SpherePoint>;
pub type ProductRule = CubatureRule<SpherePair>;

impl<P: MetricPoint> CubatureRule<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&P) -> f64 + Sync) -> f64 {
        sum_indexed(self.points.len(), |i| self.weights[i] * f(&self.points[i]))
    }

    pub fn integrate_samples(&self, samples: &[f64]) -> Result<f64> {
        self.check_samples(samples)?;
        Ok(samples.iter().zip(&self.weights).map(|(s, w)| s * w).sum())
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    pub fn check_samples(&self, samples: &[f64]) -> Result<()> {
        if samples.len() != self.points.len() {
            return Err(Error::invalid(format!(
                "{} samples for a rule with {} nodes",
                samples.len(),
                self.points.len()
            )));
        }
        Ok(())
    }
}

/// Scaled moment matrix: column ν holds `Y_k^i(x_ν)/√(2k+1)`.
pub fn moment_matrix(points: &[SpherePoint], degree: usize) -> DMatrix<f64> {
    let m = sphere_len(degree);
    let scale: Vec<f64> = (0..m).map(|j| 1.0 / ((2 * HarmonicIndex::from_flat(j).k + 1) as f64).sqrt()).collect();
    let cols: Vec<Vec<f64>> =
        points.par_iter().map(|p| eval_all(degree, p).iter().zip(&scale).map(|(y, s)| y * s).collect()).collect();
    DMatrix::from_fn(m, points.len(), |r, c| cols[c][r])
}

fn moment_target(degree: usize) -> DVector<f64> {
    let mut b = DVector::zeros(sphere_len(degree));
    b[0] = (4.0 * std::f64::consts::PI).sqrt();
    b
}

/// Positive weights on a subset of the lattice, exact to `degree`.
pub fn solve_weights(lattice: &SphereLattice, degree: usize) -> Result<SphereRule> {
    solve_weights_on(&lattice.points, degree)
}

pub fn solve_weights_on(points: &[SpherePoint], degree: usize) -> Result<SphereRule> {
    if points.is_empty() {
        return Err(Error::Infeasible("empty point set".into()));
    }
    if degree == 0 {
        let w = 4.0 * std::f64::consts::PI / points.len() as f64;
        return Ok(SphereRule {
            space: Space::S2,
            degree,
            points: points.to_vec(),
            weights: vec![w; points.len()],
            residual: 0.0,
        });
    }
    let need = sphere_len(degree);
    if points.len() < need {
        return Err(Error::Infeasible(format!("{} points for {need} moments", points.len())));
    }
    let a = moment_matrix(points, degree);
    let b = moment_target(degree);
    let sol = nnls(&a, &b, 20 * need);
    let support: Vec<usize> = (0..points.len()).filter(|&i| sol.x[i] > 0.0).collect();
    if sol.residual > MOMENT_TOLERANCE || support.is_empty() {
        return Err(Error::Infeasible(format!(
            "degree {degree} on {} points: residual {:.3e}",
            points.len(),
            sol.residual
        )));
    }
    let sub = a.select_columns(&support);
    let w = least_squares(&a, &b, &support).ok_or_else(|| Error::Infeasible("support system is singular".into()))?;
    let residual = (&sub * &w - &b).norm();
    if w.iter().any(|&v| v <= 0.0) || residual > MOMENT_TOLERANCE {
        return Err(Error::Infeasible(format!(
            "re-solve on the support gave min weight {:.3e}, residual {residual:.3e}",
            w.min()
        )));
    }
    Ok(SphereRule {
        space: Space::S2,
        degree,
        points: support.iter().map(|&i| points[i]).collect(),
        weights: w.iter().copied().collect(),
        residual,
    })
}

/// Tensor product rule on S² × S², exact on `Y_{k₁}(x) Y_{k₂}(y)` for
/// `k₁ ≤ a.degree, k₂ ≤ b.degree`.
pub fn product_rule(a: &SphereRule, b: &SphereRule) -> ProductRule {
    let mut points = Vec::with_capacity(a.len() * b.len());
    let mut weights = Vec::with_capacity(a.len() * b.len());
    for (p, wp) in a.points.iter().zip(&a.weights) {
        for (q, wq) in b.points.iter().zip(&b.weights) {
            points.push(SpherePair(*p, *q));
            weights.push(wp * wq);
        }
    }
    ProductRule {
        space: Space::S2xS2,
        degree: a.degree.min(b.degree),
        points,
        weights,
        residual: a.residual.max(b.residual),
    }
}

/// `c_{k,i}(f) = Σ μ_ν f(x_ν) Y_k^i(x_ν)` for `f` of degree `≤ band`.
pub fn discrete_fourier(rule: &SphereRule, samples: &[f64], band: usize, idx: HarmonicIndex) -> Result<f64> {
    if rule.degree < band + idx.k {
        return Err(Error::InsufficientRule { have: rule.degree, need: band + idx.k });
    }
    rule.check_samples(samples)?;
    Ok(weighted_sum(rule, samples, idx.k)[idx.flat()])
}

/// All coefficients of a degree-`band` function; requires a rule exact to `2·band`.
pub fn discrete_spectrum(rule: &SphereRule, samples: &[f64], band: usize) -> Result<SphereSpectrum> {
    if rule.degree < 2 * band {
        return Err(Error::InsufficientRule { have: rule.degree, need: 2 * band });
    }
    discrete_spectrum_unchecked(rule, samples, band)
}

/// As [`discrete_spectrum`] without the exactness check; aliases when the rule
/// is too coarse.
pub fn discrete_spectrum_unchecked(rule: &SphereRule, samples: &[f64], band: usize) -> Result<SphereSpectrum> {
    rule.check_samples(samples)?;
    SphereSpectrum::from_flat(band, weighted_sum(rule, samples, band))
}

fn weighted_sum(rule: &SphereRule, samples: &[f64], degree: usize) -> Vec<f64> {
    let n = sphere_len(degree);
    fold_indexed(
        rule.len(),
        || vec![0.0; n],
        |acc, i| {
            let y = eval_all(degree, &rule.points[i]);
            let c = rule.weights[i] * samples[i];
            acc.iter_mut().zip(&y).for_each(|(a, y)| *a += c * y);
        },
        |a, b| add_vec(a, b),
    )
}

/// Weights `λ_ν = ∫ l_ν` of the Lagrangian splines of order `t` at the
/// lattice nodes. The rule integrates every such spline exactly.
///
/// `∫ l_ν = √(4π) c_{0,1}(l_ν)` and, by symmetry of the Gram matrix, the
/// vector `λ` solves `β λ = 1`.
pub fn lagrangian_cubature(lattice: &SphereLattice, t: f64) -> Result<Vec<f64>> {
    if lattice.points.len() < 2 {
        return Err(Error::invalid("Lagrangian cubature needs at least two nodes"));
    }
    let functionals = lattice.points.iter().map(|p| Functional::point(*p)).collect();
    let problem = SplineProblem::with_auto_degree(functionals, t, 0)?;
    let ones = vec![1.0; lattice.points.len()];
    Ok(fit_with(&problem, &ones, SolveStrategy::WeightedBasisQr)?.alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::generate;

    #[test]
    fn degree_zero_is_uniform() {
        let l: SphereLattice = generate(1.0, 1).unwrap();
        let r = solve_weights(&l, 0).unwrap();
        assert_eq!(r.residual, 0.0);
        assert!((r.weights.iter().sum::<f64>() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn too_few_points_is_infeasible() {
        let l: SphereLattice = generate(1.5, 1).unwrap();
        assert!(matches!(solve_weights(&l, 10), Err(Error::Infeasible(_))));
    }
}
