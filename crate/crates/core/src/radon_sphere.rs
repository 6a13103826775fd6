//! Funk and hemispherical transforms on the sphere.
//!
//! Both are diagonal in the harmonic basis. With arc length on great
//! circles the Funk multiplier on S² is `μ_k = 2π P_k(0)`, zero for odd
//! `k`. The hemispherical transform `f ↦ ∫_{ξ·x > 0} f(x) dx` has
//! multiplier `h_k = 2π (P_{k-1}(0) − P_{k+1}(0))/(2k+1)` for `k ≥ 1`,
//! zero for even `k ≥ 2`, and `h_0 = 2π`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cubature::{discrete_spectrum, discrete_spectrum_unchecked, SphereRule};
use crate::harmonics::{legendre, SphereSpectrum};
use crate::lattice::{dual_circle, generate, GreatCircle, SphereLattice};
use crate::splines::{fit_with, Functional, SolveStrategy, SplineProblem};
use crate::{Error, Result};

/// Odd (resp. even) energy allowed in inputs to the inverses.
pub const PARITY_TOLERANCE: f64 = 1e-9;

fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Area of the unit sphere `S^n ⊂ R^{n+1}`.
pub fn sphere_area(n: usize) -> f64 {
    let h = (n + 1) as f64 / 2.0;
    2.0 * PI.powf(h) / ln_gamma(h).exp()
}

/// Funk multiplier on `S^d`: great subspheres carry their `(d−1)`-volume.
pub fn funk_multiplier(k: usize, d: usize) -> f64 {
    assert!(d >= 2, "the Funk transform needs d ≥ 2");
    if k % 2 == 1 {
        return 0.0;
    }
    if d == 2 {
        return 2.0 * PI * legendre(k, 0.0);
    }
    // Funk–Hecke: |S^{d-1}| · P_k^{(d)}(0) with the normalized Gegenbauer
    // value (−1)^{k/2} Γ((k+1)/2) Γ(d/2) / (Γ(1/2) Γ((k+d)/2)).
    let df = d as f64;
    let kf = k as f64;
    let ln = ln_gamma((kf + 1.0) / 2.0) + ln_gamma(df / 2.0) - ln_gamma(0.5) - ln_gamma((kf + df) / 2.0);
    let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    sphere_area(d - 1) * sign * ln.exp()
}

/// Hemispherical multiplier on `S^d`.
pub fn hemispherical_multiplier(k: usize, d: usize) -> f64 {
    assert!(d >= 2, "the hemispherical transform needs d ≥ 2");
    if k == 0 {
        return sphere_area(d) / 2.0;
    }
    if k.is_multiple_of(2) {
        return 0.0;
    }
    let df = d as f64;
    let kf = k as f64;
    // π^{(d−1)/2} (−1)^{(k−1)/2} Γ(k/2) / Γ((k+d+1)/2)
    let ln = (df - 1.0) / 2.0 * PI.ln() + ln_gamma(kf / 2.0) - ln_gamma((kf + df + 1.0) / 2.0);
    let sign = if ((k - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * ln.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierKind {
    Funk,
    Hemispherical,
}

/// Tabulated multipliers `k = 0..=degree_max` on `S^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSequence {
    pub kind: MultiplierKind,
    pub d: usize,
    pub values: Vec<f64>,
}

impl MultiplierSequence {
    pub fn new(kind: MultiplierKind, d: usize, degree_max: usize) -> Self {
        let f = match kind {
            MultiplierKind::Funk => funk_multiplier,
            MultiplierKind::Hemispherical => hemispherical_multiplier,
        };
        Self { kind, d, values: (0..=degree_max).map(|k| f(k, d)).collect() }
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }
}

pub fn funk_forward(spec: &SphereSpectrum) -> SphereSpectrum {
    let m = MultiplierSequence::new(MultiplierKind::Funk, 2, spec.degree_max());
    spec.map_degrees(|k| m.get(k))
}

/// Inverse on even spectra; odd L² energy above `1e-9` is rejected.
pub fn funk_inverse(spec: &SphereSpectrum) -> Result<SphereSpectrum> {
    funk_inverse_with_tol(spec, PARITY_TOLERANCE)
}

pub fn funk_inverse_with_tol(spec: &SphereSpectrum, tol: f64) -> Result<SphereSpectrum> {
    let odd = spec.odd_energy().sqrt();
    if odd > tol {
        return Err(Error::NotInRange(format!("odd-degree norm {odd:.3e} exceeds {tol:e}")));
    }
    let m = MultiplierSequence::new(MultiplierKind::Funk, 2, spec.degree_max());
    Ok(spec.map_degrees(|k| if k % 2 == 0 { 1.0 / m.get(k) } else { 0.0 }))
}

pub fn hemispherical_forward(spec: &SphereSpectrum) -> SphereSpectrum {
    let m = MultiplierSequence::new(MultiplierKind::Hemispherical, 2, spec.degree_max());
    spec.map_degrees(|k| m.get(k))
}

/// Inverse on odd spectra; even energy, including `k = 0`, is rejected.
pub fn hemispherical_inverse(spec: &SphereSpectrum) -> Result<SphereSpectrum> {
    hemispherical_inverse_with_tol(spec, PARITY_TOLERANCE)
}

pub fn hemispherical_inverse_with_tol(spec: &SphereSpectrum, tol: f64) -> Result<SphereSpectrum> {
    let even = spec.even_energy().max(0.0).sqrt();
    if even > tol {
        return Err(Error::NotInRange(format!("even-degree norm {even:.3e} exceeds {tol:e}")));
    }
    let m = MultiplierSequence::new(MultiplierKind::Hemispherical, 2, spec.degree_max());
    Ok(spec.map_degrees(|k| if k % 2 == 1 { 1.0 / m.get(k) } else { 0.0 }))
}

/// Poles of an S² lattice with antipodal near-duplicates removed, so that no
/// two great circles are closer than `rho` as unoriented circles.
pub fn dual_poles(rho: f64, seed: u64) -> Result<Vec<crate::harmonics::SpherePoint>> {
    let l: SphereLattice = generate(rho, seed)?;
    let mut kept: Vec<crate::harmonics::SpherePoint> = Vec::new();
    for p in l.points {
        if kept.iter().all(|q| q.distance(&p) > rho && q.distance(&p.antipode()) > rho) {
            kept.push(p);
        }
    }
    Ok(kept)
}

/// Great circles dual to the poles, with `n_nodes` nodes each.
pub fn dual_circles(poles: &[crate::harmonics::SpherePoint], n_nodes: usize) -> Result<Vec<GreatCircle>> {
    poles.iter().map(|p| dual_circle(p, n_nodes)).collect()
}

/// Spline with prescribed great-circle integrals; its spectrum is even.
pub fn spline_inversion(circles: &[GreatCircle], values: &[f64], t: f64, min_degree: usize) -> Result<SphereSpectrum> {
    let functionals = circles.iter().cloned().map(Functional::circle).collect();
    let problem = SplineProblem::with_auto_degree(functionals, t, min_degree)?;
    let s = fit_with(&problem, values, SolveStrategy::Gram)?;
    Ok(s.spectrum.as_sphere().expect("S² spline").clone())
}

/// `S_τ(f) = R⁻¹(ŝ_τ(Rf))` with `τ = 2^m · 2 + t + 1/2`: a point spline of
/// order `τ` through samples of `Rf`, projected to even degrees and inverted.
pub fn sampling_reconstruct_s(
    lattice: &SphereLattice,
    rf_samples: &[f64],
    t: f64,
    m: u32,
    min_degree: usize,
) -> Result<SphereSpectrum> {
    let tau = 2f64.powi(m as i32) * 2.0 + t + 0.5;
    let functionals = lattice.points.iter().map(|p| Functional::point(*p)).collect();
    let problem = SplineProblem::with_auto_degree(functionals, tau, min_degree)?;
    let s = fit_with(&problem, rf_samples, SolveStrategy::WeightedBasisQr)?;
    let even = s.spectrum.as_sphere().expect("S² spline").map_degrees(|k| if k % 2 == 0 { 1.0 } else { 0.0 });
    funk_inverse(&even)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteInversion {
    pub spectrum: SphereSpectrum,
    /// L² norm of the odd part of the recovered `Rf` spectrum; nonzero only
    /// when the samples are not the image of a Funk transform.
    pub odd_norm: f64,
}

/// Exact recovery of a degree-`band` even `f` from samples of `Rf` at the
/// nodes of a rule exact to `2·band`.
pub fn discrete_inversion(rule: &SphereRule, rf_samples: &[f64], band: usize) -> Result<DiscreteInversion> {
    let rf = discrete_spectrum(rule, rf_samples, band)?;
    finish_inversion(rf)
}

/// As [`discrete_inversion`] without the degree check.
pub fn discrete_inversion_unchecked(rule: &SphereRule, rf_samples: &[f64], band: usize) -> Result<DiscreteInversion> {
    let rf = discrete_spectrum_unchecked(rule, rf_samples, band)?;
    finish_inversion(rf)
}

fn finish_inversion(rf: SphereSpectrum) -> Result<DiscreteInversion> {
    let odd_norm = rf.odd_energy().sqrt();
    let even = rf.map_degrees(|k| if k % 2 == 0 { 1.0 } else { 0.0 });
    Ok(DiscreteInversion { spectrum: funk_inverse(&even)?, odd_norm })
}
