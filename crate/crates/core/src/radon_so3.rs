//! The Radon transform on SO(3).
//!
//! `(R f)(x, y)` is the mean of `f` over the circle `C_{x,y} = {g : g y = x}`
//! (arc length, total mass one). With `f̂(k)_{ij} = ⟨f, T^k_{ij}⟩`,
//!
//! ```text
//! R T^k_{ij}(x, y) = 4π/(2k+1) · Y_k^i(x) Y_k^j(y),
//! R f(x, y) = Σ_k Σ_{ij} Ĝ(k)_{ij} Y_k^i(x) Y_k^j(y),   Ĝ(k) = 4π · f̂(k).
//! ```
//!
//! The image consists of functions on S² × S² whose tensor spectrum lives on
//! the degree-diagonal blocks `k₁ = k₂`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cubature::ProductRule;
use crate::harmonics::{eval_all, EulerRotation, So3Spectrum, SpherePoint};
use crate::lattice::{ProductLattice, SpherePair};
use crate::par::fold_indexed;
use crate::splines::{fit_with, Functional, SolveStrategy, SplineProblem};
use crate::{Error, Result};

/// `Ĝ(k)`: coefficients of `Σ Ĝ(k)_{ij} Y_k^i(x) Y_k^j(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpectrum {
    blocks: Vec<DMatrix<Complex64>>,
}

impl ProductSpectrum {
    pub fn zeros(degree_max: usize) -> Self {
        Self {
            blocks: (0..=degree_max)
                .map(|k| DMatrix::from_element(2 * k + 1, 2 * k + 1, Complex64::new(0.0, 0.0)))
                .collect(),
        }
    }

    pub fn from_blocks(blocks: Vec<DMatrix<Complex64>>) -> Result<Self> {
        So3Spectrum::from_blocks(blocks.clone())?;
        Ok(Self { blocks })
    }

    pub fn degree_max(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, k: usize) -> &DMatrix<Complex64> {
        &self.blocks[k]
    }

    pub fn block_mut(&mut self, k: usize) -> &mut DMatrix<Complex64> {
        &mut self.blocks[k]
    }

    pub fn evaluate(&self, x: &SpherePoint, y: &SpherePoint) -> Complex64 {
        let kmax = self.degree_max();
        let a = eval_all(kmax, x);
        let b = eval_all(kmax, y);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, blk) in self.blocks.iter().enumerate() {
            let o = k * k;
            for i in 0..2 * k + 1 {
                for j in 0..2 * k + 1 {
                    acc += blk[(i, j)] * (a[o + i] * b[o + j]);
                }
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &ProductSpectrum) -> f64 {
        self.to_so3().max_abs_diff(&other.to_so3())
    }

    /// `‖f‖²_{SO(3)}` of the preimage: `Σ (2k+1) ‖Ĝ(k)‖²_F / (4π)²`.
    pub fn preimage_norm_squared(&self) -> f64 {
        self.blocks.iter().enumerate().map(|(k, b)| (2 * k + 1) as f64 * b.norm_squared()).sum::<f64>()
            / (16.0 * PI * PI)
    }

    fn to_so3(&self) -> So3Spectrum {
        So3Spectrum::from_blocks(self.blocks.clone()).expect("shapes are valid")
    }
}

pub fn radon_forward_spectral(spec: &So3Spectrum) -> ProductSpectrum {
    let s = Complex64::new(4.0 * PI, 0.0);
    ProductSpectrum { blocks: spec.blocks().iter().map(|b| b * s).collect() }
}

pub fn radon_inverse_spectral(g: &ProductSpectrum) -> So3Spectrum {
    let s = Complex64::new(1.0 / (4.0 * PI), 0.0);
    So3Spectrum::from_blocks(g.blocks.iter().map(|b| b * s).collect()).expect("shapes are valid")
}

/// `(R f)(x, y)` by the mean over `φ ↦ x′ Z(φ) y′⁻¹` with `n` equispaced
/// nodes, where `x′ e_z = x` and `y′ e_z = y`. Exact for `f` of degree `< n`.
pub fn radon_by_quadrature(
    f: impl Fn(&EulerRotation) -> Complex64,
    x: &SpherePoint,
    y: &SpherePoint,
    n: usize,
) -> Complex64 {
    let xp = EulerRotation::taking_north_to(x).matrix();
    let yp_inv = EulerRotation::taking_north_to(y).matrix().transpose();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let phi = 2.0 * PI * j as f64 / n as f64;
        let g = xp * crate::harmonics::rot_z(phi) * yp_inv;
        acc += f(&EulerRotation::from_matrix(&g));
    }
    acc / n as f64
}

/// `−k(k+1)`, the eigenvalue of `Δ_{SO(3)}` on degree `k`.
pub fn so3_laplacian(k: usize) -> f64 {
    -((k * (k + 1)) as f64)
}

/// `−(k₁(k₁+1) + k₂(k₂+1))` on S² × S².
pub fn product_laplacian(k1: usize, k2: usize) -> f64 {
    -(((k1 * (k1 + 1)) + (k2 * (k2 + 1))) as f64)
}

/// `Δ_{S²×S²} R = 2 R Δ_{SO(3)}` holds blockwise on the multiplier tables.
pub fn intertwining_holds(degree_max: usize) -> bool {
    (0..=degree_max).all(|k| 2.0 * so3_laplacian(k) == product_laplacian(k, k))
}

/// Spline on SO(3) with prescribed Radon values `(R s)(x_ν, y_ν) = v_ν`.
pub fn spline_inversion(pairs: &[SpherePair], values: &[f64], t: f64, min_degree: usize) -> Result<So3Spectrum> {
    let functionals = pairs.iter().map(|p| Functional::radon_point(p.0, p.1)).collect();
    let problem = SplineProblem::with_auto_degree(functionals, t, min_degree)?;
    let s = fit_with(&problem, values, SolveStrategy::Gram)?;
    Ok(s.spectrum.as_so3().expect("SO(3) spline").clone())
}

/// `S_τ f = R⁻¹(ŝ_τ(R f))` with `τ = 4 · 2^m + t + 1`: a point spline on
/// S² × S² through samples of `R f`, restricted to the degree-diagonal
/// blocks and inverted.
pub fn sampling_reconstruct_s(
    lattice: &ProductLattice,
    rf_samples: &[f64],
    t: f64,
    m: u32,
    min_degree: usize,
) -> Result<So3Spectrum> {
    let tau = 4.0 * 2f64.powi(m as i32) + t + 1.0;
    let functionals = lattice.points.iter().map(|p| Functional::product_point(p.0, p.1)).collect();
    let problem = SplineProblem::with_auto_degree(functionals, tau, min_degree)?;
    let s = fit_with(&problem, rf_samples, SolveStrategy::WeightedBasisQr)?;
    let tensor = s.spectrum.as_product().expect("S²×S² spline");
    let mut g = ProductSpectrum::zeros(tensor.degree_max());
    for k in 0..=tensor.degree_max() {
        *g.block_mut(k) = tensor.block(k, k).map(|v| Complex64::new(v, 0.0));
    }
    Ok(radon_inverse_spectral(&g))
}

/// Exact recovery of a degree-`band` `f` from samples of `R f` at the nodes
/// of a product rule exact to `2·band` in each factor.
pub fn discrete_inversion(rule: &ProductRule, rf_samples: &[f64], band: usize) -> Result<So3Spectrum> {
    if rule.degree < 2 * band {
        return Err(Error::InsufficientRule { have: rule.degree, need: 2 * band });
    }
    discrete_inversion_unchecked(rule, rf_samples, band)
}

/// As [`discrete_inversion`] without the degree check.
pub fn discrete_inversion_unchecked(rule: &ProductRule, rf_samples: &[f64], band: usize) -> Result<So3Spectrum> {
    rule.check_samples(rf_samples)?;
    let n = (band + 1) * (band + 1);
    let sums = fold_indexed(
        rule.len(),
        || DMatrix::<f64>::zeros(n, n),
        |acc, nu| {
            let p = &rule.points[nu];
            let a = eval_all(band, &p.0);
            let b = eval_all(band, &p.1);
            let c = rule.weights[nu] * rf_samples[nu];
            for k in 0..=band {
                for i in k * k..(k + 1) * (k + 1) {
                    for j in k * k..(k + 1) * (k + 1) {
                        acc[(i, j)] += c * a[i] * b[j];
                    }
                }
            }
        },
        |a, b| *a += b,
    );
    let mut g = ProductSpectrum::zeros(band);
    for k in 0..=band {
        *g.block_mut(k) = sums.view((k * k, k * k), (2 * k + 1, 2 * k + 1)).map(|v| Complex64::new(v, 0.0));
    }
    Ok(radon_inverse_spectral(&g))
}
