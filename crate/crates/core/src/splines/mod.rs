//! Variational interpolating splines.
//!
//! Given linear functionals `F_ν` and values `v_ν`, the spline `s_t(v)` is
//! the minimizer of `‖(1 − L)^{t/2} u‖` subject to `F_ν(u) = v_ν`. With an
//! orthonormal eigenbasis `u_j`, eigenvalues `λ_j` and Sobolev weights
//! `w_j = (1 + λ_j)^{-t}`,
//!
//! ```text
//! β_{νμ} = Σ_j w_j F_ν(u_j) F_μ(u_j),   β α = v,   c_j(s) = w_j Σ_ν α_ν F_ν(u_j).
//! ```
//!
//! Three spaces are supported:
//!
//! | space   | functionals                      | weights                        |
//! |---------|----------------------------------|--------------------------------|
//! | S²      | point values, great-circle means | `(1 + k(k+1))^{-t}`            |
//! | S² × S² | point values                     | `(1 + 2(λ₁ + λ₂))^{-t}`        |
//! | SO(3)   | Radon transform at `(x, y)`      | `(1 + 4k(k+1))^{-t}`           |
//!
//! The infinite sums are truncated at `degree_max`; a closed-form bound on
//! the discarded tail must stay below `1e-10` of the diagonal Gram entry.

pub mod kernels;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use serde::{Deserialize, Serialize};

use crate::harmonics::{eval_all, sphere_len, So3Spectrum, SpherePoint, SphereSpectrum, SPHERE_DEGREE_CAP};
use crate::lattice::{GreatCircle, SphereLattice, SpherePair};
use crate::par::{add_vec, fold_indexed};
use crate::radon_sphere::funk_multiplier;
use crate::{Error, Result};

pub use kernels::{
    cross_argument_kernel, product_diagonal, product_kernel, product_tail, product_weight, radon_diagonal,
    radon_kernel, radon_tail, so3_weight, sphere_diagonal, sphere_kernel, sphere_kernel_coefficients, sphere_tail,
    sphere_weight, PoleAction,
};

/// Tail-to-diagonal ratio above which a truncation is refused.
pub const TAIL_RATIO: f64 = 1e-10;
/// Condition-number guard for the Gram factorization.
pub const CONDITION_LIMIT: f64 = 1e12;
pub const PRODUCT_DEGREE_CAP: usize = 40;
pub const RADON_DEGREE_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Functional {
    /// `u ↦ u(x)` on S².
    PointEval { point: SpherePoint },
    /// `u ↦ ∫ u` over a great circle, arc-length measure.
    CircleIntegral { circle: GreatCircle },
    /// `u ↦ u(x, y)` on S² × S².
    ProductPointEval { pair: SpherePair },
    /// `f ↦ (R f)(x, y)`, the mean of `f` over `{g : g y = x}` on SO(3).
    RadonPointEval { pair: SpherePair },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    Point,
    Circle,
    ProductPoint,
    Radon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplineSpace {
    S2,
    S2xS2,
    So3,
}

impl SplineSpace {
    /// Manifold dimension.
    pub fn dimension(self) -> usize {
        match self {
            SplineSpace::S2 => 2,
            SplineSpace::So3 => 3,
            SplineSpace::S2xS2 => 4,
        }
    }
}

impl FunctionalKind {
    pub fn space(self) -> SplineSpace {
        match self {
            FunctionalKind::Point | FunctionalKind::Circle => SplineSpace::S2,
            FunctionalKind::ProductPoint => SplineSpace::S2xS2,
            FunctionalKind::Radon => SplineSpace::So3,
        }
    }

    pub fn degree_cap(self) -> usize {
        match self {
            FunctionalKind::Point | FunctionalKind::Circle => SPHERE_DEGREE_CAP,
            FunctionalKind::ProductPoint => PRODUCT_DEGREE_CAP,
            FunctionalKind::Radon => RADON_DEGREE_CAP,
        }
    }

    /// Diagonal Gram entry at truncation `degree_max`.
    pub fn diagonal(self, t: f64, degree_max: usize) -> f64 {
        match self {
            FunctionalKind::Point => sphere_diagonal(PoleAction::Point, t, degree_max),
            FunctionalKind::Circle => sphere_diagonal(PoleAction::Circle, t, degree_max),
            FunctionalKind::ProductPoint => product_diagonal(t, degree_max),
            FunctionalKind::Radon => radon_diagonal(t, degree_max),
        }
    }

    /// Bound on `Σ_{j beyond degree_max} w_j |F(u_j)|²`.
    pub fn tail(self, t: f64, degree_max: usize) -> f64 {
        match self {
            FunctionalKind::Point => sphere_tail(PoleAction::Point, t, degree_max),
            FunctionalKind::Circle => sphere_tail(PoleAction::Circle, t, degree_max),
            FunctionalKind::ProductPoint => product_tail(t, degree_max),
            FunctionalKind::Radon => radon_tail(t, degree_max),
        }
    }

    /// Smallest truncation degree meeting the tail criterion.
    /// Number of basis functions up to degree `k` on which the functionals
    /// of this kind can be nonzero.
    pub fn reachable_dimension(self, k: usize) -> usize {
        match self {
            FunctionalKind::Point => (k + 1) * (k + 1),
            FunctionalKind::Circle => (0..=k).step_by(2).map(|d| 2 * d + 1).sum(),
            FunctionalKind::ProductPoint => (k + 1).pow(4),
            FunctionalKind::Radon => (0..=k).map(|d| (2 * d + 1) * (2 * d + 1)).sum(),
        }
    }

    pub fn required_degree(self, t: f64) -> Result<usize> {
        let cap = self.degree_cap();
        let mut k = 1;
        while k <= cap {
            let tail = self.tail(t, k);
            if tail <= TAIL_RATIO * self.diagonal(t, k) {
                return Ok(k);
            }
            k += 1;
        }
        Err(Error::TruncationTooCoarse { degree: cap, required: cap + 1, tail: self.tail(t, cap) })
    }
}

impl Functional {
    pub fn point(p: SpherePoint) -> Self {
        Functional::PointEval { point: p }
    }

    pub fn circle(c: GreatCircle) -> Self {
        Functional::CircleIntegral { circle: c }
    }

    pub fn product_point(x: SpherePoint, y: SpherePoint) -> Self {
        Functional::ProductPointEval { pair: SpherePair(x, y) }
    }

    pub fn radon_point(x: SpherePoint, y: SpherePoint) -> Self {
        Functional::RadonPointEval { pair: SpherePair(x, y) }
    }

    pub fn kind(&self) -> FunctionalKind {
        match self {
            Functional::PointEval { .. } => FunctionalKind::Point,
            Functional::CircleIntegral { .. } => FunctionalKind::Circle,
            Functional::ProductPointEval { .. } => FunctionalKind::ProductPoint,
            Functional::RadonPointEval { .. } => FunctionalKind::Radon,
        }
    }

    /// Whether the two functionals coincide as linear maps.
    fn coincides(&self, other: &Functional) -> bool {
        const EPS: f64 = 1e-10;
        match (self, other) {
            (Functional::PointEval { point: a }, Functional::PointEval { point: b }) => a.distance(b) < EPS,
            (Functional::CircleIntegral { circle: a }, Functional::CircleIntegral { circle: b }) => {
                a.pole.distance(&b.pole) < EPS || a.pole.distance(&b.pole.antipode()) < EPS
            }
            (Functional::ProductPointEval { pair: a }, Functional::ProductPointEval { pair: b }) => {
                a.0.distance(&b.0) < EPS && a.1.distance(&b.1) < EPS
            }
            // C_{x,y} = C_{-x,-y}
            (Functional::RadonPointEval { pair: a }, Functional::RadonPointEval { pair: b }) => {
                (a.0.distance(&b.0) < EPS && a.1.distance(&b.1) < EPS)
                    || (a.0.distance(&b.0.antipode()) < EPS && a.1.distance(&b.1.antipode()) < EPS)
            }
            _ => false,
        }
    }

    /// `F(u_j)` for every basis function of degree `≤ degree_max`, in the
    /// basis order of [`basis_weights`].
    pub fn basis_row(&self, degree_max: usize) -> Vec<f64> {
        match self {
            Functional::PointEval { point } => eval_all(degree_max, point),
            Functional::CircleIntegral { circle } => {
                let mut y = eval_all(degree_max, &circle.pole);
                for k in 0..=degree_max {
                    let mu = funk_multiplier(k, 2);
                    y[k * k..(k + 1) * (k + 1)].iter_mut().for_each(|v| *v *= mu);
                }
                y
            }
            Functional::ProductPointEval { pair } => {
                let a = eval_all(degree_max, &pair.0);
                let b = eval_all(degree_max, &pair.1);
                a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
            }
            Functional::RadonPointEval { pair } => {
                let a = eval_all(degree_max, &pair.0);
                let b = eval_all(degree_max, &pair.1);
                let mut row = Vec::with_capacity(so3_basis_len(degree_max));
                for k in 0..=degree_max {
                    let s = 4.0 * PI / ((2 * k + 1) as f64).sqrt();
                    for i in k * k..(k + 1) * (k + 1) {
                        for j in k * k..(k + 1) * (k + 1) {
                            row.push(s * a[i] * b[j]);
                        }
                    }
                }
                row
            }
        }
    }

    /// `F(s)` for a spline spectrum of matching space.
    pub fn apply(&self, spectrum: &SplineSpectrum) -> Result<f64> {
        match (self, spectrum) {
            (Functional::PointEval { point }, SplineSpectrum::Sphere(s)) => Ok(s.evaluate(point)),
            (Functional::CircleIntegral { circle }, SplineSpectrum::Sphere(s)) => {
                let y = eval_all(s.degree_max(), &circle.pole);
                Ok((0..=s.degree_max())
                    .map(|k| {
                        let r = k * k..(k + 1) * (k + 1);
                        funk_multiplier(k, 2) * s.degree(k).iter().zip(&y[r]).map(|(c, y)| c * y).sum::<f64>()
                    })
                    .sum())
            }
            (Functional::ProductPointEval { pair }, SplineSpectrum::Product(s)) => Ok(s.evaluate(&pair.0, &pair.1)),
            (Functional::RadonPointEval { pair }, SplineSpectrum::So3(s)) => Ok(radon_at(s, &pair.0, &pair.1).re),
            _ => Err(Error::invalid("functional and spectrum live on different spaces")),
        }
    }
}

/// `(R f)(x, y) = 4π Σ_k Σ_{ij} f̂(k)_{ij} Y_k^i(x) Y_k^j(y)`.
pub fn radon_at(spec: &So3Spectrum, x: &SpherePoint, y: &SpherePoint) -> Complex64 {
    let kmax = spec.degree_max();
    let a = eval_all(kmax, x);
    let b = eval_all(kmax, y);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=kmax {
        let blk = spec.block(k);
        let o = k * k;
        for i in 0..2 * k + 1 {
            for j in 0..2 * k + 1 {
                acc += blk[(i, j)] * (a[o + i] * b[o + j]);
            }
        }
    }
    acc * (4.0 * PI)
}

fn so3_basis_len(degree_max: usize) -> usize {
    (0..=degree_max).map(|k| (2 * k + 1) * (2 * k + 1)).sum()
}

/// Sobolev weights `w_j` in basis order for the given space.
pub fn basis_weights(space: SplineSpace, t: f64, degree_max: usize) -> Vec<f64> {
    match space {
        SplineSpace::S2 => (0..=degree_max).flat_map(|k| std::iter::repeat_n(sphere_weight(k, t), 2 * k + 1)).collect(),
        SplineSpace::S2xS2 => {
            let deg: Vec<usize> = (0..=degree_max).flat_map(|k| std::iter::repeat_n(k, 2 * k + 1)).collect();
            deg.iter().flat_map(|&a| deg.iter().map(move |&b| product_weight(a, b, t))).collect()
        }
        SplineSpace::So3 => {
            (0..=degree_max).flat_map(|k| std::iter::repeat_n(so3_weight(k, t), (2 * k + 1) * (2 * k + 1))).collect()
        }
    }
}

/// Coefficients `c_{(k₁,i₁),(k₂,i₂)}` of a function on S² × S² in the tensor
/// harmonic basis `Y_{k₁}^{i₁}(x) Y_{k₂}^{i₂}(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpectrum {
    degree_max: usize,
    coeffs: DMatrix<f64>,
}

impl TensorSpectrum {
    pub fn zeros(degree_max: usize) -> Self {
        let n = sphere_len(degree_max);
        Self { degree_max, coeffs: DMatrix::zeros(n, n) }
    }

    pub fn from_matrix(degree_max: usize, coeffs: DMatrix<f64>) -> Result<Self> {
        let n = sphere_len(degree_max);
        if coeffs.shape() != (n, n) {
            return Err(Error::invalid(format!("tensor spectrum of degree {degree_max} needs {n}x{n}")));
        }
        Ok(Self { degree_max, coeffs })
    }

    pub fn degree_max(&self) -> usize {
        self.degree_max
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    pub fn evaluate(&self, x: &SpherePoint, y: &SpherePoint) -> f64 {
        let a = DVector::from_vec(eval_all(self.degree_max, x));
        let b = DVector::from_vec(eval_all(self.degree_max, y));
        a.dot(&(&self.coeffs * b))
    }

    /// Block `(k₁, k₂)` of size `(2k₁+1) × (2k₂+1)`.
    pub fn block(&self, k1: usize, k2: usize) -> DMatrix<f64> {
        self.coeffs.view((k1 * k1, k2 * k2), (2 * k1 + 1, 2 * k2 + 1)).into_owned()
    }

    pub fn norm_squared(&self) -> f64 {
        self.coeffs.norm_squared()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SplineSpectrum {
    Sphere(SphereSpectrum),
    Product(TensorSpectrum),
    So3(So3Spectrum),
}

impl SplineSpectrum {
    pub fn as_sphere(&self) -> Option<&SphereSpectrum> {
        match self {
            SplineSpectrum::Sphere(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_product(&self) -> Option<&TensorSpectrum> {
        match self {
            SplineSpectrum::Product(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_so3(&self) -> Option<&So3Spectrum> {
        match self {
            SplineSpectrum::So3(s) => Some(s),
            _ => None,
        }
    }

    /// Spectrum from basis coefficients `c_j`.
    fn from_basis(space: SplineSpace, degree_max: usize, c: &[f64]) -> Self {
        match space {
            SplineSpace::S2 => {
                SplineSpectrum::Sphere(SphereSpectrum::from_flat(degree_max, c.to_vec()).expect("length"))
            }
            SplineSpace::S2xS2 => {
                let n = sphere_len(degree_max);
                SplineSpectrum::Product(TensorSpectrum { degree_max, coeffs: DMatrix::from_row_slice(n, n, c) })
            }
            SplineSpace::So3 => {
                let mut s = So3Spectrum::zeros(degree_max);
                let mut off = 0;
                for k in 0..=degree_max {
                    let d = 2 * k + 1;
                    let scale = 1.0 / (d as f64).sqrt();
                    let blk = s.block_mut(k);
                    for i in 0..d {
                        for j in 0..d {
                            blk[(i, j)] = Complex64::new(c[off + i * d + j] * scale, 0.0);
                        }
                    }
                    off += d * d;
                }
                SplineSpectrum::So3(s)
            }
        }
    }
}

/// `⟨a, b⟩_t = Σ (1 + k(k+1))^t a_{k,i} b_{k,i}` on S².
pub fn sobolev_inner_sphere(a: &SphereSpectrum, b: &SphereSpectrum, t: f64) -> f64 {
    let k = a.degree_max().min(b.degree_max());
    (0..=k)
        .map(|d| {
            let w = sphere_weight(d, -t);
            w * a.degree(d).iter().zip(b.degree(d)).map(|(x, y)| x * y).sum::<f64>()
        })
        .sum()
}

/// `⟨a, b⟩_t = Σ_k (1 + 4k(k+1))^t (2k+1) Re tr(â(k)ᴴ b̂(k))` on SO(3).
pub fn sobolev_inner_so3(a: &So3Spectrum, b: &So3Spectrum, t: f64) -> f64 {
    let k = a.degree_max().min(b.degree_max());
    (0..=k)
        .map(|d| {
            let w = so3_weight(d, -t) * (2 * d + 1) as f64;
            w * a.block(d).iter().zip(b.block(d).iter()).map(|(x, y)| (x.conj() * y).re).sum::<f64>()
        })
        .sum()
}

/// `⟨a, b⟩_t = Σ (1 + 2(λ₁+λ₂))^t a b` on S² × S².
pub fn sobolev_inner_product(a: &TensorSpectrum, b: &TensorSpectrum, t: f64) -> f64 {
    let k = a.degree_max.min(b.degree_max);
    let w = basis_weights(SplineSpace::S2xS2, -t, k);
    let n = sphere_len(k);
    let mut acc = 0.0;
    for r in 0..n {
        for c in 0..n {
            acc += w[r * n + c] * a.coeffs[(r, c)] * b.coeffs[(r, c)];
        }
    }
    acc
}

/// `‖(1 − L)^{t/2} s‖` computed from any spline spectrum.
pub fn sobolev_norm_of(spectrum: &SplineSpectrum, t: f64) -> f64 {
    match spectrum {
        SplineSpectrum::Sphere(s) => sobolev_inner_sphere(s, s, t),
        SplineSpectrum::Product(s) => sobolev_inner_product(s, s, t),
        // ‖f‖² sums |f̂|², so the complex blocks need the modulus
        SplineSpectrum::So3(s) => {
            (0..=s.degree_max()).map(|d| so3_weight(d, -t) * (2 * d + 1) as f64 * s.block(d).norm_squared()).sum()
        }
    }
    .max(0.0)
    .sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplineProblem {
    functionals: Vec<Functional>,
    t: f64,
    degree_max: usize,
    kind: FunctionalKind,
    tail: f64,
}

impl SplineProblem {
    /// Validates smoothness, distinctness and the truncation tail.
    pub fn new(functionals: Vec<Functional>, t: f64, degree_max: usize) -> Result<Self> {
        let kind = Self::check(&functionals, t)?;
        if degree_max > kind.degree_cap() {
            return Err(Error::DegreeTooHigh { requested: degree_max, cap: kind.degree_cap() });
        }
        let tail = kind.tail(t, degree_max);
        if tail > TAIL_RATIO * kind.diagonal(t, degree_max) {
            return Err(Error::TruncationTooCoarse { degree: degree_max, required: kind.required_degree(t)?, tail });
        }
        Ok(Self { functionals, t, degree_max, kind, tail })
    }

    /// As [`new`](Self::new) with the smallest admissible truncation, but at
    /// least `min_degree` and with at least `2N` basis functions reachable by
    /// the functionals.
    pub fn with_auto_degree(functionals: Vec<Functional>, t: f64, min_degree: usize) -> Result<Self> {
        let kind = Self::check(&functionals, t)?;
        let mut k = kind.required_degree(t)?.max(min_degree);
        while kind.reachable_dimension(k) < 2 * functionals.len() && k < kind.degree_cap() {
            k += 1;
        }
        Self::new(functionals, t, k)
    }

    fn check(functionals: &[Functional], t: f64) -> Result<FunctionalKind> {
        let first = functionals.first().ok_or_else(|| Error::invalid("no functionals"))?;
        let kind = first.kind();
        if functionals.iter().any(|f| f.kind() != kind) {
            return Err(Error::invalid("functionals of different kinds"));
        }
        let d = kind.space().dimension() as f64;
        if !(t > d) {
            return Err(Error::invalid(format!("smoothness t = {t} must exceed the dimension {d}")));
        }
        for i in 0..functionals.len() {
            for j in i + 1..functionals.len() {
                if functionals[i].coincides(&functionals[j]) {
                    return Err(Error::Singular(format!("functionals {i} and {j} coincide")));
                }
            }
        }
        Ok(kind)
    }

    pub fn functionals(&self) -> &[Functional] {
        &self.functionals
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn degree_max(&self) -> usize {
        self.degree_max
    }

    pub fn kind(&self) -> FunctionalKind {
        self.kind
    }

    pub fn space(&self) -> SplineSpace {
        self.kind.space()
    }

    pub fn len(&self) -> usize {
        self.functionals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functionals.is_empty()
    }

    /// Bound on the discarded part of every Gram entry.
    pub fn tail_bound(&self) -> f64 {
        self.tail
    }

    /// `F_ν(u_j)` for all functionals, `N × M`.
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        let rows: Vec<Vec<f64>> = self.functionals.par_iter().map(|f| f.basis_row(self.degree_max)).collect();
        let m = rows[0].len();
        DMatrix::from_fn(rows.len(), m, |r, c| rows[r][c])
    }

    /// `Σ_ν a_ν F_ν(u_j)` for every basis function, without storing the
    /// basis matrix.
    pub fn adjoint_apply(&self, a: &[f64]) -> Vec<f64> {
        let m = match self.space() {
            SplineSpace::S2 => sphere_len(self.degree_max),
            SplineSpace::S2xS2 => sphere_len(self.degree_max).pow(2),
            SplineSpace::So3 => so3_basis_len(self.degree_max),
        };
        fold_indexed(
            self.functionals.len(),
            || vec![0.0; m],
            |acc, i| {
                if a[i] != 0.0 {
                    acc.iter_mut()
                        .zip(self.functionals[i].basis_row(self.degree_max))
                        .for_each(|(x, r)| *x += a[i] * r);
                }
            },
            |x, y| add_vec(x, y),
        )
    }

    /// Gram matrix from the closed-form kernels.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.len();
        let (t, kmax) = (self.t, self.degree_max);
        let sphere_coeffs = match self.kind {
            FunctionalKind::Point => sphere_kernel_coefficients(PoleAction::Point, t, kmax),
            FunctionalKind::Circle => sphere_kernel_coefficients(PoleAction::Circle, t, kmax),
            _ => Vec::new(),
        };
        let entry = |a: &Functional, b: &Functional| -> f64 {
            match (a, b) {
                (Functional::PointEval { point: x }, Functional::PointEval { point: y }) => {
                    sphere_kernel(&sphere_coeffs, x.dot(y))
                }
                (Functional::CircleIntegral { circle: x }, Functional::CircleIntegral { circle: y }) => {
                    sphere_kernel(&sphere_coeffs, x.pole.dot(&y.pole))
                }
                (Functional::ProductPointEval { pair: p }, Functional::ProductPointEval { pair: q }) => {
                    product_kernel(t, kmax, p.0.dot(&q.0), p.1.dot(&q.1))
                }
                (Functional::RadonPointEval { pair: p }, Functional::RadonPointEval { pair: q }) => {
                    radon_kernel(t, kmax, p.0.dot(&q.0), p.1.dot(&q.1))
                }
                _ => unreachable!("kinds are checked at construction"),
            }
        };
        let upper: Vec<(usize, usize, f64)> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let f = &self.functionals;
                let e = &entry;
                (i..n).map(move |j| (i, j, e(&f[i], &f[j])))
            })
            .collect();
        let mut g = DMatrix::zeros(n, n);
        for (i, j, v) in upper {
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
        g
    }

    /// `Σ_j w_j F_ν(u_j) F_μ(u_j)` summed explicitly over the basis.
    pub fn gram_brute_force(&self) -> DMatrix<f64> {
        let a = self.basis_matrix();
        let w = DVector::from_vec(basis_weights(self.space(), self.t, self.degree_max));
        let aw = DMatrix::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)] * w[c]);
        aw * a.transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStrategy {
    /// Cholesky factorization of the Gram matrix with a condition guard.
    #[default]
    Gram,
    /// Householder QR of the weighted basis matrix `(A W^{1/2})ᵀ`; `R` has
    /// the square root of the Gram conditioning.
    WeightedBasisQr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spline {
    pub problem: SplineProblem,
    pub alpha: Vec<f64>,
    pub values: Vec<f64>,
    pub spectrum: SplineSpectrum,
    pub strategy: SolveStrategy,
    /// `max_ν |F_ν(s) − v_ν|`.
    pub interpolation_residual: f64,
}

/// Both forms of the spline norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevNorms {
    /// `(Σ α_ν v_ν)^{1/2}`.
    pub dual: f64,
    /// `‖(1 − L)^{t/2} s‖` from the spectrum.
    pub spectral: f64,
}

pub fn fit(problem: &SplineProblem, values: &[f64]) -> Result<Spline> {
    fit_with(problem, values, SolveStrategy::Gram)
}

pub fn fit_with(problem: &SplineProblem, values: &[f64], strategy: SolveStrategy) -> Result<Spline> {
    let n = problem.len();
    if values.len() != n {
        return Err(Error::invalid(format!("{} values for {n} functionals", values.len())));
    }
    let v = DVector::from_column_slice(values);
    let w = basis_weights(problem.space(), problem.t, problem.degree_max);
    let (alpha, c) = match strategy {
        SolveStrategy::Gram => {
            let g = problem.gram();
            let eig = g.clone().symmetric_eigenvalues();
            let (lo, hi) = (eig.min(), eig.max());
            if !(lo > 0.0) || hi / lo > CONDITION_LIMIT {
                return Err(Error::Singular(format!(
                    "Gram eigenvalues in [{lo:.3e}, {hi:.3e}], condition above {CONDITION_LIMIT:e}"
                )));
            }
            let chol = g.cholesky().ok_or_else(|| Error::Singular("Gram matrix is not positive definite".into()))?;
            let alpha = chol.solve(&v);
            let c: Vec<f64> = problem.adjoint_apply(alpha.as_slice()).iter().zip(&w).map(|(x, w)| x * w).collect();
            (alpha, c)
        }
        SolveStrategy::WeightedBasisQr => {
            let a = problem.basis_matrix();
            let sw: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
            let b = DMatrix::from_fn(a.ncols(), n, |r, c| a[(c, r)] * sw[r]);
            if b.nrows() < n {
                return Err(Error::Singular(format!("{} basis functions for {n} functionals", b.nrows())));
            }
            let col_norms: Vec<f64> = (0..n).map(|i| b.column(i).norm()).collect();
            let qr = b.qr();
            let r = qr.r();
            for i in 0..n {
                if !(r[(i, i)].abs() > 1e-13 * col_norms[i]) {
                    return Err(Error::Singular(format!("functional {i} is numerically dependent on the others")));
                }
            }
            let z = r
                .transpose()
                .solve_lower_triangular(&v)
                .ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
            let alpha =
                r.solve_upper_triangular(&z).ok_or_else(|| Error::Singular("triangular solve failed".into()))?;
            let qz = qr.q() * &z;
            let c: Vec<f64> = qz.iter().zip(&sw).map(|(x, s)| x * s).collect();
            (alpha, c)
        }
    };
    let spectrum = SplineSpectrum::from_basis(problem.space(), problem.degree_max, &c);
    let fitted: Vec<f64> = problem.functionals.par_iter().map(|f| f.apply(&spectrum)).collect::<Result<_>>()?;
    let interpolation_residual = fitted.iter().zip(values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(Spline {
        problem: problem.clone(),
        alpha: alpha.iter().copied().collect(),
        values: values.to_vec(),
        spectrum,
        strategy,
        interpolation_residual,
    })
}

impl Spline {
    /// Value at a point of S² (S² splines only).
    pub fn evaluate(&self, p: &SpherePoint) -> Result<f64> {
        match &self.spectrum {
            SplineSpectrum::Sphere(s) => Ok(s.evaluate(p)),
            _ => Err(Error::invalid("point evaluation needs an S² spline")),
        }
    }

    pub fn apply(&self, f: &Functional) -> Result<f64> {
        f.apply(&self.spectrum)
    }

    /// Both norm forms; errors when they disagree beyond `1e-8` relative.
    pub fn sobolev_norm(&self) -> Result<SobolevNorms> {
        let dual_sq: f64 = self.alpha.iter().zip(&self.values).map(|(a, v)| a * v).sum();
        let spectral = sobolev_norm_of(&self.spectrum, self.problem.t);
        let dual = dual_sq.max(0.0).sqrt();
        let scale = dual.max(spectral);
        if (dual_sq - spectral * spectral).abs() > 1e-8 * scale * scale + 1e-300 {
            return Err(Error::Numerical(format!("norm forms disagree: {dual:e} vs {spectral:e}")));
        }
        Ok(SobolevNorms { dual, spectral })
    }
}

/// Lagrangian-spline synthesis of point samples on an S² lattice with order
/// `τ = 2^m · 2 + t`; returns the spline whose spectrum approximates `f`.
pub fn sampling_reconstruct(
    lattice: &SphereLattice,
    samples: &[f64],
    t: f64,
    m: u32,
    min_degree: usize,
) -> Result<Spline> {
    let tau = 2f64.powi(m as i32) * 2.0 + t;
    let functionals = lattice.points.iter().map(|p| Functional::point(*p)).collect();
    let problem = SplineProblem::with_auto_degree(functionals, tau, min_degree)?;
    fit_with(&problem, samples, SolveStrategy::WeightedBasisQr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_gram_is_the_weight_sum() {
        let t = 3.0;
        let k = FunctionalKind::Point.required_degree(t).unwrap();
        let p = SplineProblem::new(vec![Functional::point(SpherePoint::north())], t, k).unwrap();
        let want: f64 = (0..=k).map(|d| sphere_weight(d, t) * (2 * d + 1) as f64 / (4.0 * PI)).sum();
        assert!((p.gram()[(0, 0)] - want).abs() < 1e-14);
    }

    #[test]
    fn smoothness_must_exceed_dimension() {
        let f = vec![Functional::point(SpherePoint::north())];
        assert!(SplineProblem::new(f, 2.0, 10).is_err());
    }

    #[test]
    fn coarse_truncation_is_refused() {
        let f = vec![Functional::point(SpherePoint::north())];
        assert!(matches!(SplineProblem::new(f, 3.0, 64), Err(Error::TruncationTooCoarse { .. })));
    }

    #[test]
    fn duplicate_functionals_are_singular() {
        let p = SpherePoint::new(1.0, 2.0, 3.0);
        let f = vec![Functional::point(p), Functional::point(p)];
        assert!(matches!(SplineProblem::with_auto_degree(f, 3.0, 0), Err(Error::Singular(_))));
    }
}
