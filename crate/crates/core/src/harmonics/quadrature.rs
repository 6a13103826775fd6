//! Dense product quadratures on S² and SO(3).
//!
//! Gauss–Legendre in the cosine of the polar angle times the periodic
//! trapezoid rule in the azimuthal angles.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::legendre::gauss_legendre;
use super::point::SpherePoint;
use super::rotation::EulerRotation;
use super::sphere::{eval_all_into, SphereSpectrum};
use super::wigner::{representations, So3Spectrum};
use crate::par::{add_vec, fold_indexed, sum_indexed};

/// Product rule on S² exact for spherical polynomials of degree `≤ exactness`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    exactness: usize,
    nodes: Vec<SpherePoint>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn new(exactness: usize) -> Self {
        let n_theta = exactness / 2 + 1;
        let n_phi = exactness + 1;
        Self::with_counts(n_theta, n_phi, exactness)
    }

    /// Explicit node counts; `exactness` is recorded as given.
    pub fn with_counts(n_theta: usize, n_phi: usize, exactness: usize) -> Self {
        let (z, w) = gauss_legendre(n_theta);
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (zi, wi) in z.iter().zip(&w) {
            let theta = zi.clamp(-1.0, 1.0).acos();
            for j in 0..n_phi {
                let phi = TAU * j as f64 / n_phi as f64;
                nodes.push(SpherePoint::from_angles(theta, phi));
                weights.push(wi * TAU / n_phi as f64);
            }
        }
        Self { exactness, nodes, weights }
    }

    pub fn exactness(&self) -> usize {
        self.exactness
    }

    pub fn nodes(&self) -> &[SpherePoint] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(&SpherePoint) -> f64 + Sync) -> f64 {
        sum_indexed(self.nodes.len(), |i| self.weights[i] * f(&self.nodes[i]))
    }

    /// Discrete projection onto degrees `≤ degree_max` (exact when
    /// `degree_max + band(f) ≤ exactness`).
    pub fn project(&self, f: impl Fn(&SpherePoint) -> f64 + Sync, degree_max: usize) -> SphereSpectrum {
        let len = (degree_max + 1) * (degree_max + 1);
        let (acc, _) = fold_indexed(
            self.nodes.len(),
            || (vec![0.0; len], Vec::new()),
            |(acc, y), i| {
                let p = &self.nodes[i];
                let v = self.weights[i] * f(p);
                eval_all_into(degree_max, p, y);
                acc.iter_mut().zip(y.iter()).for_each(|(a, b)| *a += v * b);
            },
            |(a, _), (b, _)| add_vec(a, b),
        );
        SphereSpectrum::from_flat(degree_max, acc).expect("length matches")
    }
}

/// Product rule on SO(3) for the Haar probability measure, exact on the span
/// of representation coefficients of degree `≤ exactness`.
#[derive(Debug, Clone)]
pub struct So3Quadrature {
    exactness: usize,
    nodes: Vec<EulerRotation>,
    weights: Vec<f64>,
}

impl So3Quadrature {
    pub fn new(exactness: usize) -> Self {
        let n_beta = exactness / 2 + 1;
        let n_ang = exactness + 1;
        let (z, w) = gauss_legendre(n_beta);
        let mut nodes = Vec::with_capacity(n_beta * n_ang * n_ang);
        let mut weights = Vec::with_capacity(n_beta * n_ang * n_ang);
        let scale = (TAU / n_ang as f64).powi(2) / (8.0 * PI * PI);
        for (zi, wi) in z.iter().zip(&w) {
            let beta = zi.clamp(-1.0, 1.0).acos();
            for a in 0..n_ang {
                for g in 0..n_ang {
                    nodes.push(EulerRotation::new(TAU * a as f64 / n_ang as f64, beta, TAU * g as f64 / n_ang as f64));
                    weights.push(wi * scale);
                }
            }
        }
        Self { exactness, nodes, weights }
    }

    pub fn exactness(&self) -> usize {
        self.exactness
    }

    pub fn nodes(&self) -> &[EulerRotation] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(&EulerRotation) -> Complex64 + Sync) -> Complex64 {
        sum_indexed(self.nodes.len(), |i| f(&self.nodes[i]) * self.weights[i])
    }

    /// `f̂(k)_{ij} = ∫ f · T^k_{ij} dg` for `k ≤ degree_max`.
    pub fn project(&self, f: impl Fn(&EulerRotation) -> Complex64 + Sync, degree_max: usize) -> So3Spectrum {
        let zero = || So3Spectrum::zeros(degree_max);
        fold_indexed(
            self.nodes.len(),
            zero,
            |acc, i| {
                let g = &self.nodes[i];
                let v = f(g) * self.weights[i];
                let reps = representations(degree_max, g);
                for (k, rep) in reps.iter().enumerate() {
                    let block = acc.block_mut(k);
                    for (b, r) in block.iter_mut().zip(rep.iter()) {
                        *b += v * *r;
                    }
                }
            },
            |a, b| *a = a.add(&b),
        )
    }
}
