//! Closed-form Gram kernels and truncation tail bounds.

use std::f64::consts::PI;

use crate::harmonics::legendre_table;
use crate::radon_sphere::funk_multiplier;

/// `(1 + k(k+1))^{-t}`.
pub fn sphere_weight(k: usize, t: f64) -> f64 {
    (1.0 + (k * (k + 1)) as f64).powf(-t)
}

/// `(1 + 2(k₁(k₁+1) + k₂(k₂+1)))^{-t}`.
pub fn product_weight(k1: usize, k2: usize, t: f64) -> f64 {
    (1.0 + 2.0 * ((k1 * (k1 + 1) + k2 * (k2 + 1)) as f64)).powf(-t)
}

/// `(1 + 4k(k+1))^{-t}`.
pub fn so3_weight(k: usize, t: f64) -> f64 {
    (1.0 + 4.0 * (k * (k + 1)) as f64).powf(-t)
}

/// Per-degree action factor of a pole-based S² functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleAction {
    /// `F(Y_k^i) = Y_k^i(x)`.
    Point,
    /// `F(Y_k^i) = μ_k Y_k^i(θ)` with the Funk multiplier `μ_k`.
    Circle,
}

impl PoleAction {
    pub fn factor(self, k: usize) -> f64 {
        match self {
            PoleAction::Point => 1.0,
            PoleAction::Circle => funk_multiplier(k, 2),
        }
    }
}

/// Legendre coefficients `w_k a_k² (2k+1)/(4π)` of the S² kernel.
pub fn sphere_kernel_coefficients(action: PoleAction, t: f64, degree_max: usize) -> Vec<f64> {
    (0..=degree_max)
        .map(|k| {
            let a = action.factor(k);
            sphere_weight(k, t) * a * a * (2 * k + 1) as f64 / (4.0 * PI)
        })
        .collect()
}

/// `β(x, y) = Σ_k w_k a_k² (2k+1)/(4π) P_k(x·y)`.
pub fn sphere_kernel(coeffs: &[f64], s: f64) -> f64 {
    crate::harmonics::legendre_series(coeffs, s)
}

/// `Σ_{k₁,k₂} w (2k₁+1)(2k₂+1)/(16π²) P_{k₁}(s₁) P_{k₂}(s₂)`.
pub fn product_kernel(t: f64, degree_max: usize, s1: f64, s2: f64) -> f64 {
    let p1 = legendre_table(degree_max, s1);
    let p2 = legendre_table(degree_max, s2);
    let mut acc = 0.0;
    for k1 in 0..=degree_max {
        let mut row = 0.0;
        for k2 in 0..=degree_max {
            row += product_weight(k1, k2, t) * (2 * k2 + 1) as f64 * p2[k2];
        }
        acc += (2 * k1 + 1) as f64 * p1[k1] * row;
    }
    acc / (16.0 * PI * PI)
}

/// Kernel of SO(3) Radon point functionals at `(x, y)`, `(x', y')`:
/// `Σ_k (1+4k(k+1))^{-t} (2k+1) P_k(x·x') P_k(y·y')`.
pub fn radon_kernel(t: f64, degree_max: usize, sx: f64, sy: f64) -> f64 {
    let px = legendre_table(degree_max, sx);
    let py = legendre_table(degree_max, sy);
    (0..=degree_max).map(|k| so3_weight(k, t) * (2 * k + 1) as f64 * px[k] * py[k]).sum()
}

/// The alternative kernel `Σ_k (1+k(k+1))^{-t} P_k(x·y) P_k(x'·y')` pairing
/// the two arguments of each functional. It is not the Gram kernel of Radon
/// point functionals.
pub fn cross_argument_kernel(t: f64, degree_max: usize, s: f64, s_prime: f64) -> f64 {
    let p = legendre_table(degree_max, s);
    let q = legendre_table(degree_max, s_prime);
    (0..=degree_max).map(|k| sphere_weight(k, t) * p[k] * q[k]).sum()
}

/// Diagonal Gram entry (independent of the functional) and tail after `K`.
pub fn sphere_diagonal(action: PoleAction, t: f64, degree_max: usize) -> f64 {
    sphere_kernel_coefficients(action, t, degree_max).iter().sum()
}

pub fn sphere_tail(action: PoleAction, t: f64, degree_max: usize) -> f64 {
    let k = degree_max as f64;
    let base = (1.0 + k * (k + 1.0)).powf(1.0 - t) / ((t - 1.0) * 4.0 * PI);
    match action {
        PoleAction::Point => base,
        // |μ_k| ≤ 2π
        PoleAction::Circle => base * 4.0 * PI * PI,
    }
}

pub fn product_diagonal(t: f64, degree_max: usize) -> f64 {
    product_kernel(t, degree_max, 1.0, 1.0)
}

pub fn product_tail(t: f64, degree_max: usize) -> f64 {
    let k = degree_max as f64;
    2.0 / (16.0 * PI * PI) * (1.0 + 1.0 / (2.0 * (t - 1.0))) * (1.0 + 2.0 * k * (k + 1.0)).powf(2.0 - t)
        / (2.0 * (t - 2.0))
}

pub fn radon_diagonal(t: f64, degree_max: usize) -> f64 {
    radon_kernel(t, degree_max, 1.0, 1.0)
}

pub fn radon_tail(t: f64, degree_max: usize) -> f64 {
    let k = degree_max as f64;
    (1.0 + 4.0 * k * (k + 1.0)).powf(1.0 - t) / (4.0 * (t - 1.0))
}
