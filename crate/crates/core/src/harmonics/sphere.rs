//! Real orthonormal spherical harmonics on S² and coefficient spectra.
//!
//! Order index `i ∈ 1..=2k+1` maps to the azimuthal number `m = i - k - 1`.
//! For `m > 0` the harmonic is `√2 N P_k^m(cos θ) cos(mφ)`, for `m < 0` it is
//! `√2 N P_k^{|m|}(cos θ) sin(|m|φ)`, without the Condon–Shortley phase.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::point::SpherePoint;
use super::quadrature::SphereQuadrature;
use crate::{Error, Result};

/// Upper bound on the degree accepted by evaluation entry points.
pub const SPHERE_DEGREE_CAP: usize = 512;

/// Default working degree cap on S².
pub const DEFAULT_SPHERE_DEGREE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub k: usize,
    pub i: usize,
}

impl HarmonicIndex {
    pub fn new(k: usize, i: usize) -> Result<Self> {
        if i == 0 || i > 2 * k + 1 {
            return Err(Error::IndexOutOfRange(format!("order {i} for degree {k}")));
        }
        Ok(Self { k, i })
    }

    /// Azimuthal number `m ∈ [-k, k]`.
    pub fn m(&self) -> i64 {
        self.i as i64 - self.k as i64 - 1
    }

    /// Position in the flat coefficient layout `k² + i - 1`.
    pub fn flat(&self) -> usize {
        self.k * self.k + self.i - 1
    }

    pub fn from_flat(j: usize) -> Self {
        let k = (j as f64).sqrt() as usize;
        // guard against rounding at perfect squares
        let k = if (k + 1) * (k + 1) <= j {
            k + 1
        } else if k * k > j {
            k - 1
        } else {
            k
        };
        Self { k, i: j - k * k + 1 }
    }

    /// Eigenvalue of `-Δ`, `k(k+1)`.
    pub fn eigenvalue(&self) -> f64 {
        (self.k * (self.k + 1)) as f64
    }
}

/// Number of harmonics of degree `k` on `S^d`, `(d+2k-1)(d+k-2)!/(k!(d-1)!)`.
pub fn harmonic_dimension(d: usize, k: usize) -> usize {
    assert!(d >= 1);
    if k == 0 {
        return 1;
    }
    if d == 1 {
        return 2;
    }
    // binomial(d+k-2, k), exact at every step
    let mut binom: u128 = 1;
    for j in 1..=k as u128 {
        binom = binom * (d as u128 - 2 + j) / j;
    }
    ((d + 2 * k - 1) as u128 * binom / (d as u128 - 1)) as usize
}

/// Number of coefficients up to and including degree `kmax`.
pub fn sphere_len(kmax: usize) -> usize {
    (kmax + 1) * (kmax + 1)
}

/// Evaluates every real harmonic of degree `≤ kmax` at `p` into `out`
/// (flat layout, length `(kmax+1)²`).
pub fn eval_all_into(kmax: usize, p: &SpherePoint, out: &mut Vec<f64>) {
    out.clear();
    out.resize(sphere_len(kmax), 0.0);
    let z = p.z;
    // q[m] tracks P̄_k^m / sin^m θ for the current k; we sweep m outer, k inner.
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut diag = 1.0 / (4.0 * PI).sqrt();
    // (x + i y)^m
    let (mut cr, mut ci) = (1.0, 0.0);
    for m in 0..=kmax {
        if m > 0 {
            let mf = m as f64;
            diag *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
            let nr = cr * p.x - ci * p.y;
            let ni = cr * p.y + ci * p.x;
            cr = nr;
            ci = ni;
        }
        let (re, im) = if m == 0 { (1.0, 0.0) } else { (sqrt2 * cr, sqrt2 * ci) };
        let mf = m as f64;
        let mut q_prev = 0.0;
        let mut q = diag;
        for k in m..=kmax {
            if k == m + 1 {
                let next = (2.0 * mf + 3.0).sqrt() * z * q;
                q_prev = q;
                q = next;
            } else if k > m + 1 {
                let kf = k as f64;
                let a = ((4.0 * kf * kf - 1.0) / (kf * kf - mf * mf)).sqrt();
                let b = (((kf - 1.0) * (kf - 1.0) - mf * mf) / (4.0 * (kf - 1.0) * (kf - 1.0) - 1.0)).sqrt();
                let next = a * (z * q - b * q_prev);
                q_prev = q;
                q = next;
            }
            let base = k * k + k;
            out[base + m] = q * re;
            if m > 0 {
                out[base - m] = q * im;
            }
        }
    }
}

pub fn eval_all(kmax: usize, p: &SpherePoint) -> Vec<f64> {
    let mut v = Vec::new();
    eval_all_into(kmax, p, &mut v);
    v
}

/// `Y_k^i(p)`, orthonormal with respect to surface measure.
pub fn sph_harm(idx: HarmonicIndex, p: &SpherePoint) -> Result<f64> {
    HarmonicIndex::new(idx.k, idx.i)?;
    if idx.k > SPHERE_DEGREE_CAP {
        return Err(Error::DegreeTooHigh { requested: idx.k, cap: SPHERE_DEGREE_CAP });
    }
    Ok(eval_all(idx.k, p)[idx.flat()])
}

/// Coefficients of a real function on S² in the real harmonic basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSpectrum {
    degree_max: usize,
    coeffs: Vec<f64>,
}

impl SphereSpectrum {
    pub fn zeros(degree_max: usize) -> Self {
        Self { degree_max, coeffs: vec![0.0; sphere_len(degree_max)] }
    }

    pub fn from_flat(degree_max: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != sphere_len(degree_max) {
            return Err(Error::invalid(format!(
                "expected {} coefficients for degree {degree_max}, got {}",
                sphere_len(degree_max),
                coeffs.len()
            )));
        }
        Ok(Self { degree_max, coeffs })
    }

    /// Spectrum with a single unit coefficient.
    pub fn unit(degree_max: usize, idx: HarmonicIndex) -> Result<Self> {
        if idx.k > degree_max {
            return Err(Error::IndexOutOfRange(format!("degree {} > {degree_max}", idx.k)));
        }
        let mut s = Self::zeros(degree_max);
        s.coeffs[idx.flat()] = 1.0;
        Ok(s)
    }

    pub fn degree_max(&self) -> usize {
        self.degree_max
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn get(&self, k: usize, i: usize) -> f64 {
        if k > self.degree_max {
            return 0.0;
        }
        self.coeffs[k * k + i - 1]
    }

    pub fn set(&mut self, k: usize, i: usize, value: f64) {
        self.coeffs[k * k + i - 1] = value;
    }

    /// Coefficients of degree `k`, orders `1..=2k+1`.
    pub fn degree(&self, k: usize) -> &[f64] {
        &self.coeffs[k * k..(k + 1) * (k + 1)]
    }

    pub fn degree_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.coeffs[k * k..(k + 1) * (k + 1)]
    }

    /// Synthesis `Σ c_{k,i} Y_k^i(p)`.
    pub fn evaluate(&self, p: &SpherePoint) -> f64 {
        let y = eval_all(self.degree_max, p);
        y.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum()
    }

    /// `‖f‖²_{L²(S²)}`.
    pub fn norm_squared(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Energy carried by odd degrees.
    pub fn odd_energy(&self) -> f64 {
        (1..=self.degree_max).step_by(2).map(|k| self.degree(k).iter().map(|c| c * c).sum::<f64>()).sum()
    }

    /// Energy carried by even degrees (including k = 0).
    pub fn even_energy(&self) -> f64 {
        self.norm_squared() - self.odd_energy()
    }

    /// Applies a per-degree multiplier.
    pub fn map_degrees(&self, mut f: impl FnMut(usize) -> f64) -> Self {
        let mut out = self.clone();
        for k in 0..=self.degree_max {
            let m = f(k);
            out.degree_mut(k).iter_mut().for_each(|c| *c *= m);
        }
        out
    }

    /// Copy truncated or zero-padded to `degree_max`.
    pub fn resized(&self, degree_max: usize) -> Self {
        let mut out = Self::zeros(degree_max);
        let n = sphere_len(degree_max.min(self.degree_max));
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    /// Largest absolute coefficient difference; missing degrees count as zero.
    pub fn max_abs_diff(&self, other: &SphereSpectrum) -> f64 {
        let k = self.degree_max.max(other.degree_max);
        let a = self.resized(k);
        let b = other.resized(k);
        a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    /// `‖self - other‖_{L²}`.
    pub fn l2_distance(&self, other: &SphereSpectrum) -> f64 {
        let k = self.degree_max.max(other.degree_max);
        let a = self.resized(k);
        let b = other.resized(k);
        a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { degree_max: self.degree_max, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &SphereSpectrum) -> Self {
        let k = self.degree_max.max(other.degree_max);
        let mut a = self.resized(k);
        let b = other.resized(k);
        a.coeffs.iter_mut().zip(&b.coeffs).for_each(|(x, y)| *x += y);
        a
    }

    /// Iterates `(k, i, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.coeffs.iter().enumerate().map(|(j, &c)| {
            let idx = HarmonicIndex::from_flat(j);
            (idx.k, idx.i, c)
        })
    }
}

/// Projects `f` onto the harmonics of degree `≤ degree_max` using a product
/// Gauss rule exact to degree `2·degree_max`.
pub fn project_sphere(f: impl Fn(&SpherePoint) -> f64 + Sync, degree_max: usize) -> Result<SphereSpectrum> {
    if degree_max > SPHERE_DEGREE_CAP {
        return Err(Error::DegreeTooHigh { requested: degree_max, cap: SPHERE_DEGREE_CAP });
    }
    let rule = SphereQuadrature::new(2 * degree_max);
    Ok(rule.project(f, degree_max))
}
