//! Representation matrices of SO(3) in the real harmonic basis, and SO(3)
//! spectra.
//!
//! `T^k(g)` is the matrix of `f ↦ f(g⁻¹ ·)` on the degree-`k` harmonics, so
//! `T^k_{ij}(g) = ⟨T(g) Y_k^j, Y_k^i⟩`. These are real orthogonal matrices
//! because the harmonic basis is real. They are obtained from the complex
//! Wigner matrices `D^k(a,b,c) = e^{-im'a} d^k_{m'm}(b) e^{-imc}` by the
//! complex-to-real change of basis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::rotation::EulerRotation;
use crate::{Error, Result};

/// Default working degree cap on SO(3).
pub const DEFAULT_SO3_DEGREE: usize = 32;

fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Jacobi polynomial `P_n^{(a,b)}(x)` by its three-term recurrence.
pub fn jacobi(n: usize, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p0 = 1.0;
    let mut p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + a + b;
        let a1 = 2.0 * k * (k + a + b) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * x + a * a - b * b);
        let a3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
        let p2 = (a2 * p1 - a3 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Wigner small-d element `d^k_{m'm}(β)`.
pub fn little_d_element(k: usize, mp: i64, m: i64, beta: f64) -> f64 {
    let (p, q, sign) = if m >= mp.abs() {
        (mp, m, 1.0)
    } else if mp >= m.abs() {
        (m, mp, parity(m - mp))
    } else if -m >= mp.abs() {
        (-mp, -m, parity(m - mp))
    } else {
        (-m, -mp, 1.0)
    };
    // now q ≥ |p|
    let j = k as i64;
    let a = (q - p) as usize;
    let b = (q + p) as usize;
    let n = (j - q) as usize;
    let ln_pref = 0.5
        * (ln_factorial((j + q) as usize) + ln_factorial((j - q) as usize)
            - ln_factorial((j + p) as usize)
            - ln_factorial((j - p) as usize));
    let (s, c) = (beta / 2.0).sin_cos();
    sign * ln_pref.exp() * s.powi(a as i32) * c.powi(b as i32) * jacobi(n, a as f64, b as f64, beta.cos())
}

fn parity(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The `(2k+1) × (2k+1)` matrix `d^k(β)`, indexed by `(m' + k, m + k)`.
pub fn little_d(k: usize, beta: f64) -> DMatrix<f64> {
    let n = 2 * k + 1;
    let kk = k as i64;
    DMatrix::from_fn(n, n, |r, c| little_d_element(k, r as i64 - kk, c as i64 - kk, beta))
}

/// Complex Wigner matrix for `g = Rz(a) Ry(b) Rz(c)` acting on complex
/// Condon–Shortley harmonics.
pub fn wigner_d_complex(k: usize, g: &EulerRotation) -> DMatrix<Complex64> {
    let (a, b, c) = g.zyz();
    let d = little_d(k, b);
    let kk = k as i64;
    DMatrix::from_fn(2 * k + 1, 2 * k + 1, |r, col| {
        let mp = (r as i64 - kk) as f64;
        let m = (col as i64 - kk) as f64;
        Complex64::from_polar(1.0, -(mp * a + m * c)) * d[(r, col)]
    })
}

/// Unitary change of basis with `Y^real_r = Σ_c U_{rc} Y^complex_c`.
pub fn complex_to_real(k: usize) -> DMatrix<Complex64> {
    let n = 2 * k + 1;
    let kk = k as i64;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    u[(k, k)] = Complex64::new(1.0, 0.0);
    for mu in 1..=kk {
        let s = parity(mu);
        let pos = (mu + kk) as usize;
        let neg = (kk - mu) as usize;
        u[(pos, neg)] = Complex64::new(h, 0.0);
        u[(pos, pos)] = Complex64::new(s * h, 0.0);
        u[(neg, neg)] = Complex64::new(0.0, h);
        u[(neg, pos)] = Complex64::new(0.0, -s * h);
    }
    u
}

/// `T^k(g)` in the real harmonic basis.
pub fn representation(k: usize, g: &EulerRotation) -> DMatrix<f64> {
    let u = complex_to_real(k);
    let d = wigner_d_complex(k, g);
    let m = u.conjugate() * d * u.transpose();
    m.map(|z| z.re)
}

/// `[T^0(g), …, T^kmax(g)]`.
pub fn representations(kmax: usize, g: &EulerRotation) -> Vec<DMatrix<f64>> {
    (0..=kmax).map(|k| representation(k, g)).collect()
}

/// Single coefficient `T^k_{ij}(g)`, 1-based `i, j`.
///
/// The value is real; see the module documentation.
pub fn wigner_coeff(k: usize, i: usize, j: usize, g: &EulerRotation) -> Result<f64> {
    if i == 0 || j == 0 || i > 2 * k + 1 || j > 2 * k + 1 {
        return Err(Error::IndexOutOfRange(format!("({i}, {j}) for degree {k}")));
    }
    Ok(representation(k, g)[(i - 1, j - 1)])
}

/// Coefficients `f̂(k)_{ij} = ⟨f, T^k_{ij}⟩` of a function on SO(3), so that
/// `f = Σ_k (2k+1) Σ_{ij} f̂(k)_{ij} T^k_{ij}`.
#[derive(Debug, Clone, PartialEq)]
pub struct So3Spectrum {
    blocks: Vec<DMatrix<Complex64>>,
}

impl So3Spectrum {
    pub fn zeros(degree_max: usize) -> Self {
        Self {
            blocks: (0..=degree_max)
                .map(|k| DMatrix::from_element(2 * k + 1, 2 * k + 1, Complex64::new(0.0, 0.0)))
                .collect(),
        }
    }

    pub fn from_blocks(blocks: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("SO(3) spectrum needs at least the k = 0 block"));
        }
        for (k, b) in blocks.iter().enumerate() {
            if b.nrows() != 2 * k + 1 || b.ncols() != 2 * k + 1 {
                return Err(Error::invalid(format!("block {k} has shape {}x{}", b.nrows(), b.ncols())));
            }
        }
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

    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    pub fn evaluate(&self, g: &EulerRotation) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, b) in self.blocks.iter().enumerate() {
            let t = representation(k, g);
            let s: Complex64 = b.iter().zip(t.iter()).map(|(c, r)| c * *r).sum();
            acc += s * (2 * k + 1) as f64;
        }
        acc
    }

    /// `‖f‖²` under the Haar probability measure.
    pub fn norm_squared(&self) -> f64 {
        self.blocks.iter().enumerate().map(|(k, b)| (2 * k + 1) as f64 * b.norm_squared()).sum()
    }

    pub fn resized(&self, degree_max: usize) -> Self {
        let mut out = Self::zeros(degree_max);
        for k in 0..=degree_max.min(self.degree_max()) {
            out.blocks[k].copy_from(&self.blocks[k]);
        }
        out
    }

    pub fn add(&self, other: &So3Spectrum) -> Self {
        let k = self.degree_max().max(other.degree_max());
        let mut a = self.resized(k);
        for (j, b) in other.blocks.iter().enumerate() {
            a.blocks[j] += b;
        }
        a
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { blocks: self.blocks.iter().map(|b| b * Complex64::new(s, 0.0)).collect() }
    }

    pub fn max_abs_diff(&self, other: &So3Spectrum) -> f64 {
        let k = self.degree_max().max(other.degree_max());
        let (a, b) = (self.resized(k), other.resized(k));
        a.blocks
            .iter()
            .zip(&b.blocks)
            .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(u, v)| (u - v).norm()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    /// `‖self - other‖_{L²(SO(3))}`.
    pub fn l2_distance(&self, other: &So3Spectrum) -> f64 {
        let k = self.degree_max().max(other.degree_max());
        let diff = self.resized(k).add(&other.resized(k).scaled(-1.0));
        diff.norm_squared().sqrt()
    }
}

/// Projects `f` onto representation coefficients of degree `≤ degree_max`
/// with a product rule exact to degree `2·degree_max`.
pub fn project_so3(f: impl Fn(&EulerRotation) -> Complex64 + Sync, degree_max: usize) -> Result<So3Spectrum> {
    if degree_max > 4 * DEFAULT_SO3_DEGREE {
        return Err(Error::DegreeTooHigh { requested: degree_max, cap: 4 * DEFAULT_SO3_DEGREE });
    }
    Ok(super::quadrature::So3Quadrature::new(2 * degree_max).project(f, degree_max))
}
