use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::point::SpherePoint;

/// A rotation `g = Z(γ) X(β) Z(α)` in Euler angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct EulerRotation {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Rotation about the z-axis.
pub fn rot_z(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Rotation about the x-axis.
pub fn rot_x(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

/// Rotation about the y-axis.
pub fn rot_y(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

impl EulerRotation {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha: wrap(alpha), beta: beta.clamp(0.0, std::f64::consts::PI), gamma: wrap(gamma) }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        rot_z(self.gamma) * rot_x(self.beta) * rot_z(self.alpha)
    }

    /// Angles `(a, b, c)` with `g = Rz(a) Ry(b) Rz(c)`.
    pub fn zyz(&self) -> (f64, f64, f64) {
        (self.gamma - FRAC_PI_2, self.beta, self.alpha + FRAC_PI_2)
    }

    pub fn from_zyz(a: f64, b: f64, c: f64) -> Self {
        Self::new(c - FRAC_PI_2, b, a + FRAC_PI_2)
    }

    /// Inverse of [`matrix`](Self::matrix) for any proper rotation matrix.
    pub fn from_matrix(r: &Matrix3<f64>) -> Self {
        let sb = (r[(0, 2)].powi(2) + r[(1, 2)].powi(2)).sqrt();
        let b = sb.atan2(r[(2, 2)]);
        if sb > 1e-12 {
            let a = r[(1, 2)].atan2(r[(0, 2)]);
            let c = r[(2, 1)].atan2(-r[(2, 0)]);
            Self::from_zyz(a, b, c)
        } else if r[(2, 2)] > 0.0 {
            Self::from_zyz(r[(1, 0)].atan2(r[(0, 0)]), 0.0, 0.0)
        } else {
            Self::from_zyz((-r[(0, 1)]).atan2(r[(1, 1)]), std::f64::consts::PI, 0.0)
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &EulerRotation) -> Self {
        Self::from_matrix(&(self.matrix() * other.matrix()))
    }

    pub fn inverse(&self) -> Self {
        Self::from_matrix(&self.matrix().transpose())
    }

    pub fn apply(&self, p: &SpherePoint) -> SpherePoint {
        SpherePoint::from_vector(&(self.matrix() * p.vector()))
    }

    /// Rotation angle of `self · other⁻¹`, the bi-invariant geodesic distance.
    pub fn distance(&self, other: &EulerRotation) -> f64 {
        rotation_angle(&(self.matrix() * other.matrix().transpose()))
    }

    /// Unit quaternion `(w, x, y, z)` with `w ≥ 0`.
    pub fn quaternion(&self) -> [f64; 4] {
        matrix_to_quaternion(&self.matrix())
    }

    pub fn from_quaternion(q: [f64; 4]) -> Self {
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        let [w, x, y, z] = q.map(|v| v / n);
        let m = Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - z * w),
            2.0 * (x * z + y * w),
            2.0 * (x * y + z * w),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - x * w),
            2.0 * (x * z - y * w),
            2.0 * (y * z + x * w),
            1.0 - 2.0 * (x * x + y * y),
        );
        Self::from_matrix(&m)
    }

    /// A rotation taking the north pole to `p`.
    pub fn taking_north_to(p: &SpherePoint) -> Self {
        // Z(φ) Y(θ) takes e_z to (sinθ cosφ, sinθ sinφ, cosθ).
        Self::from_zyz(p.phi(), p.theta(), 0.0)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }
}

pub fn rotation_angle(r: &Matrix3<f64>) -> f64 {
    // atan2 of (|axis part|, cos part) is accurate near 0 and π
    let q = matrix_to_quaternion(r);
    let v = (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    2.0 * v.atan2(q[0].abs())
}

fn matrix_to_quaternion(r: &Matrix3<f64>) -> [f64; 4] {
    let tr = r[(0, 0)] + r[(1, 1)] + r[(2, 2)];
    let q = if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        [0.25 * s, (r[(2, 1)] - r[(1, 2)]) / s, (r[(0, 2)] - r[(2, 0)]) / s, (r[(1, 0)] - r[(0, 1)]) / s]
    } else if r[(0, 0)] > r[(1, 1)] && r[(0, 0)] > r[(2, 2)] {
        let s = (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt() * 2.0;
        [(r[(2, 1)] - r[(1, 2)]) / s, 0.25 * s, (r[(0, 1)] + r[(1, 0)]) / s, (r[(0, 2)] + r[(2, 0)]) / s]
    } else if r[(1, 1)] > r[(2, 2)] {
        let s = (1.0 + r[(1, 1)] - r[(0, 0)] - r[(2, 2)]).sqrt() * 2.0;
        [(r[(0, 2)] - r[(2, 0)]) / s, (r[(0, 1)] + r[(1, 0)]) / s, 0.25 * s, (r[(1, 2)] + r[(2, 1)]) / s]
    } else {
        let s = (1.0 + r[(2, 2)] - r[(0, 0)] - r[(1, 1)]).sqrt() * 2.0;
        [(r[(1, 0)] - r[(0, 1)]) / s, (r[(0, 2)] + r[(2, 0)]) / s, (r[(1, 2)] + r[(2, 1)]) / s, 0.25 * s]
    };
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let sign = if q[0] < 0.0 { -1.0 } else { 1.0 };
    q.map(|v| sign * v / n)
}

impl From<[f64; 3]> for EulerRotation {
    fn from(a: [f64; 3]) -> Self {
        EulerRotation::new(a[0], a[1], a[2])
    }
}

impl From<EulerRotation> for [f64; 3] {
    fn from(g: EulerRotation) -> Self {
        g.to_array()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples() -> Vec<EulerRotation> {
        vec![
            EulerRotation::new(0.3, 1.2, 5.0),
            EulerRotation::new(2.0, 0.0, 1.0),
            EulerRotation::new(4.0, std::f64::consts::PI, 0.5),
            EulerRotation::new(6.1, 2.9, 3.3),
        ]
    }

    #[test]
    fn matrix_is_special_orthogonal() {
        for g in samples() {
            let m = g.matrix();
            assert!((m.transpose() * m - Matrix3::identity()).norm() < 1e-12);
            assert!((m.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zyz_matches_zxz() {
        for g in samples() {
            let (a, b, c) = g.zyz();
            let m = rot_z(a) * rot_y(b) * rot_z(c);
            assert!((m - g.matrix()).norm() < 1e-12);
        }
    }

    #[test]
    fn matrix_round_trip() {
        for g in samples() {
            let h = EulerRotation::from_matrix(&g.matrix());
            assert!((h.matrix() - g.matrix()).norm() < 1e-10);
            let q = EulerRotation::from_quaternion(g.quaternion());
            assert!((q.matrix() - g.matrix()).norm() < 1e-10);
        }
    }

    #[test]
    fn distance_is_rotation_angle() {
        let g = EulerRotation::new(0.4, 0.9, 2.2);
        let h = EulerRotation::from_matrix(&(rot_x(0.7) * g.matrix()));
        assert!((g.distance(&h) - 0.7).abs() < 1e-12);
        assert!(g.distance(&g) < 1e-7);
    }

    #[test]
    fn north_pole_transport() {
        let p = SpherePoint::new(0.2, -0.7, 0.3);
        let g = EulerRotation::taking_north_to(&p);
        assert!(g.apply(&SpherePoint::north()).distance(&p) < 1e-12);
    }
}
