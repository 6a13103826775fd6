use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// A unit vector in R³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct SpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpherePoint {
    /// Normalizes `(x, y, z)`. The zero vector maps to the north pole.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        let n = (x * x + y * y + z * z).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Self::north();
        }
        Self { x: x / n, y: y / n, z: z / n }
    }

    pub fn north() -> Self {
        Self { x: 0.0, y: 0.0, z: 1.0 }
    }

    /// Colatitude `theta ∈ [0, π]`, longitude `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::new(st * cp, st * sp, ct)
    }

    pub fn theta(&self) -> f64 {
        self.z.clamp(-1.0, 1.0).acos()
    }

    pub fn phi(&self) -> f64 {
        let p = self.y.atan2(self.x);
        if p < 0.0 {
            p + std::f64::consts::TAU
        } else {
            p
        }
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &SpherePoint) -> Vector3<f64> {
        self.vector().cross(&other.vector())
    }

    /// Geodesic (great-circle) distance.
    pub fn distance(&self, other: &SpherePoint) -> f64 {
        // atan2 form is accurate for both tiny and near-antipodal separations.
        let c = self.cross(other).norm();
        c.atan2(self.dot(other))
    }

    pub fn antipode(&self) -> Self {
        Self { x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// An orthonormal pair `(u, v)` spanning the plane orthogonal to `self`,
    /// oriented so that `(u, v, self)` is right-handed.
    pub fn tangent_frame(&self) -> (Vector3<f64>, Vector3<f64>) {
        let p = self.vector();
        let a = if self.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let u = (a - p * a.dot(&p)).normalize();
        let v = p.cross(&u);
        (u, v)
    }
}

impl From<[f64; 3]> for SpherePoint {
    /// Unit vectors (to a few ulps) are kept as is, so serialization round
    /// trips exactly.
    fn from(a: [f64; 3]) -> Self {
        let n2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
        if (n2 - 1.0).abs() <= 8.0 * f64::EPSILON {
            Self { x: a[0], y: a[1], z: a[2] }
        } else {
            SpherePoint::new(a[0], a[1], a[2])
        }
    }
}

impl From<SpherePoint> for [f64; 3] {
    fn from(p: SpherePoint) -> Self {
        p.to_array()
    }
}
