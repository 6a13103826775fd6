//! ρ-lattices: finite point sets whose ρ/2-balls are disjoint and whose
//! ρ-balls cover the space.
//!
//! Lattices are built greedily from a quasi-uniform candidate stream: a
//! candidate is admitted when it lies at distance `> ρ` from every admitted
//! point. After the stream is exhausted every candidate is within `ρ` of the
//! lattice. The verification grid is appended to the stream, so a generated
//! lattice always passes its own verification.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::harmonics::{rot_z, EulerRotation, SpherePoint};
use crate::{Error, Result};

/// Default number of covering-radius test points.
pub const DEFAULT_GRID: usize = 20_000;
/// Smallest admissible verification grid.
pub const MIN_GRID: usize = 10_000;
/// Default cap on the number of lattice points.
pub const DEFAULT_POINT_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    #[serde(rename = "s2")]
    S2,
    #[serde(rename = "so3")]
    So3,
    #[serde(rename = "s2xs2")]
    S2xS2,
}

impl Space {
    pub fn diameter(self) -> f64 {
        match self {
            Space::S2 | Space::So3 => PI,
            Space::S2xS2 => PI * std::f64::consts::SQRT_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Space::S2 => "s2",
            Space::So3 => "so3",
            Space::S2xS2 => "s2xs2",
        }
    }
}

impl std::str::FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s2" => Ok(Space::S2),
            "so3" => Ok(Space::So3),
            "s2xs2" => Ok(Space::S2xS2),
            _ => Err(Error::invalid(format!("unknown space {s:?}"))),
        }
    }
}

/// A pair of points on S² × S² with the product metric
/// `d² = d(x, x')² + d(y, y')²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePair(pub SpherePoint, pub SpherePoint);

/// Points of a space that lattices can be built on.
pub trait MetricPoint: Clone + Send + Sync + Serialize + for<'de> Deserialize<'de> {
    const SPACE: Space;
    /// Number of used coordinates of [`embed`](Self::embed).
    const DIM: usize;
    /// `|embed(a) - embed(b)| ≤ LIPSCHITZ · distance(a, b)` for one of the
    /// embeddings of `b`.
    const LIPSCHITZ: f64;

    fn distance(&self, other: &Self) -> f64;
    /// Euclidean images. Points with a sign ambiguity have two.
    fn embed(&self) -> Vec<[f64; 6]>;
    /// Normalized volume of a geodesic ball of radius `r`.
    fn ball_fraction(r: f64) -> f64;
    fn candidates(count: usize, rng: &mut ChaCha8Rng) -> Vec<Self>;
    /// Deterministic, roughly uniform test points.
    fn test_grid(count: usize) -> Vec<Self>;
}

impl MetricPoint for SpherePoint {
    const SPACE: Space = Space::S2;
    const DIM: usize = 3;
    const LIPSCHITZ: f64 = 1.0;

    fn distance(&self, other: &Self) -> f64 {
        SpherePoint::distance(self, other)
    }

    fn embed(&self) -> Vec<[f64; 6]> {
        vec![[self.x, self.y, self.z, 0.0, 0.0, 0.0]]
    }

    fn ball_fraction(r: f64) -> f64 {
        (1.0 - r.min(PI).cos()) / 2.0
    }

    fn candidates(count: usize, rng: &mut ChaCha8Rng) -> Vec<Self> {
        let g = EulerRotation::new(rng.random::<f64>() * TAU, rng.random::<f64>() * PI, rng.random::<f64>() * TAU);
        fibonacci(count).iter().map(|p| g.apply(p)).collect()
    }

    fn test_grid(count: usize) -> Vec<Self> {
        fibonacci(count)
    }
}

impl MetricPoint for EulerRotation {
    const SPACE: Space = Space::So3;
    const DIM: usize = 4;
    const LIPSCHITZ: f64 = 0.5;

    fn distance(&self, other: &Self) -> f64 {
        EulerRotation::distance(self, other)
    }

    fn embed(&self) -> Vec<[f64; 6]> {
        let [w, x, y, z] = self.quaternion();
        vec![[w, x, y, z, 0.0, 0.0], [-w, -x, -y, -z, 0.0, 0.0]]
    }

    fn ball_fraction(r: f64) -> f64 {
        let r = r.min(PI);
        (r - r.sin()) / PI
    }

    fn candidates(count: usize, rng: &mut ChaCha8Rng) -> Vec<Self> {
        let shift: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        (1..=count)
            .map(|n| {
                let u = [2, 3, 5].map(|b| radical_inverse(n as u64, b));
                shoemake([(u[0] + shift[0]).fract(), (u[1] + shift[1]).fract(), (u[2] + shift[2]).fract()])
            })
            .collect()
    }

    fn test_grid(count: usize) -> Vec<Self> {
        (1..=count).map(|n| shoemake([7, 11, 13].map(|b| radical_inverse(n as u64, b)))).collect()
    }
}

impl MetricPoint for SpherePair {
    const SPACE: Space = Space::S2xS2;
    const DIM: usize = 6;
    const LIPSCHITZ: f64 = 1.0;

    fn distance(&self, other: &Self) -> f64 {
        self.0.distance(&other.0).hypot(self.1.distance(&other.1))
    }

    fn embed(&self) -> Vec<[f64; 6]> {
        let (a, b) = (self.0, self.1);
        vec![[a.x, a.y, a.z, b.x, b.y, b.z]]
    }

    fn ball_fraction(r: f64) -> f64 {
        // small-ball volume π²r⁴/2 over the total (4π)²
        (PI * PI * r.powi(4) / 2.0 / (16.0 * PI * PI)).min(1.0)
    }

    fn candidates(count: usize, rng: &mut ChaCha8Rng) -> Vec<Self> {
        let shift: [f64; 4] = [rng.random(), rng.random(), rng.random(), rng.random()];
        (1..=count)
            .map(|n| {
                let u = [2, 3, 5, 7].map(|b| radical_inverse(n as u64, b));
                let u: Vec<f64> = u.iter().zip(shift).map(|(a, s)| (a + s).fract()).collect();
                SpherePair(uniform_sphere(u[0], u[1]), uniform_sphere(u[2], u[3]))
            })
            .collect()
    }

    fn test_grid(count: usize) -> Vec<Self> {
        let side = (count as f64).sqrt().ceil() as usize;
        let f = fibonacci(side);
        let g: Vec<SpherePoint> = f.iter().map(|p| SpherePoint::from_vector(&(rot_z(1.0) * p.vector()))).collect();
        f.iter().flat_map(|a| g.iter().map(move |b| SpherePair(*a, *b))).collect()
    }
}

/// `n` points of the Fibonacci spiral.
pub fn fibonacci(n: usize) -> Vec<SpherePoint> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            SpherePoint::from_angles(z.acos(), golden * i as f64)
        })
        .collect()
}

fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while n > 0 {
        out += (n % base) as f64 * inv;
        n /= base;
        inv /= base as f64;
    }
    out
}

fn uniform_sphere(u: f64, v: f64) -> SpherePoint {
    SpherePoint::from_angles((1.0 - 2.0 * u).clamp(-1.0, 1.0).acos(), TAU * v)
}

/// Haar-uniform rotation from three uniforms.
fn shoemake(u: [f64; 3]) -> EulerRotation {
    let (a, b) = ((1.0 - u[0]).sqrt(), u[0].sqrt());
    let (s1, c1) = (TAU * u[1]).sin_cos();
    let (s2, c2) = (TAU * u[2]).sin_cos();
    EulerRotation::from_quaternion([b * c2, a * s1, a * c1, b * s2])
}

/// Uniform bucket grid over the embedding, cell side `h`.
struct Buckets {
    h: f64,
    dim: usize,
    cells: HashMap<[i64; 6], Vec<usize>>,
}

impl Buckets {
    fn new(h: f64, dim: usize) -> Self {
        Self { h, dim, cells: HashMap::new() }
    }

    fn key(&self, e: &[f64; 6]) -> [i64; 6] {
        let mut k = [0i64; 6];
        for d in 0..self.dim {
            k[d] = (e[d] / self.h).floor() as i64;
        }
        k
    }

    fn insert(&mut self, e: &[f64; 6], id: usize) {
        let k = self.key(e);
        self.cells.entry(k).or_default().push(id);
    }

    /// Ids in the 3^dim cells around `e`.
    fn near(&self, e: &[f64; 6], mut visit: impl FnMut(usize) -> bool) {
        let base = self.key(e);
        let total = 3usize.pow(self.dim as u32);
        for code in 0..total {
            let mut k = base;
            let mut c = code;
            for slot in k.iter_mut().take(self.dim) {
                *slot += (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(ids) = self.cells.get(&k) {
                for &id in ids {
                    if !visit(id) {
                        return;
                    }
                }
            }
        }
    }
}

/// Packing/covering diagnostics of a lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeReport {
    /// `None` for fewer than two points.
    pub min_pairwise: Option<f64>,
    pub covering_radius: f64,
    pub grid_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "P: MetricPoint")]
pub struct Lattice<P: MetricPoint> {
    pub space: Space,
    pub rho: f64,
    pub points: Vec<P>,
    pub report: Option<LatticeReport>,
}

pub type SphereLattice = Lattice<SpherePoint>;
pub type So3Lattice = Lattice<EulerRotation>;
pub type ProductLattice = Lattice<SpherePair>;

/// Generation knobs.
#[derive(Debug, Clone, Copy)]
pub struct GenerateOptions {
    pub grid: usize,
    pub point_cap: usize,
    /// Candidates per point of the packing bound.
    pub oversampling: f64,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self { grid: DEFAULT_GRID, point_cap: DEFAULT_POINT_CAP, oversampling: 30.0 }
    }
}

/// Greedy maximal ρ-separated set with default options.
pub fn generate<P: MetricPoint>(rho: f64, seed: u64) -> Result<Lattice<P>> {
    generate_with(rho, seed, GenerateOptions::default())
}

pub fn generate_with<P: MetricPoint>(rho: f64, seed: u64, opts: GenerateOptions) -> Result<Lattice<P>> {
    let diam = P::SPACE.diameter();
    if !(rho > 0.0 && rho <= diam) {
        return Err(Error::invalid(format!("rho must lie in (0, {diam}], got {rho}")));
    }
    if opts.grid < MIN_GRID {
        return Err(Error::invalid(format!("verification grid needs at least {MIN_GRID} points")));
    }
    let packing = (1.0 / P::ball_fraction(rho / 2.0)).ceil();
    if packing > opts.point_cap as f64 {
        return Err(Error::invalid(format!(
            "rho = {rho} allows up to {packing} points, above the cap {}",
            opts.point_cap
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_cand = ((packing * opts.oversampling) as usize).clamp(64, 4_000_000);
    let mut stream = P::candidates(n_cand, &mut rng);
    let grid = P::test_grid(opts.grid);
    stream.extend(grid.iter().cloned());

    let mut buckets = Buckets::new((P::LIPSCHITZ * rho).max(1e-9), P::DIM);
    let mut points: Vec<P> = Vec::new();
    for c in stream {
        let mut ok = true;
        for e in c.embed().iter().take(1) {
            buckets.near(e, |id| {
                ok = points[id].distance(&c) > rho;
                ok
            });
        }
        if ok {
            for e in c.embed() {
                buckets.insert(&e, points.len());
            }
            points.push(c);
        }
    }
    let mut lattice = Lattice { space: P::SPACE, rho, points, report: None };
    lattice.report = Some(measure_on(&lattice, &grid));
    Ok(lattice)
}

/// Exact min pairwise distance and grid covering radius, without judging.
pub fn measure<P: MetricPoint>(lattice: &Lattice<P>, grid_density: usize) -> LatticeReport {
    measure_on(lattice, &P::test_grid(grid_density))
}

fn measure_on<P: MetricPoint>(lattice: &Lattice<P>, grid: &[P]) -> LatticeReport {
    let pts = &lattice.points;
    let min_pairwise = (pts.len() >= 2).then(|| {
        (0..pts.len())
            .into_par_iter()
            .map(|i| pts[i + 1..].iter().map(|q| pts[i].distance(q)).fold(f64::INFINITY, f64::min))
            .reduce(|| f64::INFINITY, f64::min)
    });
    let covering_radius = covering(pts, grid, lattice.rho);
    LatticeReport { min_pairwise, covering_radius, grid_size: grid.len() }
}

fn covering<P: MetricPoint>(pts: &[P], grid: &[P], rho: f64) -> f64 {
    if pts.is_empty() {
        return f64::INFINITY;
    }
    let mut buckets = Buckets::new((P::LIPSCHITZ * rho).max(1e-9), P::DIM);
    for (i, p) in pts.iter().enumerate() {
        for e in p.embed() {
            buckets.insert(&e, i);
        }
    }
    grid.par_iter()
        .map(|g| {
            let mut best = f64::INFINITY;
            buckets.near(&g.embed()[0], |id| {
                best = best.min(pts[id].distance(g));
                true
            });
            if best > rho {
                // nothing within ρ nearby: fall back to the exact scan
                best = pts.iter().map(|p| p.distance(g)).fold(f64::INFINITY, f64::min);
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Checks disjointness of the ρ/2-balls and covering by the ρ-balls.
pub fn verify<P: MetricPoint>(lattice: &Lattice<P>, grid_density: usize) -> Result<LatticeReport> {
    if grid_density < MIN_GRID {
        return Err(Error::invalid(format!("verification grid needs at least {MIN_GRID} points")));
    }
    let report = measure(lattice, grid_density);
    let rho = lattice.rho;
    let mut problems = Vec::new();
    if let Some(m) = report.min_pairwise {
        if m <= rho {
            let pts = &lattice.points;
            let mut pairs = Vec::new();
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    let d = pts[i].distance(&pts[j]);
                    if d <= rho && pairs.len() < 10 {
                        pairs.push(format!("({i},{j}) at {d:.3e}"));
                    }
                }
            }
            problems.push(format!("min pairwise {m:.6} ≤ rho {rho}; pairs {}", pairs.join(", ")));
        }
    }
    if report.covering_radius > rho {
        problems.push(format!("covering radius {:.6} > rho {rho}", report.covering_radius));
    }
    if problems.is_empty() {
        Ok(report)
    } else {
        Err(Error::LatticeViolation(problems.join("; ")))
    }
}

/// A great circle `{x : x·pole = 0}` with a uniform arc-length rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreatCircle {
    pub pole: SpherePoint,
    pub quadrature: Vec<(SpherePoint, f64)>,
}

impl GreatCircle {
    pub fn integrate(&self, f: impl Fn(&SpherePoint) -> f64) -> f64 {
        self.quadrature.iter().map(|(p, w)| w * f(p)).sum()
    }
}

/// Great circle with pole `p`, `n_nodes` equispaced nodes of weight `2π/n`.
/// Exact on restrictions of degree-`K` polynomials when `n_nodes > 2K`.
pub fn dual_circle(p: &SpherePoint, n_nodes: usize) -> Result<GreatCircle> {
    if n_nodes < 2 {
        return Err(Error::invalid("a great-circle rule needs at least two nodes"));
    }
    let (u, v) = p.tangent_frame();
    let w = TAU / n_nodes as f64;
    let quadrature = (0..n_nodes)
        .map(|j| {
            let (s, c) = (w * j as f64).sin_cos();
            (SpherePoint::from_vector(&(u * c + v * s)), w)
        })
        .collect();
    Ok(GreatCircle { pole: *p, quadrature })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert_eq!(radical_inverse(6, 2), 0.375);
    }

    #[test]
    fn quaternion_embedding_is_half_lipschitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = EulerRotation::candidates(200, &mut rng);
        for a in &g[..20] {
            for b in &g[20..] {
                let ea = &a.embed()[0];
                let chord = b
                    .embed()
                    .iter()
                    .map(|e| (0..4).map(|d| (e[d] - ea[d]).powi(2)).sum::<f64>().sqrt())
                    .fold(f64::INFINITY, f64::min);
                assert!(chord <= 0.5 * a.distance(b) + 1e-12);
            }
        }
    }

    #[test]
    fn fibonacci_is_on_the_sphere() {
        for p in fibonacci(100) {
            assert!((p.dot(&p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_nodes_are_orthogonal_to_pole() {
        let p = SpherePoint::new(0.3, -0.2, 0.9);
        let c = dual_circle(&p, 17).unwrap();
        assert!(c.quadrature.iter().all(|(q, _)| q.dot(&p).abs() < 1e-12));
        assert!((c.quadrature.iter().map(|(_, w)| w).sum::<f64>() - TAU).abs() < 1e-12);
        assert!(dual_circle(&p, 1).is_err());
    }
}
