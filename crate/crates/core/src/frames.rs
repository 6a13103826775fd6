//! Bandlimited Parseval frames on S².
//!
//! A smooth `g` with `g = 1` on `[0, 1]` and `g = 0` on `[4, ∞)` yields the
//! windows `Φ_0(s)² = g(s)` and `Φ_j(s)² = g(4^{-j}s) − g(4^{1-j}s)`, which
//! telescope to `Σ_j Φ_j(s)² = 1`. Level `j` is supported on eigenvalues
//! `λ = k(k+1) ∈ (4^{j-1}, 4^{j+1})`.
//!
//! The frame members are `Ψ_{j,ν} = √b_{j,ν} · Φ_j(L)(x_{j,ν}, ·)`, where
//! `(x_{j,ν}, b_{j,ν})` is a positive cubature rule exact on `|Φ_j(L) f|²`,
//! i.e. to twice the level degree. Members are truncated to the atlas band;
//! for functions of that band the family is a Parseval frame.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;

use serde::{Deserialize, Serialize};

use crate::cubature::{calibrated_rho, discrete_spectrum, solve_weights, SphereRule};
use crate::harmonics::{eval_all, gauss_legendre, legendre_series, sphere_len, SpherePoint, SphereSpectrum};
use crate::lattice::{fibonacci, generate, SphereLattice};
use crate::par::{add_vec, fold_indexed};
use crate::{Error, Result};

/// Littlewood–Paley filter built from the bump `exp(−1/(u(1−u)))`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filter;

fn bump(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        (-1.0 / (u * (1.0 - u))).exp()
    }
}

fn bump_rule() -> &'static (Vec<f64>, Vec<f64>, f64) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>, f64)> = OnceLock::new();
    RULE.get_or_init(|| {
        let (x, w) = gauss_legendre(96);
        let total = x.iter().zip(&w).map(|(x, w)| w * bump((x + 1.0) / 2.0) / 2.0).sum();
        (x, w, total)
    })
}

/// `∫_0^u ψ / ∫_0^1 ψ`, smooth and increasing from 0 to 1.
fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    if u > 0.5 {
        return 1.0 - smooth_step(1.0 - u);
    }
    let (x, w, total) = bump_rule();
    let s: f64 = x.iter().zip(w).map(|(x, w)| w * bump(u * (x + 1.0) / 2.0)).sum();
    (s * u / 2.0 / total).clamp(0.0, 1.0)
}

impl Filter {
    pub fn new() -> Self {
        Filter
    }

    /// `g(s)`.
    pub fn g(&self, s: f64) -> f64 {
        if s <= 1.0 {
            1.0
        } else if s >= 4.0 {
            0.0
        } else {
            1.0 - smooth_step((s - 1.0) / 3.0)
        }
    }

    /// `G(s) = g(s) − g(4s)`.
    pub fn band(&self, s: f64) -> f64 {
        self.g(s) - self.g(4.0 * s)
    }

    /// `Φ_j(s)`.
    pub fn window(&self, j: usize, s: f64) -> f64 {
        if j == 0 {
            return self.g(s).sqrt();
        }
        let scale = 4f64.powi(-(j as i32));
        (self.g(scale * s) - self.g(4.0 * scale * s)).max(0.0).sqrt()
    }

    /// Largest degree with `Φ_j(λ_k) ≠ 0`.
    pub fn level_degree(&self, j: usize) -> usize {
        let top = 4f64.powi(j as i32 + 1);
        let mut k = 0;
        while (((k + 1) * (k + 2)) as f64) < top {
            k += 1;
        }
        k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameLevel {
    pub j: usize,
    /// Degree of the band-truncated members.
    pub degree: usize,
    pub rho: f64,
    pub rule: SphereRule,
    /// `Φ_j(k(k+1))` for `k ≤ degree`.
    pub window: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameAtlas {
    pub j_max: usize,
    pub band: usize,
    pub levels: Vec<FrameLevel>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AtlasOptions {
    pub seed: u64,
}

/// Smallest `J` with `K(K+1) ≤ 4^J`.
pub fn levels_for_band(band: usize) -> usize {
    let lam = (band * (band + 1)) as f64;
    let mut j = 0;
    while 4f64.powi(j as i32) < lam {
        j += 1;
    }
    j
}

pub fn build_atlas(j_max: usize, band: usize, filter: &Filter, opts: AtlasOptions) -> Result<FrameAtlas> {
    if ((band * (band + 1)) as f64) > 4f64.powi(j_max as i32) {
        return Err(Error::invalid(format!(
            "levels 0..={j_max} cover eigenvalues up to 4^{j_max}; band {band} needs J ≥ {}",
            levels_for_band(band)
        )));
    }
    let levels = (0..=j_max)
        .into_par_iter()
        .map(|j| {
            let degree = filter.level_degree(j).min(band);
            let rho = calibrated_rho(2 * degree)?;
            let lattice: SphereLattice = generate(rho, opts.seed.wrapping_add(j as u64))?;
            let rule = solve_weights(&lattice, 2 * degree).map_err(|e| Error::Infeasible(format!("level {j}: {e}")))?;
            let window = (0..=degree).map(|k| filter.window(j, (k * (k + 1)) as f64)).collect();
            Ok(FrameLevel { j, degree, rho, rule, window })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameAtlas { j_max, band, levels })
}

/// `⟨f, Ψ_{j,ν}⟩` grouped by level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameCoefficients {
    pub levels: Vec<Vec<f64>>,
}

impl FrameCoefficients {
    pub fn energy(&self) -> f64 {
        self.levels.iter().flatten().map(|c| c * c).sum()
    }
}

fn check_band(atlas: &FrameAtlas, spec: &SphereSpectrum) -> Result<()> {
    if spec.degree_max() > atlas.band {
        let above: f64 = spec.as_slice()[sphere_len(atlas.band)..].iter().map(|c| c * c).sum();
        if above > 0.0 {
            return Err(Error::NotInRange(format!(
                "spectrum has energy {above:.3e} above the atlas band {}",
                atlas.band
            )));
        }
    }
    Ok(())
}

/// `Φ_j(L) f` as a spectrum of degree `level.degree`.
fn filtered(level: &FrameLevel, spec: &SphereSpectrum) -> SphereSpectrum {
    spec.resized(level.degree).map_degrees(|k| level.window[k])
}

pub fn analyze(atlas: &FrameAtlas, spec: &SphereSpectrum) -> Result<FrameCoefficients> {
    check_band(atlas, spec)?;
    let levels = atlas
        .levels
        .iter()
        .map(|level| {
            let h = filtered(level, spec);
            level.rule.points.par_iter().zip(&level.rule.weights).map(|(p, b)| b.sqrt() * h.evaluate(p)).collect()
        })
        .collect();
    Ok(FrameCoefficients { levels })
}

pub fn synthesize(atlas: &FrameAtlas, coeffs: &FrameCoefficients) -> Result<SphereSpectrum> {
    if coeffs.levels.len() != atlas.levels.len() {
        return Err(Error::invalid("coefficient levels do not match the atlas"));
    }
    let mut out = SphereSpectrum::zeros(atlas.band);
    for (level, a) in atlas.levels.iter().zip(&coeffs.levels) {
        if a.len() != level.rule.len() {
            return Err(Error::invalid(format!("level {} expects {} coefficients", level.j, level.rule.len())));
        }
        let n = sphere_len(level.degree);
        let acc = fold_indexed(
            level.rule.len(),
            || vec![0.0; n],
            |acc, i| {
                let y = eval_all(level.degree, &level.rule.points[i]);
                let s = level.rule.weights[i].sqrt() * a[i];
                acc.iter_mut().zip(&y).for_each(|(x, y)| *x += s * y);
            },
            |x, y| add_vec(x, y),
        );
        let level_spec = SphereSpectrum::from_flat(level.degree, acc)?.map_degrees(|k| level.window[k]);
        out = out.add(&level_spec);
    }
    Ok(out)
}

/// Spectrum of the member `Ψ_{j,ν}`.
pub fn member(atlas: &FrameAtlas, j: usize, nu: usize) -> Result<SphereSpectrum> {
    let level = atlas.levels.get(j).ok_or_else(|| Error::IndexOutOfRange(format!("level {j}")))?;
    let p = level.rule.points.get(nu).ok_or_else(|| Error::IndexOutOfRange(format!("member {nu} of level {j}")))?;
    let b = level.rule.weights[nu];
    let y = eval_all(level.degree, p);
    Ok(SphereSpectrum::from_flat(level.degree, y)?.map_degrees(|k| b.sqrt() * level.window[k]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRow {
    pub n: u32,
    /// `max_x |ψ(x)| · max(1, 2^j d(x, x_{j,ν}))^N / 4^j`.
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub j: usize,
    pub center: SpherePoint,
    pub rho: f64,
    pub peak: f64,
    /// Whether the peak value sits at the center.
    pub peak_at_center: bool,
    /// `max |ψ(x)|` over `d(x, center) ≥ 4ρ_j`.
    pub far_max: f64,
    pub rows: Vec<LocalizationRow>,
}

impl LocalizationReport {
    /// Ratio `peak / far_max`.
    pub fn decay_factor(&self) -> f64 {
        self.peak / self.far_max
    }
}

/// Untruncated level kernel `ψ_{j,x}(y) = Σ_k Φ_j(λ_k) (2k+1)/(4π) P_k(x·y)`
/// sampled on a test grid.
pub fn localization_report(
    atlas: &FrameAtlas,
    filter: &Filter,
    j: usize,
    nu: usize,
    exponents: &[u32],
    grid: usize,
) -> Result<LocalizationReport> {
    let level = atlas.levels.get(j).ok_or_else(|| Error::IndexOutOfRange(format!("level {j}")))?;
    let center = *level.rule.points.get(nu).ok_or_else(|| Error::IndexOutOfRange(format!("member {nu}")))?;
    let kmax = filter.level_degree(j);
    let coeffs: Vec<f64> =
        (0..=kmax).map(|k| filter.window(j, (k * (k + 1)) as f64) * (2 * k + 1) as f64 / (4.0 * PI)).collect();
    let peak = legendre_series(&coeffs, 1.0).abs();
    let samples: Vec<(f64, f64)> = fibonacci(grid)
        .par_iter()
        .map(|p| {
            let d = center.distance(p);
            (d, legendre_series(&coeffs, center.dot(p)).abs())
        })
        .collect();
    let grid_max = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let scale = 2f64.powi(j as i32);
    let far_max = samples.iter().filter(|s| s.0 >= 4.0 * level.rho).map(|s| s.1).fold(0.0, f64::max);
    let rows = exponents
        .iter()
        .map(|&n| LocalizationRow {
            n,
            constant: samples
                .iter()
                .map(|(d, v)| v * (scale * d).max(1.0).powi(n as i32) / (scale * scale))
                .fold(peak / (scale * scale), f64::max),
        })
        .collect();
    Ok(LocalizationReport { j, center, rho: level.rho, peak, peak_at_center: grid_max <= peak, far_max, rows })
}

/// `f = Σ_j Σ_ν ⟨f, Ψ_{j,ν}⟩ Ψ_{j,ν}` with the inner products computed from
/// samples of `f` on a rule exact to `2·band`.
pub fn discrete_frame_representation(atlas: &FrameAtlas, rule: &SphereRule, samples: &[f64]) -> Result<SphereSpectrum> {
    let spec = discrete_spectrum(rule, samples, atlas.band)?;
    let coeffs = analyze(atlas, &spec)?;
    synthesize(atlas, &coeffs)
}
