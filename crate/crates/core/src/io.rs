//! File formats.
//!
//! Structured data is JSON, tables are CSV. Writes go to a temporary file in
//! the target directory and are renamed into place.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::harmonics::{sphere_len, HarmonicIndex, So3Spectrum, SpherePoint, SphereSpectrum};
use crate::lattice::SpherePair;
use crate::radon_so3::ProductSpectrum;
use crate::splines::{Functional, SobolevNorms, SolveStrategy, Spline};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub k: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Any spectrum file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space")]
pub enum SpectrumJson {
    #[serde(rename = "s2")]
    S2 { degree_max: usize, coeffs: Vec<(usize, usize, f64)> },
    #[serde(rename = "so3")]
    So3 { degree_max: usize, blocks: Vec<BlockJson> },
    /// Degree-diagonal spectrum on S² × S² (image of the SO(3) Radon transform).
    #[serde(rename = "s2xs2")]
    S2xS2 { degree_max: usize, blocks: Vec<BlockJson> },
}

fn block_json(k: usize, b: &DMatrix<Complex64>) -> BlockJson {
    let rows =
        |f: fn(&Complex64) -> f64| (0..b.nrows()).map(|i| (0..b.ncols()).map(|j| f(&b[(i, j)])).collect()).collect();
    BlockJson { k, re: rows(|z| z.re), im: rows(|z| z.im) }
}

fn blocks_from_json(degree_max: usize, blocks: &[BlockJson]) -> Result<Vec<DMatrix<Complex64>>> {
    let mut out: Vec<DMatrix<Complex64>> =
        (0..=degree_max).map(|k| DMatrix::from_element(2 * k + 1, 2 * k + 1, Complex64::new(0.0, 0.0))).collect();
    for b in blocks {
        let d = 2 * b.k + 1;
        if b.k > degree_max || b.re.len() != d || b.im.len() != d {
            return Err(Error::Format(format!("block k = {} has the wrong shape", b.k)));
        }
        for i in 0..d {
            if b.re[i].len() != d || b.im[i].len() != d {
                return Err(Error::Format(format!("block k = {} row {i} has the wrong length", b.k)));
            }
            for j in 0..d {
                out[b.k][(i, j)] = Complex64::new(b.re[i][j], b.im[i][j]);
            }
        }
    }
    Ok(out)
}

impl From<&SphereSpectrum> for SpectrumJson {
    fn from(s: &SphereSpectrum) -> Self {
        SpectrumJson::S2 { degree_max: s.degree_max(), coeffs: s.iter().collect() }
    }
}

impl From<&So3Spectrum> for SpectrumJson {
    fn from(s: &So3Spectrum) -> Self {
        SpectrumJson::So3 {
            degree_max: s.degree_max(),
            blocks: s.blocks().iter().enumerate().map(|(k, b)| block_json(k, b)).collect(),
        }
    }
}

impl From<&ProductSpectrum> for SpectrumJson {
    fn from(s: &ProductSpectrum) -> Self {
        SpectrumJson::S2xS2 {
            degree_max: s.degree_max(),
            blocks: (0..=s.degree_max()).map(|k| block_json(k, s.block(k))).collect(),
        }
    }
}

impl SpectrumJson {
    pub fn to_sphere(&self) -> Result<SphereSpectrum> {
        match self {
            SpectrumJson::S2 { degree_max, coeffs } => {
                let mut flat = vec![0.0; sphere_len(*degree_max)];
                for &(k, i, v) in coeffs {
                    if k > *degree_max {
                        return Err(Error::Format(format!("degree {k} above degree_max {degree_max}")));
                    }
                    flat[HarmonicIndex::new(k, i)?.flat()] = v;
                }
                SphereSpectrum::from_flat(*degree_max, flat)
            }
            _ => Err(Error::Format("expected an s2 spectrum".into())),
        }
    }

    pub fn to_so3(&self) -> Result<So3Spectrum> {
        match self {
            SpectrumJson::So3 { degree_max, blocks } => {
                So3Spectrum::from_blocks(blocks_from_json(*degree_max, blocks)?)
            }
            _ => Err(Error::Format("expected an so3 spectrum".into())),
        }
    }

    pub fn to_product(&self) -> Result<ProductSpectrum> {
        match self {
            SpectrumJson::S2xS2 { degree_max, blocks } => {
                ProductSpectrum::from_blocks(blocks_from_json(*degree_max, blocks)?)
            }
            _ => Err(Error::Format("expected an s2xs2 spectrum".into())),
        }
    }
}

/// Serialized spline: problem, dual coefficients and spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineJson {
    pub t: f64,
    pub degree_max: usize,
    pub tail_bound: f64,
    pub strategy: SolveStrategy,
    pub functionals: Vec<Functional>,
    pub values: Vec<f64>,
    pub alpha: Vec<f64>,
    pub interpolation_residual: f64,
    pub norm: Option<SobolevNorms>,
    /// Absent for S² × S² splines, which have no spectrum file format.
    pub spectrum: Option<SpectrumJson>,
}

impl From<&Spline> for SplineJson {
    fn from(s: &Spline) -> Self {
        use crate::splines::SplineSpectrum;
        let spectrum = match &s.spectrum {
            SplineSpectrum::Sphere(x) => Some(x.into()),
            SplineSpectrum::So3(x) => Some(x.into()),
            SplineSpectrum::Product(_) => None,
        };
        SplineJson {
            t: s.problem.t(),
            degree_max: s.problem.degree_max(),
            tail_bound: s.problem.tail_bound(),
            strategy: s.strategy,
            functionals: s.problem.functionals().to_vec(),
            values: s.values.clone(),
            alpha: s.alpha.clone(),
            interpolation_residual: s.interpolation_residual,
            norm: s.sobolev_norm().ok(),
            spectrum,
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

fn csv_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(csv_error)
}

fn csv_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::Csv(e.to_string())
    }
}

fn check_header(rdr: &mut csv::Reader<std::fs::File>, want: &[&str]) -> Result<()> {
    let h = rdr.headers().map_err(csv_error)?;
    let got: Vec<&str> = h.iter().collect();
    if got != want {
        return Err(Error::Csv(format!("expected header {}, found {}", want.join(","), got.join(","))));
    }
    Ok(())
}

fn rows<const N: usize>(path: &Path, header: &[&str]) -> Result<Vec<[f64; N]>> {
    let mut rdr = csv_reader(path)?;
    check_header(&mut rdr, header)?;
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        if rec.len() != N {
            return Err(Error::Csv(format!("row {} has {} fields, expected {N}", line + 2, rec.len())));
        }
        let mut row = [0.0; N];
        for (slot, field) in row.iter_mut().zip(rec.iter()) {
            *slot = field.parse().map_err(|_| Error::Csv(format!("row {}: {field:?} is not a number", line + 2)))?;
        }
        out.push(row);
    }
    Ok(out)
}

fn write_rows<const N: usize>(path: &Path, header: &[&str], data: &[[f64; N]]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in data {
        w.write_record(row.iter().map(|v| format!("{v:?}"))).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
    write_atomic(path, &bytes)
}

const SAMPLE_HEADER: [&str; 4] = ["x", "y", "z", "value"];
const PAIR_HEADER: [&str; 7] = ["x1", "y1", "z1", "x2", "y2", "z2", "value"];
const VALUE_HEADER: [&str; 1] = ["value"];

/// `x,y,z,value` rows.
pub fn read_sphere_samples(path: &Path) -> Result<Vec<(SpherePoint, f64)>> {
    Ok(rows::<4>(path, &SAMPLE_HEADER)?.into_iter().map(|r| (SpherePoint::new(r[0], r[1], r[2]), r[3])).collect())
}

pub fn write_sphere_samples(path: &Path, samples: &[(SpherePoint, f64)]) -> Result<()> {
    let data: Vec<[f64; 4]> = samples.iter().map(|(p, v)| [p.x, p.y, p.z, *v]).collect();
    write_rows(path, &SAMPLE_HEADER, &data)
}

/// `x1,y1,z1,x2,y2,z2,value` rows.
pub fn read_pair_samples(path: &Path) -> Result<Vec<(SpherePair, f64)>> {
    Ok(rows::<7>(path, &PAIR_HEADER)?
        .into_iter()
        .map(|r| (SpherePair(SpherePoint::new(r[0], r[1], r[2]), SpherePoint::new(r[3], r[4], r[5])), r[6]))
        .collect())
}

pub fn write_pair_samples(path: &Path, samples: &[(SpherePair, f64)]) -> Result<()> {
    let data: Vec<[f64; 7]> = samples.iter().map(|(p, v)| [p.0.x, p.0.y, p.0.z, p.1.x, p.1.y, p.1.z, *v]).collect();
    write_rows(path, &PAIR_HEADER, &data)
}

/// A single `value` column.
pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    Ok(rows::<1>(path, &VALUE_HEADER)?.into_iter().map(|r| r[0]).collect())
}

pub fn write_values(path: &Path, values: &[f64]) -> Result<()> {
    let data: Vec<[f64; 1]> = values.iter().map(|v| [*v]).collect();
    write_rows(path, &VALUE_HEADER, &data)
}

/// Equirectangular `theta,phi,value` grid with cell-centred nodes.
pub fn sphere_grid(spec: &SphereSpectrum, n_theta: usize, n_phi: usize) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for a in 0..n_theta {
        let theta = std::f64::consts::PI * (a as f64 + 0.5) / n_theta as f64;
        for b in 0..n_phi {
            let phi = std::f64::consts::TAU * b as f64 / n_phi as f64;
            out.push([theta, phi, spec.evaluate(&SpherePoint::from_angles(theta, phi))]);
        }
    }
    out
}

pub fn write_sphere_grid(path: &Path, grid: &[[f64; 3]]) -> Result<()> {
    write_rows(path, &["theta", "phi", "value"], grid)
}

/// `alpha,beta,gamma,value` rows on an `n × n × n` Euler-angle grid; the
/// value is the real part.
pub fn so3_grid(spec: &So3Spectrum, n: usize) -> Vec<[f64; 4]> {
    use crate::harmonics::EulerRotation;
    let mut out = Vec::with_capacity(n * n * n);
    for a in 0..n {
        let alpha = std::f64::consts::TAU * a as f64 / n as f64;
        for b in 0..n {
            let beta = std::f64::consts::PI * (b as f64 + 0.5) / n as f64;
            for c in 0..n {
                let gamma = std::f64::consts::TAU * c as f64 / n as f64;
                out.push([alpha, beta, gamma, spec.evaluate(&EulerRotation::new(alpha, beta, gamma)).re]);
            }
        }
    }
    out
}

pub fn write_so3_grid(path: &Path, grid: &[[f64; 4]]) -> Result<()> {
    write_rows(path, &["alpha", "beta", "gamma", "value"], grid)
}
