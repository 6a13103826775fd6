//! `hradon`: file-based front end to the harmonic-radon library.
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 numerical failure,
//! 3 I/O or format error. Each run prints one JSON summary line on stdout.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harmonic_radon::cubature::{calibrate, calibrated_rho, product_rule, solve_weights, ProductRule, SphereRule};
use harmonic_radon::frames::{
    analyze, build_atlas, localization_report, synthesize, AtlasOptions, Filter, FrameAtlas, FrameCoefficients,
};
use harmonic_radon::harmonics::{EulerRotation, So3Spectrum, SpherePoint, SphereSpectrum, SPHERE_DEGREE_CAP};
use harmonic_radon::io::{self, SpectrumJson, SplineJson};
use harmonic_radon::lattice::{
    dual_circle, generate_with, verify, GenerateOptions, Lattice, MetricPoint, Space, SphereLattice, SpherePair,
    DEFAULT_GRID, MIN_GRID,
};
use harmonic_radon::radon_sphere::{self, PARITY_TOLERANCE};
use harmonic_radon::splines::{fit_with, Functional, SolveStrategy, SplineProblem};
use harmonic_radon::{radon_so3, Error, ErrorKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

const THREADS_VAR: &str = "HRADON_THREADS";

/// Default tolerance for the pipeline recovery checks.
const PIPELINE_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(name = "hradon", version, about = "Splines, cubature, frames and Radon-type inversion on S² and SO(3)")]
struct Cli {
    /// Overrides the default tolerance of the command (parity checks,
    /// pipeline recovery checks).
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate and verify a ρ-lattice.
    Lattice(LatticeArgs),
    #[command(subcommand)]
    Cubature(CubatureCmd),
    #[command(subcommand)]
    Spline(SplineCmd),
    /// Funk transform on S².
    #[command(subcommand)]
    Funk(FunkCmd),
    /// Hemispherical transform on S².
    #[command(subcommand)]
    Hemi(HemiCmd),
    #[command(subcommand)]
    So3(So3Cmd),
    #[command(subcommand)]
    Frame(FrameCmd),
    /// Export a spectrum on an angular grid as CSV.
    Grid(GridArgs),
    /// End-to-end discrete inversion demos.
    #[command(subcommand)]
    Pipeline(PipelineCmd),
}

#[derive(Args, Debug)]
struct LatticeArgs {
    #[arg(long)]
    space: Space,
    #[arg(long)]
    rho: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Test-grid size for the covering check.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum CubatureCmd {
    /// Positive weights on an S² lattice.
    Solve {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tensor product of two S² rules.
    Product {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Largest feasible separation for a degree.
    Calibrate {
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Gram,
    Qr,
}

impl From<StrategyArg> for SolveStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Gram => SolveStrategy::Gram,
            StrategyArg::Qr => SolveStrategy::WeightedBasisQr,
        }
    }
}

#[derive(Subcommand, Debug)]
enum SplineCmd {
    /// Variational spline through functional values.
    Fit {
        #[arg(long)]
        space: Space,
        #[arg(long)]
        t: f64,
        /// Truncation degree; chosen automatically when absent.
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long, default_value_t = 0)]
        min_degree: usize,
        #[arg(long)]
        functionals: PathBuf,
        #[arg(long)]
        values: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::Gram)]
        strategy: StrategyArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct InOut {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DiscreteArgs {
    #[arg(long)]
    rule: PathBuf,
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    band: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum FunkCmd {
    Forward(InOut),
    Inverse(InOut),
    /// Samples of the transform of a spectrum at the nodes of a rule.
    Sample {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        rule: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    DiscreteInvert(DiscreteArgs),
}

#[derive(Subcommand, Debug)]
enum HemiCmd {
    Forward(InOut),
    Inverse(InOut),
}

#[derive(Subcommand, Debug)]
enum So3Cmd {
    #[command(subcommand)]
    Radon(RadonCmd),
    /// Samples of `Rf` at the nodes of a product rule.
    Sample {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        rule: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    SplineInvert {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        values: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0)]
        min_degree: usize,
        #[arg(long)]
        out: PathBuf,
    },
    DiscreteInvert(DiscreteArgs),
}

#[derive(Subcommand, Debug)]
enum RadonCmd {
    Forward(InOut),
    Inverse(InOut),
}

#[derive(Subcommand, Debug)]
enum FrameCmd {
    Build {
        #[arg(long)]
        jmax: Option<usize>,
        #[arg(long)]
        band: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    Analyze {
        #[arg(long)]
        atlas: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    Synthesize {
        #[arg(long)]
        atlas: PathBuf,
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    Localization {
        #[arg(long)]
        atlas: PathBuf,
        #[arg(long)]
        j: usize,
        #[arg(long, default_value_t = 0)]
        nu: usize,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3])]
        exponents: Vec<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 90)]
    n_theta: usize,
    #[arg(long, default_value_t = 180)]
    n_phi: usize,
    /// Nodes per Euler angle for SO(3) spectra.
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum PipelineCmd {
    /// Random even `f`, samples of its Funk transform on a cubature rule,
    /// discrete inversion.
    Funk(PipelineArgs),
    /// Random real `f` on SO(3), samples of `Rf` on a tensor rule, discrete
    /// inversion.
    So3(PipelineArgs),
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[arg(long)]
    band: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

/// Functional records accepted by `spline fit`.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FunctionalInput {
    Point { point: SpherePoint },
    Circle { pole: SpherePoint },
    ProductPoint { x: SpherePoint, y: SpherePoint },
    RadonPoint { x: SpherePoint, y: SpherePoint },
}

const CIRCLE_NODES: usize = 64;

impl FunctionalInput {
    fn build(&self) -> Result<Functional, Error> {
        Ok(match self {
            FunctionalInput::Point { point } => Functional::point(*point),
            FunctionalInput::Circle { pole } => Functional::circle(dual_circle(pole, CIRCLE_NODES)?),
            FunctionalInput::ProductPoint { x, y } => Functional::product_point(*x, *y),
            FunctionalInput::RadonPoint { x, y } => Functional::radon_point(*x, *y),
        })
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn positive(name: &str, v: f64) -> Result<f64, Error> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn degree(name: &str, v: usize) -> Result<usize, Error> {
    if v > SPHERE_DEGREE_CAP {
        Err(Error::DegreeTooHigh { requested: v, cap: SPHERE_DEGREE_CAP })
    } else {
        let _ = name;
        Ok(v)
    }
}

fn read_space_tag(path: &Path) -> Result<(Value, Space), Error> {
    let v: Value = io::read_json(path)?;
    let space = v
        .get("space")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Format(format!("{}: missing \"space\"", path.display())))?
        .parse()
        .map_err(|e: Error| Error::Format(format!("{}: {e}", path.display())))?;
    Ok((v, space))
}

fn read_sphere_rule(path: &Path) -> Result<SphereRule, Error> {
    let (v, space) = read_space_tag(path)?;
    if space != Space::S2 {
        return Err(invalid(format!("{} holds a {} object, expected s2", path.display(), space.name())));
    }
    Ok(serde_json::from_value(v)?)
}

fn read_product_rule(path: &Path) -> Result<ProductRule, Error> {
    let (v, space) = read_space_tag(path)?;
    if space != Space::S2xS2 {
        return Err(invalid(format!("{} holds a {} object, expected s2xs2", path.display(), space.name())));
    }
    Ok(serde_json::from_value(v)?)
}

fn read_spectrum(path: &Path) -> Result<SpectrumJson, Error> {
    io::read_json(path)
}

fn sphere_values_at(rule: &SphereRule, f: &SphereSpectrum) -> Vec<(SpherePoint, f64)> {
    rule.points.iter().map(|p| (*p, f.evaluate(p))).collect()
}

fn lattice_summary<P: MetricPoint>(l: &Lattice<P>) -> Value {
    json!({
        "space": l.space,
        "rho": l.rho,
        "points": l.points.len(),
        "report": l.report,
    })
}

fn run_lattice<P: MetricPoint>(a: &LatticeArgs) -> Result<Value, Error> {
    let opts = GenerateOptions { grid: a.grid, ..GenerateOptions::default() };
    let mut l: Lattice<P> = generate_with(a.rho, a.seed, opts)?;
    l.report = Some(verify(&l, a.grid)?);
    io::write_json(&a.out, &l)?;
    Ok(lattice_summary(&l))
}

fn rule_summary(r: &SphereRule) -> Value {
    json!({
        "degree": r.degree,
        "nodes": r.len(),
        "residual": r.residual,
        "min_weight": r.min_weight(),
        "max_weight": r.max_weight(),
    })
}

fn run(cli: &Cli) -> Result<Value, Error> {
    if let Some(t) = cli.tol {
        positive("tol", t)?;
    }
    match &cli.command {
        Command::Lattice(a) => {
            positive("rho", a.rho)?;
            if a.grid < MIN_GRID {
                return Err(invalid(format!("--grid must be at least {MIN_GRID}")));
            }
            match a.space {
                Space::S2 => run_lattice::<SpherePoint>(a),
                Space::So3 => run_lattice::<EulerRotation>(a),
                Space::S2xS2 => run_lattice::<SpherePair>(a),
            }
        }
        Command::Cubature(c) => run_cubature(c),
        Command::Spline(SplineCmd::Fit { space, t, kmax, min_degree, functionals, values, strategy, out }) => {
            positive("t", *t)?;
            let inputs: Vec<FunctionalInput> = io::read_json(functionals)?;
            let fs = inputs.iter().map(FunctionalInput::build).collect::<Result<Vec<_>, _>>()?;
            if let Some(f) = fs.first() {
                let want = match f.kind().space() {
                    harmonic_radon::splines::SplineSpace::S2 => Space::S2,
                    harmonic_radon::splines::SplineSpace::S2xS2 => Space::S2xS2,
                    harmonic_radon::splines::SplineSpace::So3 => Space::So3,
                };
                if want != *space {
                    return Err(invalid(format!("functionals live on {}, not {}", want.name(), space.name())));
                }
            }
            let v = io::read_values(values)?;
            let problem = match kmax {
                Some(k) => SplineProblem::new(fs, *t, *k)?,
                None => SplineProblem::with_auto_degree(fs, *t, *min_degree)?,
            };
            let s = fit_with(&problem, &v, (*strategy).into())?;
            let doc = SplineJson::from(&s);
            io::write_json(out, &doc)?;
            Ok(json!({
                "functionals": problem.len(),
                "degree_max": problem.degree_max(),
                "tail_bound": problem.tail_bound(),
                "interpolation_residual": s.interpolation_residual,
                "norm": doc.norm,
            }))
        }
        Command::Funk(c) => run_funk(c, cli.tol),
        Command::Hemi(c) => {
            let (a, forward) = match c {
                HemiCmd::Forward(a) => (a, true),
                HemiCmd::Inverse(a) => (a, false),
            };
            let f = read_spectrum(&a.input)?.to_sphere()?;
            let g = if forward {
                radon_sphere::hemispherical_forward(&f)
            } else {
                radon_sphere::hemispherical_inverse_with_tol(&f, cli.tol.unwrap_or(PARITY_TOLERANCE))?
            };
            io::write_json(&a.out, &SpectrumJson::from(&g))?;
            Ok(json!({ "degree_max": g.degree_max(), "norm": g.norm() }))
        }
        Command::So3(c) => run_so3(c),
        Command::Frame(c) => run_frame(c),
        Command::Grid(a) => match read_spectrum(&a.input)? {
            SpectrumJson::S2 { .. } => {
                let f = read_spectrum(&a.input)?.to_sphere()?;
                if a.n_theta == 0 || a.n_phi == 0 {
                    return Err(invalid("grid resolution must be positive"));
                }
                let grid = io::sphere_grid(&f, a.n_theta, a.n_phi);
                io::write_sphere_grid(&a.out, &grid)?;
                Ok(json!({ "rows": grid.len() }))
            }
            s @ SpectrumJson::So3 { .. } => {
                let f = s.to_so3()?;
                if a.n == 0 {
                    return Err(invalid("grid resolution must be positive"));
                }
                let grid = io::so3_grid(&f, a.n);
                io::write_so3_grid(&a.out, &grid)?;
                Ok(json!({ "rows": grid.len() }))
            }
            SpectrumJson::S2xS2 { .. } => Err(invalid("grid export supports s2 and so3 spectra")),
        },
        Command::Pipeline(PipelineCmd::Funk(a)) => pipeline_funk(a, cli.tol.unwrap_or(PIPELINE_TOL)),
        Command::Pipeline(PipelineCmd::So3(a)) => pipeline_so3(a, cli.tol.unwrap_or(PIPELINE_TOL)),
    }
}

fn run_cubature(c: &CubatureCmd) -> Result<Value, Error> {
    match c {
        CubatureCmd::Solve { lattice, degree: k, out } => {
            degree("degree", *k)?;
            let (v, space) = read_space_tag(lattice)?;
            if space != Space::S2 {
                return Err(invalid("cubature weights are solved on s2 lattices"));
            }
            let l: SphereLattice = serde_json::from_value(v)?;
            let r = solve_weights(&l, *k)?;
            io::write_json(out, &r)?;
            Ok(rule_summary(&r))
        }
        CubatureCmd::Product { a, b, out } => {
            let p = product_rule(&read_sphere_rule(a)?, &read_sphere_rule(b)?);
            io::write_json(out, &p)?;
            Ok(json!({ "degree": p.degree, "nodes": p.len(), "residual": p.residual }))
        }
        CubatureCmd::Calibrate { degree: k, seed, lo, hi, steps } => {
            degree("degree", *k)?;
            let kf = *k as f64 + 1.0;
            let lo = positive("lo", lo.unwrap_or(1.8 / kf))?;
            let hi = positive("hi", hi.unwrap_or((4.5 / kf).min(std::f64::consts::PI)))?;
            if lo >= hi {
                return Err(invalid("--lo must be below --hi"));
            }
            let c = calibrate(*k, *seed, lo, hi, *steps)?;
            Ok(json!({ "degree": c.degree, "rho": c.rho, "points": c.points }))
        }
    }
}

fn run_funk(c: &FunkCmd, tol: Option<f64>) -> Result<Value, Error> {
    match c {
        FunkCmd::Forward(a) | FunkCmd::Inverse(a) => {
            let f = read_spectrum(&a.input)?.to_sphere()?;
            let g = if matches!(c, FunkCmd::Forward(_)) {
                radon_sphere::funk_forward(&f)
            } else {
                radon_sphere::funk_inverse_with_tol(&f, tol.unwrap_or(PARITY_TOLERANCE))?
            };
            io::write_json(&a.out, &SpectrumJson::from(&g))?;
            Ok(json!({ "degree_max": g.degree_max(), "norm": g.norm(), "odd_norm": f.odd_energy().sqrt() }))
        }
        FunkCmd::Sample { input, rule, out } => {
            let f = read_spectrum(input)?.to_sphere()?;
            let r = read_sphere_rule(rule)?;
            let samples = sphere_values_at(&r, &radon_sphere::funk_forward(&f));
            io::write_sphere_samples(out, &samples)?;
            Ok(json!({ "samples": samples.len() }))
        }
        FunkCmd::DiscreteInvert(a) => {
            let r = read_sphere_rule(&a.rule)?;
            let samples = io::read_sphere_samples(&a.samples)?;
            let values = samples_on_rule(&r.points, &samples)?;
            let inv = radon_sphere::discrete_inversion(&r, &values, degree("band", a.band)?)?;
            io::write_json(&a.out, &SpectrumJson::from(&inv.spectrum))?;
            Ok(json!({ "band": a.band, "odd_norm": inv.odd_norm, "norm": inv.spectrum.norm() }))
        }
    }
}

/// Sample values in rule order; the CSV nodes must match the rule nodes.
fn samples_on_rule<P, Q>(nodes: &[P], samples: &[(Q, f64)]) -> Result<Vec<f64>, Error>
where
    P: MetricPoint,
    Q: Into<P> + Clone,
{
    if nodes.len() != samples.len() {
        return Err(invalid(format!("{} samples for a rule with {} nodes", samples.len(), nodes.len())));
    }
    for (i, (n, (q, _))) in nodes.iter().zip(samples).enumerate() {
        let q: P = q.clone().into();
        if n.distance(&q) > 1e-9 {
            return Err(invalid(format!("sample {i} is not at node {i} of the rule")));
        }
    }
    Ok(samples.iter().map(|(_, v)| *v).collect())
}

fn run_so3(c: &So3Cmd) -> Result<Value, Error> {
    match c {
        So3Cmd::Radon(RadonCmd::Forward(a)) => {
            let f = read_spectrum(&a.input)?.to_so3()?;
            let g = radon_so3::radon_forward_spectral(&f);
            io::write_json(&a.out, &SpectrumJson::from(&g))?;
            Ok(json!({ "degree_max": g.degree_max(), "preimage_norm": g.preimage_norm_squared().sqrt() }))
        }
        So3Cmd::Radon(RadonCmd::Inverse(a)) => {
            let g = read_spectrum(&a.input)?.to_product()?;
            let f = radon_so3::radon_inverse_spectral(&g);
            io::write_json(&a.out, &SpectrumJson::from(&f))?;
            Ok(json!({ "degree_max": f.degree_max(), "norm": f.norm_squared().sqrt() }))
        }
        So3Cmd::Sample { input, rule, out } => {
            let f = read_spectrum(input)?.to_so3()?;
            let r = read_product_rule(rule)?;
            let g = radon_so3::radon_forward_spectral(&f);
            let mut imag: f64 = 0.0;
            let samples: Vec<(SpherePair, f64)> = r
                .points
                .iter()
                .map(|p| {
                    let v = g.evaluate(&p.0, &p.1);
                    imag = imag.max(v.im.abs());
                    (*p, v.re)
                })
                .collect();
            io::write_pair_samples(out, &samples)?;
            Ok(json!({ "samples": samples.len(), "max_imaginary": imag }))
        }
        So3Cmd::SplineInvert { pairs, values, t, min_degree, out } => {
            positive("t", *t)?;
            let pairs: Vec<SpherePair> = io::read_json(pairs)?;
            let v = io::read_values(values)?;
            let f = radon_so3::spline_inversion(&pairs, &v, *t, *min_degree)?;
            io::write_json(out, &SpectrumJson::from(&f))?;
            Ok(json!({ "pairs": pairs.len(), "degree_max": f.degree_max(), "norm": f.norm_squared().sqrt() }))
        }
        So3Cmd::DiscreteInvert(a) => {
            let r = read_product_rule(&a.rule)?;
            let samples = io::read_pair_samples(&a.samples)?;
            let values = samples_on_rule(&r.points, &samples)?;
            let f = radon_so3::discrete_inversion(&r, &values, degree("band", a.band)?)?;
            io::write_json(&a.out, &SpectrumJson::from(&f))?;
            Ok(json!({ "band": a.band, "norm": f.norm_squared().sqrt() }))
        }
    }
}

fn run_frame(c: &FrameCmd) -> Result<Value, Error> {
    let filter = Filter::new();
    match c {
        FrameCmd::Build { jmax, band, seed, out } => {
            let j = jmax.unwrap_or_else(|| harmonic_radon::frames::levels_for_band(*band));
            let atlas = build_atlas(j, degree("band", *band)?, &filter, AtlasOptions { seed: *seed })?;
            io::write_json(out, &atlas)?;
            let sizes: Vec<usize> = atlas.levels.iter().map(|l| l.rule.len()).collect();
            Ok(json!({ "j_max": atlas.j_max, "band": atlas.band, "members": sizes }))
        }
        FrameCmd::Analyze { atlas, input, out } => {
            let atlas: FrameAtlas = io::read_json(atlas)?;
            let f = read_spectrum(input)?.to_sphere()?;
            let c = analyze(&atlas, &f)?;
            io::write_json(out, &c)?;
            Ok(json!({ "energy": c.energy(), "norm_squared": f.norm_squared() }))
        }
        FrameCmd::Synthesize { atlas, coeffs, out } => {
            let atlas: FrameAtlas = io::read_json(atlas)?;
            let c: FrameCoefficients = io::read_json(coeffs)?;
            let f = synthesize(&atlas, &c)?;
            io::write_json(out, &SpectrumJson::from(&f))?;
            Ok(json!({ "degree_max": f.degree_max(), "norm": f.norm() }))
        }
        FrameCmd::Localization { atlas, j, nu, grid, exponents, out } => {
            let atlas: FrameAtlas = io::read_json(atlas)?;
            let r = localization_report(&atlas, &filter, *j, *nu, exponents, *grid)?;
            if let Some(out) = out {
                io::write_json(out, &r)?;
            }
            Ok(
                json!({ "j": r.j, "peak": r.peak, "far_max": r.far_max, "decay_factor": r.decay_factor(), "rows": r.rows }),
            )
        }
    }
}

fn rule_for(degree: usize, seed: u64) -> Result<SphereRule, Error> {
    let rho = calibrated_rho(degree)?;
    let l: SphereLattice = harmonic_radon::lattice::generate(rho, seed)?;
    solve_weights(&l, degree)
}

struct Outputs(Vec<(PathBuf, Vec<u8>)>);

impl Outputs {
    fn json<T: serde::Serialize>(&mut self, path: PathBuf, value: &T) -> Result<(), Error> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.0.push((path, s.into_bytes()));
        Ok(())
    }

    /// Writes every file once all computation has succeeded.
    fn commit(self) -> Result<(), Error> {
        for (p, bytes) in self.0 {
            io::write_atomic(&p, &bytes)?;
        }
        Ok(())
    }
}

fn pipeline_funk(a: &PipelineArgs, tol: f64) -> Result<Value, Error> {
    degree("band", a.band)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut f = SphereSpectrum::zeros(a.band);
    for k in (0..=a.band).step_by(2) {
        f.degree_mut(k).iter_mut().for_each(|c| *c = rng.random_range(-1.0..1.0));
    }
    let rule = rule_for(2 * a.band, a.seed)?;
    let samples = sphere_values_at(&rule, &radon_sphere::funk_forward(&f));
    let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let inv = radon_sphere::discrete_inversion(&rule, &values, a.band)?;
    let err = inv.spectrum.max_abs_diff(&f);
    if err > tol {
        return Err(Error::Numerical(format!("recovery error {err:.3e} exceeds {tol:e}")));
    }
    std::fs::create_dir_all(&a.out_dir)?;
    let mut out = Outputs(Vec::new());
    out.json(a.out_dir.join("truth.json"), &SpectrumJson::from(&f))?;
    out.json(a.out_dir.join("rule.json"), &rule)?;
    out.json(a.out_dir.join("recovered.json"), &SpectrumJson::from(&inv.spectrum))?;
    out.commit()?;
    io::write_sphere_samples(&a.out_dir.join("samples.csv"), &samples)?;
    Ok(json!({ "band": a.band, "nodes": rule.len(), "max_error": err, "odd_norm": inv.odd_norm }))
}

fn pipeline_so3(a: &PipelineArgs, tol: f64) -> Result<Value, Error> {
    degree("band", a.band)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let blocks = (0..=a.band)
        .map(|k| {
            let d = 2 * k + 1;
            nalgebra::DMatrix::from_fn(d, d, |_, _| num_complex::Complex64::new(rng.random_range(-1.0..1.0), 0.0))
        })
        .collect();
    let f = So3Spectrum::from_blocks(blocks)?;
    let s2 = rule_for(2 * a.band, a.seed)?;
    let rule = product_rule(&s2, &s2);
    let g = radon_so3::radon_forward_spectral(&f);
    let samples: Vec<(SpherePair, f64)> = rule.points.iter().map(|p| (*p, g.evaluate(&p.0, &p.1).re)).collect();
    let values: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let rec = radon_so3::discrete_inversion(&rule, &values, a.band)?;
    let err = rec.max_abs_diff(&f);
    if err > tol {
        return Err(Error::Numerical(format!("recovery error {err:.3e} exceeds {tol:e}")));
    }
    std::fs::create_dir_all(&a.out_dir)?;
    let mut out = Outputs(Vec::new());
    out.json(a.out_dir.join("truth.json"), &SpectrumJson::from(&f))?;
    out.json(a.out_dir.join("rule.json"), &rule)?;
    out.json(a.out_dir.join("recovered.json"), &SpectrumJson::from(&rec))?;
    out.commit()?;
    io::write_pair_samples(&a.out_dir.join("samples.csv"), &samples)?;
    Ok(json!({ "band": a.band, "nodes": rule.len(), "max_error": err }))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Lattice(_) => "lattice",
        Command::Cubature(CubatureCmd::Solve { .. }) => "cubature solve",
        Command::Cubature(CubatureCmd::Product { .. }) => "cubature product",
        Command::Cubature(CubatureCmd::Calibrate { .. }) => "cubature calibrate",
        Command::Spline(_) => "spline fit",
        Command::Funk(FunkCmd::Forward(_)) => "funk forward",
        Command::Funk(FunkCmd::Inverse(_)) => "funk inverse",
        Command::Funk(FunkCmd::Sample { .. }) => "funk sample",
        Command::Funk(FunkCmd::DiscreteInvert(_)) => "funk discrete-invert",
        Command::Hemi(HemiCmd::Forward(_)) => "hemi forward",
        Command::Hemi(HemiCmd::Inverse(_)) => "hemi inverse",
        Command::So3(So3Cmd::Radon(RadonCmd::Forward(_))) => "so3 radon forward",
        Command::So3(So3Cmd::Radon(RadonCmd::Inverse(_))) => "so3 radon inverse",
        Command::So3(So3Cmd::Sample { .. }) => "so3 sample",
        Command::So3(So3Cmd::SplineInvert { .. }) => "so3 spline-invert",
        Command::So3(So3Cmd::DiscreteInvert(_)) => "so3 discrete-invert",
        Command::Frame(FrameCmd::Build { .. }) => "frame build",
        Command::Frame(FrameCmd::Analyze { .. }) => "frame analyze",
        Command::Frame(FrameCmd::Synthesize { .. }) => "frame synthesize",
        Command::Frame(FrameCmd::Localization { .. }) => "frame localization",
        Command::Grid(_) => "grid",
        Command::Pipeline(PipelineCmd::Funk(_)) => "pipeline funk",
        Command::Pipeline(PipelineCmd::So3(_)) => "pipeline so3",
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Validation => 1,
        ErrorKind::Numerical => 2,
        ErrorKind::Io => 3,
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("{THREADS_VAR} must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err(format!("{THREADS_VAR} must be positive"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        println!(
            "{}",
            json!({ "command": command_name(&cli.command), "status": "error", "exit_code": 1, "error": msg })
        );
        return ExitCode::from(1);
    }
    let name = command_name(&cli.command);
    match run(&cli) {
        Ok(mut summary) => {
            if let Value::Object(m) = &mut summary {
                m.insert("command".into(), json!(name));
                m.insert("status".into(), json!("ok"));
            }
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e}");
            println!("{}", json!({ "command": name, "status": "error", "exit_code": code, "error": e.to_string() }));
            ExitCode::from(code)
        }
    }
}
