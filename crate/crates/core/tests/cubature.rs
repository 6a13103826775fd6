use std::f64::consts::PI;

use harmonic_radon::cubature::*;
use harmonic_radon::harmonics::*;
use harmonic_radon::lattice::{generate, SphereLattice, SpherePair};
use harmonic_radon::splines::{fit, Functional, SplineProblem};
use harmonic_radon::ErrorKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_spectrum(band: usize, rng: &mut ChaCha8Rng) -> SphereSpectrum {
    let coeffs = (0..sphere_len(band)).map(|_| rng.random_range(-1.0..1.0)).collect();
    SphereSpectrum::from_flat(band, coeffs).unwrap()
}

fn rule(rho: f64, degree: usize) -> SphereRule {
    let l: SphereLattice = generate(rho, 0).unwrap();
    solve_weights(&l, degree).unwrap()
}

#[test]
fn degree_sixteen_rule_is_exact_on_random_functions() {
    let r = rule(0.15, 16);
    assert!(r.min_weight() > 0.0);
    assert!(r.residual <= MOMENT_TOLERANCE);
    let dense = SphereQuadrature::new(40);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let f = random_spectrum(16, &mut rng);
        let got = r.integrate(|p| f.evaluate(p));
        let want = dense.integrate(|p| f.evaluate(p));
        assert!((got - want).abs() <= 1e-8, "{got} vs {want}");
    }
}

#[test]
fn rule_nodes_are_lattice_nodes() {
    let l: SphereLattice = generate(0.3, 0).unwrap();
    let r = solve_weights(&l, 8).unwrap();
    assert!(r.len() <= l.points.len());
    assert!(r.len() >= sphere_len(8) / 2);
    for p in &r.points {
        assert!(l.points.contains(p));
    }
    assert!((r.weights.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-9);
}

#[test]
fn coarse_lattice_is_infeasible() {
    let l: SphereLattice = generate(0.6, 0).unwrap();
    let e = solve_weights(&l, 16).unwrap_err();
    assert_eq!(e.kind(), ErrorKind::Numerical);
}

#[test]
fn discrete_fourier_coefficients_are_exact() {
    let r = rule(0.15, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_spectrum(8, &mut rng);
    let samples: Vec<f64> = r.points.iter().map(|p| f.evaluate(p)).collect();
    let got = discrete_spectrum(&r, &samples, 8).unwrap();
    assert!(got.max_abs_diff(&f) < 1e-9);
    let idx = HarmonicIndex::new(5, 3).unwrap();
    assert!((discrete_fourier(&r, &samples, 8, idx).unwrap() - f.get(5, 3)).abs() < 1e-9);
    assert!(discrete_fourier(&r, &samples, 12, idx).is_err());
}

#[test]
fn too_coarse_rule_aliases() {
    let r = rule(0.3, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_spectrum(8, &mut rng);
    let samples: Vec<f64> = r.points.iter().map(|p| f.evaluate(p)).collect();
    assert!(matches!(discrete_spectrum(&r, &samples, 8), Err(harmonic_radon::Error::InsufficientRule { .. })));
    let aliased = discrete_spectrum_unchecked(&r, &samples, 8).unwrap();
    assert!(aliased.max_abs_diff(&f) > 1e-3);
    // degree-4 functions are still resolved
    let g = random_spectrum(4, &mut rng);
    let s: Vec<f64> = r.points.iter().map(|p| g.evaluate(p)).collect();
    assert!(discrete_spectrum(&r, &s, 4).unwrap().max_abs_diff(&g) < 1e-9);
}

#[test]
fn sample_count_is_checked() {
    let r = rule(0.4, 4);
    assert!(r.integrate_samples(&[1.0; 3]).is_err());
    assert!((r.integrate_samples(&vec![1.0; r.len()]).unwrap() - 4.0 * PI).abs() < 1e-9);
}

#[test]
fn product_rule_integrates_tensor_functions() {
    let a = rule(0.4, 6);
    let b = rule(0.35, 8);
    let p = product_rule(&a, &b);
    assert_eq!(p.degree, 6);
    assert_eq!(p.len(), a.len() * b.len());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = random_spectrum(6, &mut rng);
    let g = random_spectrum(6, &mut rng);
    let got = p.integrate(|SpherePair(x, y)| f.evaluate(x) * g.evaluate(y));
    let want = f.get(0, 1) * g.get(0, 1) * 4.0 * PI;
    assert!((got - want).abs() < 1e-8);
}

#[test]
fn nnls_matches_an_unconstrained_solution_when_it_is_positive() {
    let a = nalgebra::DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
    let b = nalgebra::DVector::from_column_slice(&[1.0, 2.0, 3.0]);
    let s = nnls(&a, &b, 50);
    assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 2.0).abs() < 1e-12);
    assert!(s.residual < 1e-12);
}

#[test]
fn calibration_bisects_to_a_feasible_separation() {
    let c = calibrate(4, 0, 0.3, 1.5, 6).unwrap();
    assert!(c.rho >= 0.3 && c.rho <= 1.5);
    let l: SphereLattice = generate(c.rho, 0).unwrap();
    assert!(solve_weights(&l, 4).is_ok());
    assert_eq!(l.points.len(), c.points);
    assert!(calibrated_rho(10_000).is_err());
}

/// `∫ s = Σ λ_ν s(x_ν)` for every spline `s` with the same nodes and order.
#[test]
fn lagrangian_weights_integrate_splines_exactly() {
    let l: SphereLattice = generate(0.5, 4).unwrap();
    let t = 3.0;
    let lambda = lagrangian_cubature(&l, t).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let values: Vec<f64> = l.points.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
    let problem =
        SplineProblem::with_auto_degree(l.points.iter().map(|p| Functional::point(*p)).collect(), t, 0).unwrap();
    let s = fit(&problem, &values).unwrap();
    let integral = s.spectrum.as_sphere().unwrap().get(0, 1) * (4.0 * PI).sqrt();
    let quad: f64 = lambda.iter().zip(&values).map(|(w, v)| w * v).sum();
    assert!((integral - quad).abs() < 1e-8 * integral.abs().max(1.0), "{integral} vs {quad}");
}

#[test]
fn lagrangian_cubature_improves_with_density() {
    let a = SpherePoint::new(0.2, 0.6, -0.3);
    let f = |p: &SpherePoint| (p.dot(&a) * 2.0).exp();
    let want = SphereQuadrature::new(60).integrate(f);
    let mut last = f64::INFINITY;
    for rho in [0.8, 0.5, 0.3] {
        let l: SphereLattice = generate(rho, 1).unwrap();
        let lambda = lagrangian_cubature(&l, 3.0).unwrap();
        let got: f64 = l.points.iter().zip(&lambda).map(|(p, w)| w * f(p)).sum();
        let err = (got - want).abs();
        assert!(err < last, "rho = {rho}: error {err:e} did not drop below {last:e}");
        last = err;
    }
    assert!(last < 1e-3 * want.abs());
}
