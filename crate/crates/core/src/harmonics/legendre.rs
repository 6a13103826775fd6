//! Legendre polynomials and Gauss–Legendre nodes.

/// Legendre polynomial `P_k(s)` by the three-term recurrence.
///
/// This is also the Gegenbauer polynomial with parameter 1/2.
pub fn legendre(k: usize, s: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => s,
        _ => {
            let (mut p0, mut p1) = (1.0, s);
            for n in 1..k {
                let nf = n as f64;
                let p2 = ((2.0 * nf + 1.0) * s * p1 - nf * p0) / (nf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

/// `C_k^{1/2}(s)`, identical to [`legendre`].
pub fn gegenbauer_half(k: usize, s: f64) -> f64 {
    legendre(k, s)
}

/// `[P_0(s), ..., P_kmax(s)]`.
pub fn legendre_table(kmax: usize, s: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(1.0);
    if kmax == 0 {
        return out;
    }
    out.push(s);
    for n in 1..kmax {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0) * s * out[n] - nf * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

/// Sum `Σ_k coeffs[k] P_k(s)` by Clenshaw's recurrence.
pub fn legendre_series(coeffs: &[f64], s: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for k in (0..coeffs.len()).rev() {
        let kf = k as f64;
        let alpha = (2.0 * kf + 1.0) / (kf + 1.0) * s;
        let beta = -(kf + 1.0) / (kf + 2.0);
        let b0 = coeffs[k] + alpha * b1 + beta * b2;
        b2 = b1;
        b1 = b0;
    }
    b1
}

/// Gauss–Legendre nodes and weights on [-1, 1] with `n` points, ascending.
///
/// Exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_values() {
        for &s in &[-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_eq!(gegenbauer_half(0, s), 1.0);
            assert!((legendre(2, s) - (3.0 * s * s - 1.0) / 2.0).abs() < 1e-15);
            assert!((legendre(3, s) - (5.0 * s * s * s - 3.0 * s) / 2.0).abs() < 1e-15);
        }
        assert!((gegenbauer_half(2, 0.0) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn table_and_clenshaw_agree_with_scalar() {
        let s = 0.37;
        let t = legendre_table(40, s);
        for (k, v) in t.iter().enumerate() {
            assert!((v - legendre(k, s)).abs() < 1e-14);
        }
        let c: Vec<f64> = (0..41).map(|k| 1.0 / (k as f64 + 1.0)).collect();
        let direct: f64 = c.iter().zip(&t).map(|(a, b)| a * b).sum();
        assert!((legendre_series(&c, s) - direct).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1usize, 2, 5, 17, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }
}
