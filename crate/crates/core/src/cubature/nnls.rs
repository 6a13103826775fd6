//! Nonnegative least squares `min ‖Ax − b‖, x ≥ 0`.
//!
//! Active-set method of Lawson and Hanson on the normal equations, with the
//! Cholesky factor of the passive block grown one column at a time. The
//! final passive-set solution is polished by a QR least-squares solve on `A`
//! itself so that the residual is not limited by the squared conditioning.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct NnlsSolution {
    pub x: DVector<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Lower-triangular factor of `G[P, P]`, grown by bordering.
struct GrowingCholesky {
    l: DMatrix<f64>,
    n: usize,
}

impl GrowingCholesky {
    fn new(cap: usize) -> Self {
        Self { l: DMatrix::zeros(cap, cap), n: 0 }
    }

    /// Appends a row/column; `false` when the pivot is not positive.
    fn push(&mut self, col: &[f64], diag: f64) -> bool {
        let n = self.n;
        let mut row = vec![0.0; n];
        for i in 0..n {
            let mut s = col[i];
            for k in 0..i {
                s -= self.l[(i, k)] * row[k];
            }
            row[i] = s / self.l[(i, i)];
        }
        let d2 = diag - row.iter().map(|v| v * v).sum::<f64>();
        if !(d2 > diag.abs() * 1e-14) {
            return false;
        }
        for (k, v) in row.into_iter().enumerate() {
            self.l[(n, k)] = v;
        }
        self.l[(n, n)] = d2.sqrt();
        self.n += 1;
        true
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = rhs.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.l[(i, k)] * y[k];
            }
            y[i] /= self.l[(i, i)];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= self.l[(k, i)] * y[k];
            }
            y[i] /= self.l[(i, i)];
        }
        y
    }
}

pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, max_iter: usize) -> NnlsSolution {
    let n = a.ncols();
    let g = a.transpose() * a;
    let atb = a.transpose() * b;
    let tol = 1e-12 * atb.amax().max(g.diagonal().amax());

    let mut x = DVector::zeros(n);
    let mut passive: Vec<usize> = Vec::new();
    let mut in_p = vec![false; n];
    let mut banned = vec![false; n];
    let mut iterations = 0;

    let gradient = |x: &DVector<f64>| &atb - &g * x;
    let mut w = gradient(&x);

    let rebuild = |passive: &[usize]| {
        let mut ch = GrowingCholesky::new(passive.len().max(1) + 1 + a.nrows());
        let mut kept = Vec::with_capacity(passive.len());
        for &j in passive {
            let col: Vec<f64> = kept.iter().map(|&i| g[(i, j)]).collect();
            if ch.push(&col, g[(j, j)]) {
                kept.push(j);
            }
        }
        (ch, kept)
    };
    let mut chol = GrowingCholesky::new(a.nrows().min(n) + 2);

    while iterations < max_iter {
        let mut best = None;
        let mut best_w = tol;
        for j in 0..n {
            if !in_p[j] && !banned[j] && w[j] > best_w {
                best_w = w[j];
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        iterations += 1;

        let col: Vec<f64> = passive.iter().map(|&i| g[(i, j)]).collect();
        if chol.n >= chol.l.nrows() || !chol.push(&col, g[(j, j)]) {
            // dependent on the passive columns
            banned[j] = true;
            continue;
        }
        passive.push(j);
        in_p[j] = true;
        banned.iter_mut().for_each(|v| *v = false);

        loop {
            let rhs: Vec<f64> = passive.iter().map(|&i| atb[i]).collect();
            let s = chol.solve(&rhs);
            if s.iter().all(|&v| v > 0.0) {
                for (idx, &i) in passive.iter().enumerate() {
                    x[i] = s[idx];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (idx, &i) in passive.iter().enumerate() {
                if s[idx] <= 0.0 {
                    let step = x[i] / (x[i] - s[idx]);
                    alpha = alpha.min(step);
                }
            }
            for (idx, &i) in passive.iter().enumerate() {
                x[i] += alpha * (s[idx] - x[i]);
            }
            let keep: Vec<usize> = passive.iter().copied().filter(|&i| x[i] > 1e-300).collect();
            for &i in &passive {
                if !keep.contains(&i) {
                    x[i] = 0.0;
                    in_p[i] = false;
                }
            }
            let (ch, kept) = rebuild(&keep);
            for &i in &keep {
                if !kept.contains(&i) {
                    x[i] = 0.0;
                    in_p[i] = false;
                }
            }
            chol = ch;
            passive = kept;
            if passive.is_empty() {
                break;
            }
        }
        w = gradient(&x);
    }

    polish(a, b, &mut x, &passive);
    let residual = (a * &x - b).norm();
    NnlsSolution { x, residual, iterations }
}

/// Replaces `x[P]` by the QR least-squares solution on the columns `P` when
/// that keeps every entry positive.
fn polish(a: &DMatrix<f64>, b: &DVector<f64>, x: &mut DVector<f64>, passive: &[usize]) {
    if passive.is_empty() || passive.len() > a.nrows() {
        return;
    }
    if let Some(s) = least_squares(a, b, passive) {
        if s.iter().all(|&v| v > 0.0) {
            let before = (a * &*x - b).norm();
            let mut trial = x.clone();
            for (idx, &i) in passive.iter().enumerate() {
                trial[i] = s[idx];
            }
            if (a * &trial - b).norm() <= before {
                *x = trial;
            }
        }
    }
}

/// Least-squares solution restricted to the listed columns.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>, cols: &[usize]) -> Option<DVector<f64>> {
    let sub = a.select_columns(cols);
    let qr = sub.qr();
    let qtb = qr.q().transpose() * b;
    qr.r().solve_upper_triangular(&qtb)
}
