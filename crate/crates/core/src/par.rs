//! Parallel reductions whose result does not depend on the thread count.
//!
//! Work is split into fixed chunks and partial results are merged in index
//! order, so floating-point sums are reproducible bit for bit.

use rayon::prelude::*;

const CHUNK: usize = 32;

pub(crate) fn fold_indexed<A: Send>(
    n: usize,
    init: impl Fn() -> A + Sync,
    step: impl Fn(&mut A, usize) + Sync,
    mut merge: impl FnMut(&mut A, A),
) -> A {
    let parts: Vec<A> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                step(&mut acc, i);
            }
            acc
        })
        .collect();
    let mut out = init();
    for p in parts {
        merge(&mut out, p);
    }
    out
}

pub(crate) fn sum_indexed<T: Send + Copy + std::ops::AddAssign + Default>(
    n: usize,
    f: impl Fn(usize) -> T + Sync,
) -> T {
    fold_indexed(n, T::default, |a, i| *a += f(i), |a, b| *a += b)
}

pub(crate) fn add_vec(a: &mut [f64], b: Vec<f64>) {
    a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
}
