//! Lanczos iteration with full reorthogonalization.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::eigen::tridiagonal_eigen;
use crate::linalg::sparse::LinearOperator;
use crate::rng;
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct LanczosOptions<T> {
    /// Number of lowest Ritz pairs requested.
    pub n_eigs: usize,
    pub max_iter: usize,
    /// Residual tolerance relative to `max(1, |θ|)`.
    pub tol: T,
    pub seed: u64,
}

impl<T: Real> Default for LanczosOptions<T> {
    fn default() -> Self {
        Self {
            n_eigs: 2,
            max_iter: 400,
            tol: T::lit(1e-10),
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LanczosResult<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
    pub residuals: Vec<T>,
    pub iterations: usize,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    // independent partial sums let the compiler vectorize
    let mut acc = [T::zero(); 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: T = ca.remainder().iter().zip(cb.remainder()).map(|(&x, &y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    acc.iter().copied().sum::<T>() + tail
}

fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Lowest eigenpairs of a real symmetric operator.
///
/// `filter`, when given, must be an orthogonal projector commuting with the
/// operator; it is applied to the start vector and after every product so the
/// Krylov space stays inside its range.
pub fn lanczos<T: Real>(
    op: &dyn LinearOperator<T>,
    filter: Option<&(dyn Fn(&mut [T]) + Sync)>,
    opts: &LanczosOptions<T>,
) -> Result<LanczosResult<T>> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidInput("empty operator".into()));
    }
    let mut r = rng::stream(opts.seed, &[n as u64]);
    let mut v: Vec<T> = (0..n).map(|_| T::lit(r.random::<f64>() - 0.5)).collect();
    if let Some(f) = filter {
        f(&mut v);
    }
    let nv = dot(&v, &v).sqrt();
    if nv <= T::lit(1e-12) * T::from_usize_lossy(n).sqrt() {
        return Err(Error::InvalidInput("start vector vanishes under the filter".into()));
    }
    for x in v.iter_mut() {
        *x /= nv;
    }
    let max_iter = opts.max_iter.min(n).max(1);
    let mut basis: Vec<Vec<T>> = vec![v];
    let mut alpha: Vec<T> = Vec::new();
    let mut beta: Vec<T> = Vec::new();
    let mut w = vec![T::zero(); n];
    let tiny = T::lit(1e-12);
    let mut last_resid = T::infinity();
    for j in 0..max_iter {
        op.apply(&basis[j], &mut w);
        if let Some(f) = filter {
            f(&mut w);
        }
        let a = dot(&basis[j], &w);
        alpha.push(a);
        axpy(-a, &basis[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut w);
        }
        for pass in 0..2 {
            let before = dot(&w, &w);
            for q in &basis {
                let ov = dot(q, &w);
                axpy(-ov, q, &mut w);
            }
            if pass == 1 {
                break;
            }
            // keep round-off from leaving the filtered subspace
            if let Some(f) = filter {
                f(&mut w);
            } else if dot(&w, &w) > T::lit(0.25) * before {
                // little cancellation: one pass is enough
                break;
            }
        }
        let b = dot(&w, &w).sqrt();
        let scale = alpha.iter().fold(T::one(), |m, x| m.max(x.abs()));
        let exhausted = b <= tiny * scale || j + 1 == max_iter;
        let check = exhausted || (j + 1 >= opts.n_eigs && (j % 4 == 3 || j + 1 < 12));
        if check {
            let te = tridiagonal_eigen(&alpha, &beta)?;
            let k = opts.n_eigs.min(alpha.len());
            let mut worst = T::zero();
            let resid: Vec<T> = (0..k)
                .map(|i| {
                    let s_last = te.vector(i)[alpha.len() - 1];
                    let res = (b * s_last).abs();
                    worst = worst.max(res / te.values[i].abs().max(T::one()));
                    res
                })
                .collect();
            last_resid = worst;
            let enough = alpha.len() >= opts.n_eigs || b <= tiny * scale;
            if (enough && worst <= opts.tol) || b <= tiny * scale || j + 1 == max_iter {
                if worst > opts.tol && b > tiny * scale {
                    return Err(Error::NonConvergence {
                        iterations: j + 1,
                        residual: worst.to_f64_lossy(),
                    });
                }
                let vectors = (0..k)
                    .map(|i| {
                        let s = te.vector(i);
                        let mut y = vec![T::zero(); n];
                        for (q, &si) in basis.iter().zip(s) {
                            axpy(si, q, &mut y);
                        }
                        let ny = dot(&y, &y).sqrt();
                        for yi in y.iter_mut() {
                            *yi /= ny;
                        }
                        y
                    })
                    .collect();
                return Ok(LanczosResult {
                    values: te.values[..k].to_vec(),
                    vectors,
                    residuals: resid,
                    iterations: j + 1,
                });
            }
        }
        beta.push(b);
        let next: Vec<T> = w.iter().map(|&x| x / b).collect();
        basis.push(next);
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: last_resid.to_f64_lossy(),
    })
}
