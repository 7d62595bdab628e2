//! Dense symmetric and Hermitian eigensolvers.
//!
//! Householder tridiagonalization followed by implicit QL with Wilkinson
//! shifts (the EISPACK `tred2`/`tql2` pair). Hermitian problems are solved
//! through the real symmetric embedding `[[A, -B], [B, A]]` of `A + iB`.

use crate::error::{Error, Result};
use crate::linalg::mat::{CMat, Mat};
use crate::scalar::{Real, C};

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    /// Row `j` holds the unit eigenvector for `values[j]`.
    vectors: Mat<T>,
}

impl<T: Real> SymEigen<T> {
    #[inline]
    pub fn vector(&self, j: usize) -> &[T] {
        self.vectors.row(j)
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvectors as matrix columns.
    pub fn vector_matrix(&self) -> Mat<T> {
        self.vectors.transpose()
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<C<T>>>,
}

impl<T: Real> HermEigen<T> {
    /// Eigenvectors as matrix columns.
    pub fn vector_matrix(&self) -> CMat<T> {
        let n = self.values.len();
        Mat::from_fn(n, n, |i, j| self.vectors[j][i])
    }

    /// `f(H) = V diag(f(λ)) V†`.
    pub fn apply_fn(&self, f: impl Fn(T) -> C<T>) -> CMat<T> {
        let n = self.values.len();
        let mut out = Mat::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let fk = f(lam);
            let v = &self.vectors[k];
            for i in 0..n {
                let a = v[i] * fk;
                for j in 0..n {
                    out[(i, j)] += a * v[j].conj();
                }
            }
        }
        out
    }
}

fn tred2<T: Real>(v: &mut Mat<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
                v[(j, i)] = T::zero();
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let t = v[(k, j)] - (f * e[k] + g * d[k]);
                    v[(k, j)] = t;
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    let t = v[(k, j)] - g * d[k];
                    v[(k, j)] = t;
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = T::zero();
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

/// Implicit QL on a tridiagonal matrix. `zt` holds the accumulated
/// transformation transposed: row `k` is the `k`-th basis vector.
fn tql2<T: Real>(d: &mut [T], e: &mut [T], zt: &mut Mat<T>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let eps = T::epsilon();
    let two = T::lit(2.0);
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let width = zt.cols();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        let m = m.min(n - 1);
        if m > l {
            let mut iter = 0usize;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NonConvergence {
                        iterations: iter,
                        residual: e[l].abs().to_f64_lossy(),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    // rotate basis vectors i and i+1
                    let (lo, hi) = zt.data_mut().split_at_mut((i + 1) * width);
                    let zi = &mut lo[i * width..];
                    let zi1 = &mut hi[..width];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let hb = *b;
                        *b = s * *a + c * hb;
                        *a = c * *a - s * hb;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 || !e[l].is_finite() {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}

fn sorted<T: Real>(d: Vec<T>, zt: Mat<T>) -> SymEigen<T> {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let w = zt.cols();
    let mut data = Vec::with_capacity(n * w);
    for &i in &order {
        data.extend_from_slice(zt.row(i));
    }
    SymEigen {
        values,
        vectors: Mat::from_vec(n, w, data),
    }
}

/// Full eigen-decomposition of a real symmetric matrix (lower triangle used).
pub fn sym_eigen<T: Real>(a: &Mat<T>) -> Result<SymEigen<T>> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.cols(),
        });
    }
    if n == 0 {
        return Ok(SymEigen {
            values: vec![],
            vectors: Mat::zeros(0, 0),
        });
    }
    let mut v = Mat::from_fn(n, n, |i, j| if i >= j { a[(i, j)] } else { a[(j, i)] });
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(&mut v, &mut d, &mut e);
    let mut zt = v.transpose();
    tql2(&mut d, &mut e, &mut zt)?;
    Ok(sorted(d, zt))
}

/// Eigenvalues and vectors of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta` (`beta.len() == alpha.len() - 1`).
pub fn tridiagonal_eigen<T: Real>(alpha: &[T], beta: &[T]) -> Result<SymEigen<T>> {
    let n = alpha.len();
    let mut d = alpha.to_vec();
    let mut e = vec![T::zero(); n];
    for (i, &b) in beta.iter().enumerate().take(n.saturating_sub(1)) {
        e[i + 1] = b;
    }
    let mut zt = Mat::identity(n);
    tql2(&mut d, &mut e, &mut zt)?;
    Ok(sorted(d, zt))
}

/// Full eigen-decomposition of a Hermitian matrix.
pub fn herm_eigen<T: Real>(h: &CMat<T>) -> Result<HermEigen<T>> {
    let n = h.rows();
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: h.cols(),
        });
    }
    let im_max = h.data().iter().fold(T::zero(), |m, z| m.max(z.im.abs()));
    if im_max == T::zero() {
        let se = sym_eigen(&h.re())?;
        let vectors = (0..n)
            .map(|k| se.vector(k).iter().map(|&x| C::new(x, T::zero())).collect())
            .collect();
        return Ok(HermEigen {
            values: se.values,
            vectors,
        });
    }
    let big = Mat::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, ii) = (i / n, i % n);
        let (bj, jj) = (j / n, j % n);
        let z = h[(ii, jj)];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    let se = sym_eigen(&big)?;
    // each eigenvalue appears twice; pick an orthonormal complex set
    let mut values = Vec::with_capacity(n);
    let mut vectors: Vec<Vec<C<T>>> = Vec::with_capacity(n);
    let half = T::lit(0.5);
    for k in 0..2 * n {
        if vectors.len() == n {
            break;
        }
        let r = se.vector(k);
        let mut z: Vec<C<T>> = (0..n).map(|i| C::new(r[i], r[i + n])).collect();
        for _ in 0..2 {
            for u in &vectors {
                let ov = u
                    .iter()
                    .zip(&z)
                    .fold(C::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
                for (zi, ui) in z.iter_mut().zip(u) {
                    *zi -= ov * ui;
                }
            }
        }
        let norm = z.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if norm > half {
            for zi in z.iter_mut() {
                *zi = *zi / norm;
            }
            values.push(se.values[k]);
            vectors.push(z);
        }
    }
    if vectors.len() != n {
        return Err(Error::NonConvergence {
            iterations: 0,
            residual: f64::NAN,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(HermEigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: order.iter().map(|&i| vectors[i].clone()).collect(),
    })
}

/// Eigenvalues only of a Hermitian matrix.
pub fn herm_eigenvalues<T: Real>(h: &CMat<T>) -> Result<Vec<T>> {
    Ok(herm_eigen(h)?.values)
}

/// Spectral norm of a Hermitian matrix.
pub fn herm_norm<T: Real>(h: &CMat<T>) -> Result<T> {
    let v = herm_eigenvalues(h)?;
    Ok(v.iter().fold(T::zero(), |m, x| m.max(x.abs())))
}

/// Trace norm of a Hermitian matrix.
pub fn herm_trace_norm<T: Real>(h: &CMat<T>) -> Result<T> {
    Ok(herm_eigenvalues(h)?.iter().map(|x| x.abs()).sum())
}

/// Principal square root of a positive semidefinite Hermitian matrix
/// (negative round-off eigenvalues clipped to zero).
pub fn psd_sqrt<T: Real>(h: &CMat<T>) -> Result<CMat<T>> {
    let e = herm_eigen(h)?;
    Ok(e.apply_fn(|l| C::new(l.max(T::zero()).sqrt(), T::zero())))
}

/// `exp(-i t H)` for Hermitian `H`.
pub fn expm_hermitian<T: Real>(h: &CMat<T>, t: T) -> Result<CMat<T>> {
    let e = herm_eigen(h)?;
    Ok(e.apply_fn(|l| {
        let (s, c) = (l * t).sin_cos();
        C::new(c, -s)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(n: usize, seed: u64) -> Mat<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = rng.random_range(-1.0..1.0);
                a[(i, j)] = x;
                a[(j, i)] = x;
            }
        }
        a
    }

    #[test]
    fn symmetric_residuals_small() {
        for &n in &[1usize, 2, 5, 64] {
            let a = random_sym(n, n as u64);
            let e = sym_eigen(&a).unwrap();
            for k in 0..n {
                let v = e.vector(k);
                let av = a.matvec(v);
                let r: f64 = av
                    .iter()
                    .zip(v)
                    .map(|(x, y)| (x - e.values[k] * y).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(r < 1e-10, "n={n} k={k} r={r}");
            }
            for w in e.values.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn tridiagonal_matches_known_spectrum() {
        // path graph Laplacian-like: eigenvalues 2 - 2cos(k pi/(n+1))
        let n = 12;
        let alpha = vec![2.0; n];
        let beta = vec![-1.0; n - 1];
        let e = tridiagonal_eigen(&alpha, &beta).unwrap();
        for (k, &lam) in e.values.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((lam - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn hermitian_handles_degenerate_complex_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 6;
        let mut h = CMat::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let z = if i == j {
                    C::new(rng.random_range(-1.0..1.0), 0.0)
                } else {
                    C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                };
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        // direct sum with itself forces exact degeneracy
        let hh = Mat::direct_sum(&[h.clone(), h]);
        let e = herm_eigen(&hh).unwrap();
        let v = e.vector_matrix();
        assert!(v.unitarity_defect() < 1e-10);
        let rebuilt = e.apply_fn(|l| C::new(l, 0.0));
        assert!(rebuilt.sub(&hh).frobenius() < 1e-10);
    }

    #[test]
    fn f32_path_works() {
        let a = random_sym(8, 1);
        let a32 = Mat::from_fn(8, 8, |i, j| a[(i, j)] as f32);
        let e64 = sym_eigen(&a).unwrap();
        let e32 = sym_eigen(&a32).unwrap();
        for (x, y) in e64.values.iter().zip(&e32.values) {
            assert!((x - *y as f64).abs() < 1e-4);
        }
    }
}
