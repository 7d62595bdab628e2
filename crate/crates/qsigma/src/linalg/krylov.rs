//! Krylov approximation of `exp(-i t H) ψ` for real symmetric `H`.

use crate::error::{Error, Result};
use crate::linalg::eigen::tridiagonal_eigen;
use crate::linalg::sparse::Csr;
use crate::scalar::{Real, C};

fn cdot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter()
        .zip(b)
        .fold(C::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

fn cnorm<T: Real>(a: &[C<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Advances `psi` by `exp(-i t H)` with adaptive sub-steps, each built from an
/// `m`-dimensional Lanczos basis and accepted when the a-posteriori error
/// estimate falls below `tol`.
pub fn expm_krylov<T: Real>(h: &Csr<T>, psi: &[C<T>], t: T, m: usize, tol: T) -> Result<Vec<C<T>>> {
    let n = h.dim();
    if psi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: psi.len(),
        });
    }
    let mut out = psi.to_vec();
    if t == T::zero() {
        return Ok(out);
    }
    let m = m.max(2).min(n);
    let sign = if t < T::zero() { -T::one() } else { T::one() };
    let mut remaining = t.abs();
    let mut tau = remaining;
    let mut w = vec![C::new(T::zero(), T::zero()); n];
    let mut guard = 0usize;
    while remaining > T::zero() {
        guard += 1;
        if guard > 100_000 {
            return Err(Error::NonConvergence {
                iterations: guard,
                residual: remaining.to_f64_lossy(),
            });
        }
        let nrm = cnorm(&out);
        let mut basis: Vec<Vec<C<T>>> = vec![out.iter().map(|z| *z / nrm).collect()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<T> = Vec::with_capacity(m);
        let mut b_last = T::zero();
        for j in 0..m {
            h.matvec_complex(&basis[j], &mut w);
            let a = cdot(&basis[j], &w).re;
            alpha.push(a);
            for (wi, qi) in w.iter_mut().zip(&basis[j]) {
                *wi -= *qi * a;
            }
            if j > 0 {
                let bprev = beta[j - 1];
                for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                    *wi -= *qi * bprev;
                }
            }
            for q in &basis {
                let ov = cdot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= *qi * ov;
                }
            }
            let b = cnorm(&w);
            b_last = b;
            if j + 1 == m || b <= T::lit(1e-14) {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|z| *z / b).collect());
        }
        let k = alpha.len();
        let te = tridiagonal_eigen(&alpha, &beta[..k - 1])?;
        loop {
            let step = tau.min(remaining);
            // coefficients c = exp(-i step T) e_1
            let mut coef = vec![C::new(T::zero(), T::zero()); k];
            for (l, &lam) in te.values.iter().enumerate() {
                let v = te.vector(l);
                let (s, cth) = (sign * lam * step).sin_cos();
                let ph = C::new(cth, -s) * v[0];
                for (ci, &vi) in coef.iter_mut().zip(v) {
                    *ci += ph * vi;
                }
            }
            let err = b_last * coef[k - 1].norm();
            if err <= tol || b_last <= T::lit(1e-14) || k == n {
                let mut next = vec![C::new(T::zero(), T::zero()); n];
                for (q, &cq) in basis.iter().zip(&coef) {
                    let cq = cq * nrm;
                    for (o, &qi) in next.iter_mut().zip(q) {
                        *o += qi * cq;
                    }
                }
                out = next;
                remaining -= step;
                if err < tol * T::lit(0.01) {
                    tau = step * T::lit(1.5);
                }
                break;
            }
            tau = step * T::lit(0.5);
        }
    }
    Ok(out)
}
