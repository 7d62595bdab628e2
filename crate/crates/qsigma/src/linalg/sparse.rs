use rayon::prelude::*;

use crate::linalg::mat::Mat;
use crate::scalar::{Real, C};

/// Real linear operator acting on vectors of length `dim`.
pub trait LinearOperator<T: Real>: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[T], y: &mut [T]);
}

/// Compressed sparse row matrix with real entries.
///
/// Hamiltonians here are real symmetric, so both triangles are stored and a
/// complex vector is handled by applying the matrix to its real and imaginary
/// parts.
#[derive(Clone, Debug, PartialEq)]
pub struct Csr<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<T>,
}

const PAR_ROWS: usize = 1 << 14;

impl<T: Real> Csr<T> {
    /// Builds from (row, col, value) triplets; duplicates are summed and exact
    /// zeros dropped.
    pub fn from_triplets(n: usize, mut trips: Vec<(usize, usize, T)>) -> Self {
        assert!(n < u32::MAX as usize, "dimension exceeds u32 indexing");
        trips.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(trips.len());
        let mut vals: Vec<T> = Vec::with_capacity(trips.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows_of = Vec::with_capacity(trips.len());
        for (r, c, v) in trips {
            assert!(r < n && c < n, "triplet index out of range");
            if last == Some((r, c)) {
                *vals.last_mut().expect("nonempty") += v;
            } else {
                cols.push(c as u32);
                vals.push(v);
                rows_of.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_cols = Vec::with_capacity(cols.len());
        let mut keep_vals = Vec::with_capacity(vals.len());
        for ((c, v), r) in cols.into_iter().zip(vals).zip(rows_of) {
            if v != T::zero() {
                keep_cols.push(c);
                keep_vals.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            cols: keep_cols,
            vals: keep_vals,
        }
    }

    /// Builds row by row; `row(i)` returns the (column, value) entries of
    /// row `i` in any order, duplicates allowed.
    pub fn from_row_fn<F>(n: usize, row: F) -> Self
    where
        F: Fn(usize) -> Vec<(usize, T)> + Sync,
    {
        assert!(n < u32::MAX as usize, "dimension exceeds u32 indexing");
        let rows: Vec<Vec<(u32, T)>> = (0..n)
            .into_par_iter()
            .with_min_len(256)
            .map(|i| {
                let mut r = row(i);
                r.sort_by_key(|e| e.0);
                let mut out: Vec<(u32, T)> = Vec::with_capacity(r.len());
                for (c, v) in r {
                    match out.last_mut() {
                        Some(last) if last.0 as usize == c => last.1 += v,
                        _ => out.push((c as u32, v)),
                    }
                }
                out.retain(|e| e.1 != T::zero());
                out
            })
            .collect();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let nnz: usize = rows.iter().map(|r| r.len()).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        for r in rows {
            for (c, v) in r {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            row_ptr: vec![0; n + 1],
            cols: vec![],
            vals: vec![],
        }
    }

    pub fn diagonal_matrix(d: &[T]) -> Self {
        Self::from_triplets(d.len(), d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Iterates the stored entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[a..b]
            .iter()
            .zip(&self.vals[a..b])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.row(i)
            .find(|&(c, _)| c == j)
            .map(|(_, v)| v)
            .unwrap_or_else(T::zero)
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Coordinate list `(row, col, value)`.
    pub fn triplets(&self) -> Vec<(usize, usize, T)> {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .collect()
    }

    pub fn to_dense(&self) -> Mat<T> {
        let mut m = Mat::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.n, self.triplets().into_iter().map(|(i, j, v)| (j, i, v)).collect())
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        for v in out.vals.iter_mut() {
            *v *= s;
        }
        out
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        assert_eq!(self.n, other.n);
        let mut trips: Vec<_> = self.triplets().into_iter().map(|(i, j, v)| (i, j, a * v)).collect();
        trips.extend(other.triplets().into_iter().map(|(i, j, v)| (i, j, b * v)));
        Self::from_triplets(self.n, trips)
    }

    /// Largest `|A_ij − A_ji|`.
    pub fn asymmetry(&self) -> T {
        let t = self.transpose();
        let d = self.combine(T::one(), &t, -T::one());
        d.vals.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> T {
        self.vals.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// Sparse product `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Self::from_row_fn(self.n, |i| {
            let mut out = Vec::new();
            for (k, a) in self.row(i) {
                for (j, b) in rhs.row(k) {
                    out.push((j, a * b));
                }
            }
            out
        })
    }

    /// `self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).combine(T::one(), &rhs.matmul(self), -T::one())
    }

    #[inline]
    fn row_dot(&self, i: usize, x: &[T]) -> T {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        let mut acc = T::zero();
        for k in a..b {
            acc += self.vals[k] * x[self.cols[k] as usize];
        }
        acc
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        if self.n >= PAR_ROWS {
            y.par_chunks_mut(4096).enumerate().for_each(|(ci, chunk)| {
                let base = ci * 4096;
                for (k, yi) in chunk.iter_mut().enumerate() {
                    *yi = self.row_dot(base + k, x);
                }
            });
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = self.row_dot(i, x);
            }
        }
    }

    /// `y = A x` for complex `x`.
    pub fn matvec_complex(&self, x: &[C<T>], y: &mut [C<T>]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        let row = |i: usize| {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut acc = C::new(T::zero(), T::zero());
            for k in a..b {
                acc += x[self.cols[k] as usize] * self.vals[k];
            }
            acc
        };
        if self.n >= PAR_ROWS {
            y.par_chunks_mut(4096).enumerate().for_each(|(ci, chunk)| {
                let base = ci * 4096;
                for (k, yi) in chunk.iter_mut().enumerate() {
                    *yi = row(base + k);
                }
            });
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = row(i);
            }
        }
    }

    /// `⟨x|A|x⟩` for complex `x` (real because `A` is symmetric).
    pub fn expectation(&self, x: &[C<T>]) -> T {
        let mut y = vec![C::new(T::zero(), T::zero()); self.n];
        self.matvec_complex(x, &mut y);
        x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

impl<T: Real> LinearOperator<T> for Csr<T> {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        self.matvec(x, y)
    }
}

/// `diag + s·off`, applied without materializing the sum.
pub struct ShiftedSum<'a, T> {
    pub diag: &'a [T],
    pub off: &'a Csr<T>,
    pub s: T,
}

impl<T: Real> LinearOperator<T> for ShiftedSum<'_, T> {
    fn dim(&self) -> usize {
        self.diag.len()
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        self.off.matvec(x, y);
        for ((yi, &di), &xi) in y.iter_mut().zip(self.diag).zip(x) {
            *yi = *yi * self.s + di * xi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_merge_and_matvec() {
        let a = Csr::from_triplets(3, vec![(0, 1, 1.0), (0, 1, 1.0), (1, 0, 2.0), (2, 2, 3.0), (2, 0, 0.0)]);
        assert_eq!(a.nnz(), 3);
        let mut y = vec![0.0; 3];
        a.matvec(&[1.0, 1.0, 1.0], &mut y);
        assert_eq!(y, vec![2.0, 2.0, 3.0]);
        assert_eq!(a.asymmetry(), 0.0);
    }

    #[test]
    fn row_fn_matches_triplets() {
        let f = |i: usize| vec![(i, 1.0), ((i + 1) % 5, 0.5), ((i + 4) % 5, 0.5)];
        let a = Csr::from_row_fn(5, f);
        let mut t = vec![];
        for i in 0..5 {
            for (j, v) in f(i) {
                t.push((i, j, v));
            }
        }
        assert_eq!(a, Csr::from_triplets(5, t));
        let c = a.commutator(&a);
        assert_eq!(c.nnz(), 0);
    }
}
