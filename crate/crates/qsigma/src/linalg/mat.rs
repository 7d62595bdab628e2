use std::ops::{Index, IndexMut};

use num_traits::{Num, Zero};

use crate::scalar::{Real, C};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

/// Dense complex matrix.
pub type CMat<T> = Mat<C<T>>;

impl<E: Copy + Zero> Mat<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![E::zero(); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn data(&self) -> &[E] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [E] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [E] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Sub-matrix selected by row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }
}

impl<E: Copy + Num> Mat<E> {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { E::one() } else { E::zero() })
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let rrow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &r) in orow.iter_mut().zip(rrow) {
                    *o = *o + a * r;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[E]) -> Vec<E> {
        assert_eq!(self.cols, x.len(), "matvec shape");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(E::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_vec(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_vec(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        )
    }

    pub fn scale(&self, s: E) -> Self {
        Self::from_vec(self.rows, self.cols, self.data.iter().map(|&a| a * s).collect())
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r, c) = (self.rows * rhs.rows, self.cols * rhs.cols);
        Self::from_fn(r, c, |i, j| {
            self[(i / rhs.rows, j / rhs.cols)] * rhs[(i % rhs.rows, j % rhs.cols)]
        })
    }

    pub fn trace(&self) -> E {
        (0..self.rows.min(self.cols)).fold(E::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(blocks: &[Self]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)];
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }
}

impl<E> Index<(usize, usize)> for Mat<E> {
    type Output = E;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Mat<E> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mat<T> {
    pub fn frobenius(&self) -> T {
        self.data.iter().map(|&a| a * a).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &a| m.max(a.abs()))
    }

    pub fn to_complex(&self) -> CMat<T> {
        Mat::from_vec(
            self.rows,
            self.cols,
            self.data.iter().map(|&a| C::new(a, T::zero())).collect(),
        )
    }

    /// Largest deviation from symmetry.
    pub fn asymmetry(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.rows {
            for j in 0..i {
                m = m.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        m
    }
}

impl<T: Real> Mat<C<T>> {
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_vec(self.rows, self.cols, self.data.iter().map(|a| a.conj()).collect())
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, a| m.max(a.norm()))
    }

    /// Largest deviation from Hermiticity.
    pub fn anti_hermiticity(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.rows {
            for j in 0..=i {
                m = m.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        m
    }

    /// `‖U†U − 1‖_max`.
    pub fn unitarity_defect(&self) -> T {
        let p = self.adjoint().matmul(self);
        let mut m = T::zero();
        for i in 0..p.rows {
            for j in 0..p.cols {
                let target = if i == j { T::one() } else { T::zero() };
                m = m.max((p[(i, j)] - C::new(target, T::zero())).norm());
            }
        }
        m
    }

    pub fn re(&self) -> Mat<T> {
        Mat::from_vec(self.rows, self.cols, self.data.iter().map(|a| a.re).collect())
    }

    pub fn im(&self) -> Mat<T> {
        Mat::from_vec(self.rows, self.cols, self.data.iter().map(|a| a.im).collect())
    }

    /// `Tr(self† · rhs)`.
    pub fn inner(&self, rhs: &Self) -> C<T> {
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(C::zero(), |acc, (a, b)| acc + a.conj() * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_and_matmul_agree() {
        let a = Mat::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let b = Mat::from_vec(2, 2, vec![0.0, 1.0, 1.0, 0.0]);
        let ab = a.kron(&b);
        assert_eq!(ab[(0, 1)], 1.0);
        assert_eq!(ab[(2, 3)], 4.0);
        let left = a.kron(&b).matmul(&b.kron(&a));
        let right = a.matmul(&b).kron(&b.matmul(&a));
        assert!(left.sub(&right).frobenius() < 1e-12);
    }

    #[test]
    fn direct_sum_places_blocks() {
        let a = Mat::<f64>::identity(2);
        let b = Mat::from_vec(1, 1, vec![5.0]);
        let s = Mat::direct_sum(&[a, b]);
        assert_eq!(s[(2, 2)], 5.0);
        assert_eq!(s[(0, 2)], 0.0);
    }
}
