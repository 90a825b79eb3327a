//! Row-major dense matrix.
//!
//! Column `j` of a data matrix is snapshot `j`; rows are state/observable
//! components. Products come in the three orientations the training loops
//! need (`A B`, `A Bᵀ`, `Aᵀ B`) so no explicit transposes are materialized
//! on hot paths. Products above a size threshold are parallelized across
//! output rows; each row is accumulated sequentially in index order, which
//! keeps results bit-identical regardless of the thread count.

use rayon::prelude::*;

use crate::error::NumError;
use crate::scalar::Real;

/// Flop threshold above which products use the rayon row-parallel path.
const PAR_FLOPS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Build from a row-major data vector. Panics if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "data length {} does not match {rows}x{cols}",
            data.len()
        );
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Build from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    /// Column vector from a slice.
    pub fn col_vector(v: &[T]) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
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
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[T]) {
        assert_eq!(v.len(), self.rows);
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    /// Copy of the columns `idx` in the given order.
    pub fn select_cols(&self, idx: &[usize]) -> Matrix<T> {
        let mut out = Matrix::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            let src = self.row(i);
            let dst = out.row_mut(i);
            for (k, &j) in idx.iter().enumerate() {
                dst[k] = src[j];
            }
        }
        out
    }

    /// Stack blocks vertically; all blocks must share the column count.
    pub fn vstack(blocks: &[&Matrix<T>]) -> Matrix<T> {
        assert!(!blocks.is_empty());
        let cols = blocks[0].cols;
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            data.extend_from_slice(&b.data);
        }
        Matrix { rows, cols, data }
    }

    /// Rows `r0..r1` as a new matrix.
    pub fn row_block(&self, r0: usize, r1: usize) -> Matrix<T> {
        assert!(r0 <= r1 && r1 <= self.rows);
        Matrix {
            rows: r1 - r0,
            cols: self.cols,
            data: self.data[r0 * self.cols..r1 * self.cols].to_vec(),
        }
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(T) -> T + Sync) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Matrix<T> {
        self.map(|x| x * s)
    }

    pub fn scale_mut(&mut self, s: T) {
        for x in &mut self.data {
            *x *= s;
        }
    }

    pub fn add(&self, other: &Matrix<T>) -> Matrix<T> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix<T>) -> Matrix<T> {
        self.zip(other, |a, b| a - b)
    }

    pub fn add_assign(&mut self, other: &Matrix<T>) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: T, other: &Matrix<T>) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + s * b;
        }
    }

    fn zip(&self, other: &Matrix<T>, f: impl Fn(T, T) -> T) -> Matrix<T> {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "elementwise shape mismatch"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn fro_norm(&self) -> T {
        self.data
            .iter()
            .map(|&x| x * x)
            .fold(T::zero(), |acc, v| acc + v)
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    /// Frobenius inner product `<self, other>`.
    pub fn dot(&self, other: &Matrix<T>) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a * b)
            .fold(T::zero(), |acc, v| acc + v)
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().copied().fold(T::zero(), |a, v| a + v))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn shape_err(&self, op: &'static str, expect: (usize, usize)) -> NumError {
        NumError::dim(
            op,
            format!(
                "got {}x{}, expected {}x{}",
                self.rows, self.cols, expect.0, expect.1
            ),
        )
    }

    /// `self * other`.
    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(
            self.cols, other.rows,
            "matmul inner dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let mut out = Matrix::zeros(m, n);
        let run_row = |i: usize, out_row: &mut [T]| {
            let a_row = self.row(i);
            for (p, &a) in a_row.iter().enumerate() {
                if a != T::zero() {
                    let b_row = other.row(p);
                    for (o, &b) in out_row.iter_mut().zip(b_row) {
                        *o = *o + a * b;
                    }
                }
            }
        };
        if m * k * n >= PAR_FLOPS && m > 1 {
            out.data
                .par_chunks_mut(n)
                .enumerate()
                .for_each(|(i, row)| run_row(i, row));
        } else {
            for i in 0..m {
                let row = &mut out.data[i * n..(i + 1) * n];
                run_row(i, row);
            }
        }
        out
    }

    /// `self * otherᵀ` without materializing the transpose.
    pub fn mul_transpose_b(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(
            self.cols, other.cols,
            "mul_transpose_b inner dimension mismatch: {}x{} * ({}x{})ᵀ",
            self.rows, self.cols, other.rows, other.cols
        );
        let (m, k, n) = (self.rows, self.cols, other.rows);
        let mut out = Matrix::zeros(m, n);
        let run_row = |i: usize, out_row: &mut [T]| {
            let a_row = self.row(i);
            for (j, o) in out_row.iter_mut().enumerate() {
                let b_row = other.row(j);
                let mut acc = T::zero();
                for (&a, &b) in a_row.iter().zip(b_row) {
                    acc = acc + a * b;
                }
                *o = acc;
            }
        };
        if m * k * n >= PAR_FLOPS && m > 1 {
            out.data
                .par_chunks_mut(n)
                .enumerate()
                .for_each(|(i, row)| run_row(i, row));
        } else {
            for i in 0..m {
                let row = &mut out.data[i * n..(i + 1) * n];
                run_row(i, row);
            }
        }
        out
    }

    /// `selfᵀ * other` without materializing the transpose.
    pub fn tr_mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(
            self.rows, other.rows,
            "tr_mul inner dimension mismatch: ({}x{})ᵀ * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let (m, k, n) = (self.cols, self.rows, other.cols);
        let mut out = Matrix::zeros(m, n);
        // out[i, :] = sum_p self[p, i] * other[p, :]; row-parallel over out.
        let run_row = |i: usize, out_row: &mut [T]| {
            for p in 0..k {
                let a = self[(p, i)];
                if a != T::zero() {
                    let b_row = other.row(p);
                    for (o, &b) in out_row.iter_mut().zip(b_row) {
                        *o = *o + a * b;
                    }
                }
            }
        };
        if m * k * n >= PAR_FLOPS && m > 1 {
            out.data
                .par_chunks_mut(n.max(1))
                .enumerate()
                .for_each(|(i, row)| run_row(i, row));
        } else {
            for i in 0..m {
                let row = &mut out.data[i * n..(i + 1) * n];
                run_row(i, row);
            }
        }
        out
    }

    /// `self * v` for a vector `v`.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a * b)
                    .fold(T::zero(), |acc, x| acc + x)
            })
            .collect()
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    type M = Matrix<f64>;

    fn random(rows: usize, cols: usize, seed: u64) -> M {
        let mut r = SplitMix64::new(seed);
        M::from_fn(rows, cols, |_, _| r.uniform_in(-1.0, 1.0))
    }

    #[test]
    fn identity_mul() {
        let a = random(4, 7, 1);
        let i = M::identity(4);
        assert_eq!(i.mul(&a), a);
    }

    #[test]
    fn product_orientations_agree() {
        let a = random(5, 8, 2);
        let b = random(8, 3, 3);
        let ab = a.mul(&b);
        let via_tr = a.mul_transpose_b(&b.transpose());
        let via_trmul = a.transpose().tr_mul(&b);
        for i in 0..5 {
            for j in 0..3 {
                assert!((ab[(i, j)] - via_tr[(i, j)]).abs() < 1e-14);
                assert!((ab[(i, j)] - via_trmul[(i, j)]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn parallel_path_matches_serial() {
        // Big enough to cross PAR_FLOPS.
        let a = random(64, 200, 4);
        let b = random(200, 120, 5);
        let big = a.mul(&b);
        // Reference: plain triple loop.
        let mut reference = M::zeros(64, 120);
        for i in 0..64 {
            for k in 0..200 {
                for j in 0..120 {
                    reference[(i, j)] += a[(i, k)] * b[(k, j)];
                }
            }
        }
        assert_eq!(big, reference);
    }

    #[test]
    fn vstack_and_row_block() {
        let a = random(2, 4, 6);
        let b = random(3, 4, 7);
        let s = M::vstack(&[&a, &b]);
        assert_eq!(s.rows(), 5);
        assert_eq!(s.row_block(0, 2), a);
        assert_eq!(s.row_block(2, 5), b);
    }

    #[test]
    fn row_sums_and_norms() {
        let m = M::from_rows(&[vec![1.0, 2.0], vec![-3.0, 4.0]]);
        assert_eq!(m.row_sums(), vec![3.0, 1.0]);
        assert!((m.fro_norm() - 30.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.max_abs(), 4.0);
    }
}
