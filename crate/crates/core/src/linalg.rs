//! Dense row-major matrices and compressed sparse row operators.
//!
//! Everything here is generic over [`Scalar`] so the same operator code runs in
//! single and double precision. Boolean relations use [`BoolCsr`], which carries
//! no values and can be applied to any scalar signal.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from row-major data. Panics if the length does not match.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Column vector from a slice.
    pub fn column(values: &[T]) -> Self {
        Self::from_vec(values.len(), 1, values.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// `self * rhs`
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
            for (k, &a) in self.row(r).iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^T * rhs`
    pub fn t_matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "t_matmul shape mismatch");
        let mut out = Self::zeros(self.cols, rhs.cols);
        for k in 0..self.rows {
            let b_row = rhs.row(k);
            for (r, &a) in self.row(k).iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self * rhs^T`
    pub fn matmul_t(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols, "matmul_t shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.rows);
        for r in 0..self.rows {
            let a_row = self.row(r);
            for c in 0..rhs.rows {
                out.data[r * rhs.rows + c] = a_row.iter().zip(rhs.row(c)).map(|(&a, &b)| a * b).sum();
            }
        }
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.shape(), other.shape(), "add shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// Adds `row` to every row.
    pub fn add_row_broadcast(&mut self, row: &[T]) {
        assert_eq!(row.len(), self.cols, "broadcast width mismatch");
        for r in 0..self.rows {
            for (a, &b) in self.row_mut(r).iter_mut().zip(row) {
                *a += b;
            }
        }
    }

    pub fn scale(&mut self, s: T) {
        for a in &mut self.data {
            *a *= s;
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn column_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.cols];
        for r in 0..self.rows {
            for (s, &v) in sums.iter_mut().zip(self.row(r)) {
                *s += v;
            }
        }
        sums
    }

    /// Rows permuted so that output row `i` is input row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rows);
        let mut data = Vec::with_capacity(self.data.len());
        for &p in perm {
            data.extend_from_slice(self.row(p));
        }
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape());
        self.data.iter().zip(&other.data).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn cast<U: Scalar>(&self) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| U::from_f64_lossy(v.to_f64_lossy())).collect() }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Sparse boolean matrix in CSR layout. Column indices within a row are sorted and unique.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoolCsr {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
}

impl BoolCsr {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self { rows, cols, indptr: vec![0; rows + 1], indices: Vec::new() }
    }

    /// Builds the matrix from (row, col) pairs; duplicates collapse.
    pub fn from_pairs(rows: usize, cols: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        let mut indptr = vec![0; rows + 1];
        let mut indices = Vec::with_capacity(pairs.len());
        for &(r, c) in &pairs {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            indptr[r + 1] += 1;
            indices.push(c);
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        Self { rows, cols, indptr, indices }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.indices[self.indptr[r]..self.indptr[r + 1]]
    }

    pub fn contains(&self, r: usize, c: usize) -> bool {
        self.row(r).binary_search(&c).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).iter().map(move |&c| (r, c)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_pairs(self.cols, self.rows, self.iter().map(|(r, c)| (c, r)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && *self == self.transpose()
    }

    /// Element-wise OR.
    pub fn union(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_pairs(self.rows, self.cols, self.iter().chain(other.iter()))
    }

    pub fn to_dense(&self) -> Vec<Vec<bool>> {
        let mut dense = vec![vec![false; self.cols]; self.rows];
        for (r, c) in self.iter() {
            dense[r][c] = true;
        }
        dense
    }

    /// Row `r` of the result is the sum of the rows of `x` selected by row `r` of `self`.
    pub fn apply<T: Scalar>(&self, x: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, x.rows(), "operator/signal shape mismatch");
        let mut out = Matrix::zeros(self.rows, x.cols());
        for r in 0..self.rows {
            for &c in self.row(r) {
                let src = x.row(c).to_vec();
                for (o, v) in out.row_mut(r).iter_mut().zip(src) {
                    *o += v;
                }
            }
        }
        out
    }

    pub fn to_weighted<T: Scalar>(&self) -> SparseMatrix<T> {
        SparseMatrix::from_triplets(self.rows, self.cols, self.iter().map(|(r, c)| (r, c, T::one())))
    }
}

/// Sparse real matrix in CSR layout; duplicate triplets are summed.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut trip: Vec<(usize, usize, T)> = triplets.into_iter().collect();
        trip.sort_by_key(|t| (t.0, t.1));
        let mut indptr = vec![0; rows + 1];
        let mut indices: Vec<usize> = Vec::with_capacity(trip.len());
        let mut values: Vec<T> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            indptr[r + 1] += 1;
            indices.push(c);
            values.push(v);
            last = Some((r, c));
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        Self { rows, cols, indptr, indices, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&c) {
            Ok(pos) => self.values[span.start + pos],
            Err(_) => T::zero(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.iter().map(|(r, c, v)| (c, r, v)))
    }

    /// Divides every row by its sum (rows summing to zero are left untouched).
    pub fn row_normalized(&self) -> Self {
        let mut out = self.clone();
        for r in 0..self.rows {
            let span = self.indptr[r]..self.indptr[r + 1];
            let s: T = self.values[span.clone()].iter().copied().sum();
            if s != T::zero() {
                for v in &mut out.values[span] {
                    *v /= s;
                }
            }
        }
        out
    }

    /// `self * x`
    pub fn apply(&self, x: &Matrix<T>) -> Matrix<T> {
        self.apply_blocks(x, 1)
    }

    /// `self^T * x`
    pub fn apply_transpose(&self, x: &Matrix<T>) -> Matrix<T> {
        self.apply_transpose_blocks(x, 1)
    }

    /// Applies `self` to each of `blocks` equally tall row blocks of `x` stacked vertically.
    pub fn apply_blocks(&self, x: &Matrix<T>, blocks: usize) -> Matrix<T> {
        assert_eq!(self.cols * blocks, x.rows(), "operator/signal shape mismatch");
        let f = x.cols();
        let mut out = Matrix::zeros(self.rows * blocks, f);
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for b in 0..blocks {
            let (xo, oo) = (b * self.cols * f, b * self.rows * f);
            for r in 0..self.rows {
                let dst = oo + r * f;
                for k in self.indptr[r]..self.indptr[r + 1] {
                    let (src, v) = (xo + self.indices[k] * f, self.values[k]);
                    for q in 0..f {
                        os[dst + q] += v * xs[src + q];
                    }
                }
            }
        }
        out
    }

    /// Blockwise `self^T * x`, the adjoint of [`Self::apply_blocks`].
    pub fn apply_transpose_blocks(&self, x: &Matrix<T>, blocks: usize) -> Matrix<T> {
        assert_eq!(self.rows * blocks, x.rows(), "operator/signal shape mismatch");
        let f = x.cols();
        let mut out = Matrix::zeros(self.cols * blocks, f);
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for b in 0..blocks {
            let (xo, oo) = (b * self.rows * f, b * self.cols * f);
            for r in 0..self.rows {
                let src = xo + r * f;
                for k in self.indptr[r]..self.indptr[r + 1] {
                    let (dst, v) = (oo + self.indices[k] * f, self.values[k]);
                    for q in 0..f {
                        os[dst + q] += v * xs[src + q];
                    }
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }
}
