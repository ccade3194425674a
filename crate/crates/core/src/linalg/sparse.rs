//! Compressed sparse row storage for complex matrices.
//!
//! Only the handful of operations the localizer needs are provided:
//! assembly from triplets, linear combinations, Kronecker products with small
//! dense factors, products, and conversion to and from `faer` dense matrices.

use faer::Mat;

use super::c64;

/// A complex matrix in CSR format. Column indices within a row are sorted and
/// unique; explicit zeros are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<c64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_triplets(
            diag.len(),
            diag.len(),
            diag.iter().enumerate().map(|(i, &v)| (i, i, c64::new(v, 0.0))),
        )
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// and entries that cancel to exactly zero are dropped.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, c64)>,
    {
        let mut rows: Vec<Vec<(usize, c64)>> = vec![Vec::new(); nrows];
        for (i, j, v) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) out of bounds");
            rows[i].push((j, v));
        }
        Self::from_rows(nrows, ncols, rows)
    }

    fn from_rows(nrows: usize, ncols: usize, rows: Vec<Vec<(usize, c64)>>) -> Self {
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut acc = c64::new(0.0, 0.0);
                while k < row.len() && row[k].0 == j {
                    acc += row[k].1;
                    k += 1;
                }
                if acc != c64::new(0.0, 0.0) {
                    indices.push(j);
                    values.push(acc);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        }
    }

    /// Converts a dense matrix, keeping entries with modulus above `drop_tol`.
    pub fn from_dense(m: &Mat<c64>, drop_tol: f64) -> Self {
        let mut trip = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v.norm() > drop_tol {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), trip)
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let mut out = Mat::<c64>::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            out[(i, j)] = v;
        }
        out
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[c64]) {
        let r = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[r.clone()], &self.values[r])
    }

    /// Iterates over stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, c64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => c64::new(0.0, 0.0),
        }
    }

    pub fn diagonal(&self) -> Vec<c64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.iter().all(|(i, j, _)| i == j)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// True when every stored entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.iter().map(|(i, j, v)| (j, i, v.conj())),
        )
    }

    /// `max |a_ij - conj(a_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, j, v) in self.iter() {
            worst = worst.max((v - self.get(j, i).conj()).norm());
        }
        worst
    }

    pub fn scale(&self, alpha: c64) -> Self {
        Self::from_triplets(
            self.nrows,
            self.ncols,
            self.iter().map(|(i, j, v)| (i, j, v * alpha)),
        )
    }

    /// Sum of `coeff * matrix` terms, all of the same shape.
    pub fn linear_combination(nrows: usize, ncols: usize, terms: &[(c64, &CsrMatrix)]) -> Self {
        let mut trip = Vec::new();
        for (alpha, m) in terms {
            assert_eq!((m.nrows, m.ncols), (nrows, ncols), "shape mismatch");
            trip.extend(m.iter().map(|(i, j, v)| (i, j, *alpha * v)));
        }
        Self::from_triplets(nrows, ncols, trip)
    }

    pub fn add(&self, other: &CsrMatrix) -> Self {
        let one = c64::new(1.0, 0.0);
        Self::linear_combination(self.nrows, self.ncols, &[(one, self), (one, other)])
    }

    pub fn sub(&self, other: &CsrMatrix) -> Self {
        Self::linear_combination(
            self.nrows,
            self.ncols,
            &[(c64::new(1.0, 0.0), self), (c64::new(-1.0, 0.0), other)],
        )
    }

    /// Kronecker product `self ⊗ small`, with `self` as the outer (major) index.
    pub fn kron_dense(&self, small: &Mat<c64>) -> Self {
        let (p, q) = (small.nrows(), small.ncols());
        let mut small_nz = Vec::new();
        for a in 0..p {
            for b in 0..q {
                let v = small[(a, b)];
                if v != c64::new(0.0, 0.0) {
                    small_nz.push((a, b, v));
                }
            }
        }
        let trip = self.iter().flat_map(|(i, j, v)| {
            small_nz
                .iter()
                .map(move |&(a, b, w)| (i * p + a, j * q + b, v * w))
        });
        Self::from_triplets(self.nrows * p, self.ncols * q, trip)
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.ncols, other.nrows, "inner dimension mismatch");
        let mut rows = Vec::with_capacity(self.nrows);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let mut acc: Vec<(usize, c64)> = Vec::new();
            for (&k, &a) in cols.iter().zip(vals) {
                let (cols2, vals2) = other.row(k);
                acc.extend(cols2.iter().zip(vals2).map(|(&j, &b)| (j, a * b)));
            }
            rows.push(acc);
        }
        Self::from_rows(self.nrows, other.ncols, rows)
    }

    /// `y = self * x`.
    pub fn matvec_into(&self, x: &[c64], y: &mut [c64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut acc = c64::new(0.0, 0.0);
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j];
            }
            *yi = acc;
        }
    }

    pub fn matvec(&self, x: &[c64]) -> Vec<c64> {
        let mut y = vec![c64::new(0.0, 0.0); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    /// Symmetric permutation `P A P^T` where `order[new] = old`.
    pub fn permute_symmetric(&self, order: &[usize]) -> Self {
        assert!(self.is_square() && order.len() == self.nrows);
        let mut inv = vec![0usize; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inv[old] = new;
        }
        Self::from_triplets(
            self.nrows,
            self.ncols,
            self.iter().map(|(i, j, v)| (inv[i], inv[j], v)),
        )
    }

    /// Dense copy of the sub-block `rows × cols` (half-open ranges).
    pub fn dense_block(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> Mat<c64> {
        let mut out = Mat::<c64>::zeros(rows.len(), cols.len());
        for i in rows.clone() {
            let (cs, vs) = self.row(i);
            let lo = cs.partition_point(|&j| j < cols.start);
            for k in lo..cs.len() {
                let j = cs[k];
                if j >= cols.end {
                    break;
                }
                out[(i - rows.start, j - cols.start)] = vs[k];
            }
        }
        out
    }
}
