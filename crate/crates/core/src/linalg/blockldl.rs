//! Inertia and solves for large sparse Hermitian matrices through a
//! block-tridiagonal `L D Lᴴ` factorization.
//!
//! Rows are grouped into blocks such that every nonzero couples a block only to
//! itself or to its neighbours. Eliminating blocks in order produces Schur
//! complements `S_k = A_kk - C_k S_{k-1}^{-1} C_kᴴ`, and by Haynsworth
//! additivity the inertia of the whole matrix is the sum of the inertias of
//! the `S_k`. Each `S_k` is factored with Bunch–Kaufman pivoting.

use std::collections::VecDeque;
use std::ops::Range;

use faer::Mat;

use super::c64;
use super::dense::{IndefiniteFactor, Inertia};
use super::krylov::HermitianOperator;
use super::CsrMatrix;
use crate::error::{Error, Result};

/// An ordering of the rows together with contiguous block boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    /// `order[new] = old`.
    pub order: Vec<usize>,
    /// Block `k` covers positions `starts[k]..starts[k + 1]` of `order`.
    pub starts: Vec<usize>,
}

impl BlockPartition {
    pub fn n_blocks(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn block(&self, k: usize) -> Range<usize> {
        self.starts[k]..self.starts[k + 1]
    }

    pub fn max_block(&self) -> usize {
        (0..self.n_blocks()).map(|k| self.block(k).len()).max().unwrap_or(0)
    }

    /// Estimated dense work, `Σ |b_k|³`.
    pub fn cost(&self) -> f64 {
        (0..self.n_blocks()).map(|k| (self.block(k).len() as f64).powi(3)).sum()
    }

    /// Expands a partition of `n` graph nodes to `n · r` rows, node `i`
    /// owning rows `i·r .. (i+1)·r`.
    pub fn expand(&self, r: usize) -> BlockPartition {
        BlockPartition {
            order: self
                .order
                .iter()
                .flat_map(|&i| (i * r)..(i * r + r))
                .collect(),
            starts: self.starts.iter().map(|&s| s * r).collect(),
        }
    }

    /// Merges runs of adjacent blocks while the merged size stays below `target`.
    pub fn coarsen(&self, target: usize) -> BlockPartition {
        let mut starts = vec![0];
        let mut current = 0;
        for k in 0..self.n_blocks() {
            let len = self.block(k).len();
            if current > 0 && current + len > target {
                starts.push(*starts.last().unwrap() + current);
                current = 0;
            }
            current += len;
        }
        if current > 0 {
            starts.push(*starts.last().unwrap() + current);
        }
        BlockPartition {
            order: self.order.clone(),
            starts,
        }
    }

    /// Checks that `m` (in original numbering) is block tridiagonal under this partition.
    pub fn is_block_tridiagonal(&self, m: &CsrMatrix) -> bool {
        let block_of = self.block_of_rows(m.nrows());
        m.iter()
            .all(|(i, j, _)| block_of[i].abs_diff(block_of[j]) <= 1)
    }

    /// Merges consecutive blocks until `m` is block tridiagonal. Each merged
    /// group is grown to absorb everything the previous group couples to.
    pub fn make_tridiagonal(&self, m: &CsrMatrix) -> BlockPartition {
        let nb = self.n_blocks();
        if nb == 0 {
            return self.clone();
        }
        let block_of = self.block_of_rows(m.nrows());
        let mut reach: Vec<usize> = (0..nb).collect();
        for (i, j, _) in m.iter() {
            let (a, b) = (block_of[i], block_of[j]);
            reach[a] = reach[a].max(b);
        }
        let mut starts = vec![0];
        let (mut lo, mut hi) = (0usize, 0usize);
        loop {
            let far = reach[lo..=hi].iter().copied().max().unwrap();
            starts.push(self.starts[hi + 1]);
            if hi + 1 >= nb {
                break;
            }
            lo = hi + 1;
            hi = far.max(lo);
        }
        BlockPartition {
            order: self.order.clone(),
            starts,
        }
    }

    fn block_of_rows(&self, n: usize) -> Vec<usize> {
        let mut block_of = vec![0usize; n];
        for k in 0..self.n_blocks() {
            for pos in self.block(k) {
                block_of[self.order[pos]] = k;
            }
        }
        block_of
    }
}

/// Breadth-first level sets of the sparsity graph of `pattern`, started from a
/// pseudo-peripheral node of each connected component. Consecutive levels
/// only share edges with their neighbours, so the result is block tridiagonal.
pub fn level_partition(pattern: &CsrMatrix) -> BlockPartition {
    let n = pattern.nrows();
    let mut component = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut starts = vec![0];
    let mut n_comp = 0;
    for seed in 0..n {
        if component[seed] != usize::MAX {
            continue;
        }
        let root = pseudo_peripheral(pattern, seed);
        let levels = bfs_levels(pattern, root);
        for level in levels {
            for &v in &level {
                component[v] = n_comp;
            }
            order.extend_from_slice(&level);
            starts.push(order.len());
        }
        n_comp += 1;
    }
    BlockPartition { order, starts }
}

/// Groups nodes by the value of a real diagonal (e.g. one coordinate of a
/// position operator), sorted ascending.
pub fn coordinate_partition(values: &[f64]) -> BlockPartition {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut starts = vec![0];
    for pos in 1..order.len() {
        if values[order[pos]] != values[order[pos - 1]] {
            starts.push(pos);
        }
    }
    starts.push(order.len());
    if order.is_empty() {
        starts = vec![0];
    }
    BlockPartition { order, starts }
}

fn bfs_levels(g: &CsrMatrix, root: usize) -> Vec<Vec<usize>> {
    let n = g.nrows();
    let mut depth = vec![usize::MAX; n];
    let mut levels: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    depth[root] = 0;
    queue.push_back(root);
    while let Some(v) = queue.pop_front() {
        let d = depth[v];
        if levels.len() <= d {
            levels.push(Vec::new());
        }
        levels[d].push(v);
        for &w in g.row(v).0 {
            if depth[w] == usize::MAX {
                depth[w] = d + 1;
                queue.push_back(w);
            }
        }
    }
    levels
}

fn pseudo_peripheral(g: &CsrMatrix, start: usize) -> usize {
    let mut root = start;
    let mut ecc = bfs_levels(g, root).len();
    for _ in 0..8 {
        let levels = bfs_levels(g, root);
        let last = levels.last().unwrap();
        let candidate = *last
            .iter()
            .min_by_key(|&&v| g.row(v).0.len())
            .unwrap();
        let e = bfs_levels(g, candidate).len();
        if e <= ecc {
            break;
        }
        root = candidate;
        ecc = e;
    }
    root
}

/// Block-tridiagonal `L D Lᴴ` factorization of a sparse Hermitian matrix.
pub struct BlockLdl {
    dim: usize,
    order: Vec<usize>,
    blocks: Vec<Range<usize>>,
    schur: Vec<IndefiniteFactor>,
    /// `couplings[k] = A[b_k, b_{k-1}]`, empty for `k = 0`.
    couplings: Vec<Mat<c64>>,
    inertia: Inertia,
    min_pivot: f64,
}

impl BlockLdl {
    /// Factors `m` under `partition`. `zero_tol` is the pivot magnitude below
    /// which a Schur complement eigenvalue is counted as zero.
    pub fn factor(m: &CsrMatrix, partition: &BlockPartition, zero_tol: f64) -> Result<Self> {
        let n = m.nrows();
        if partition.order.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "partition covers {} rows, matrix has {n}",
                partition.order.len()
            )));
        }
        if !partition.is_block_tridiagonal(m) {
            return Err(Error::InvalidArgument(
                "partition is not block tridiagonal for this matrix".into(),
            ));
        }
        let pm = m.permute_symmetric(&partition.order);
        let blocks: Vec<Range<usize>> = (0..partition.n_blocks()).map(|k| partition.block(k)).collect();

        let mut schur: Vec<IndefiniteFactor> = Vec::with_capacity(blocks.len());
        let mut couplings = Vec::with_capacity(blocks.len());
        let mut inertia = Inertia::default();
        let mut min_pivot = f64::INFINITY;
        for (k, b) in blocks.iter().enumerate() {
            let mut s = pm.dense_block(b.clone(), b.clone());
            let c = if k == 0 {
                Mat::<c64>::zeros(0, 0)
            } else {
                let prev = &blocks[k - 1];
                let c = pm.dense_block(b.clone(), prev.clone());
                // S_k -= C S_{k-1}^{-1} Cᴴ
                let mut w = c.adjoint().to_owned();
                schur[k - 1].solve_in_place(&mut w);
                let update = &c * &w;
                s -= &update;
                c
            };
            // Symmetrize against rounding in the update.
            let sh = Mat::<c64>::from_fn(s.nrows(), s.ncols(), |i, j| (s[(i, j)] + s[(j, i)].conj()) * 0.5);
            let f = IndefiniteFactor::new(&sh, zero_tol);
            if f.min_pivot().is_nan() {
                return Err(Error::Breakdown {
                    block: k,
                    pivot: f.min_pivot(),
                });
            }
            inertia += f.inertia();
            min_pivot = min_pivot.min(f.min_pivot());
            if f.is_singular() && k + 1 < blocks.len() {
                return Err(Error::Breakdown {
                    block: k,
                    pivot: f.min_pivot(),
                });
            }
            schur.push(f);
            couplings.push(c);
        }
        Ok(Self {
            dim: n,
            order: partition.order.clone(),
            blocks,
            schur,
            couplings,
            inertia,
            min_pivot,
        })
    }

    pub fn inertia(&self) -> Inertia {
        self.inertia
    }

    pub fn is_singular(&self) -> bool {
        self.inertia.zero > 0
    }

    /// Smallest pivot magnitude encountered; a crude lower-bound proxy for conditioning.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    /// Solves `A x = rhs`.
    pub fn solve(&self, rhs: &[c64]) -> Vec<c64> {
        let nb = self.blocks.len();
        let mut y: Vec<Mat<c64>> = self
            .blocks
            .iter()
            .map(|b| Mat::from_fn(b.len(), 1, |i, _| rhs[self.order[b.start + i]]))
            .collect();
        // Forward: z_k = y_k - C_k S_{k-1}^{-1} z_{k-1}
        for k in 1..nb {
            let mut t = y[k - 1].clone();
            self.schur[k - 1].solve_in_place(&mut t);
            let upd = &self.couplings[k] * &t;
            y[k] -= &upd;
        }
        // Backward: x_k = S_k^{-1} (z_k - C_{k+1}ᴴ x_{k+1})
        for k in (0..nb).rev() {
            if k + 1 < nb {
                let upd = self.couplings[k + 1].adjoint() * &y[k + 1];
                y[k] -= &upd;
            }
            self.schur[k].solve_in_place(&mut y[k]);
        }
        let mut out = vec![c64::new(0.0, 0.0); self.dim];
        for (b, yk) in self.blocks.iter().zip(&y) {
            for i in 0..b.len() {
                out[self.order[b.start + i]] = yk[(i, 0)];
            }
        }
        out
    }
}

/// `A⁻¹` as a Hermitian operator, for shift-invert eigensolves.
pub struct InverseOperator<'a>(pub &'a BlockLdl);

impl HermitianOperator for InverseOperator<'_> {
    fn dim(&self) -> usize {
        self.0.dim
    }

    fn apply(&self, x: &[c64], y: &mut [c64]) {
        y.copy_from_slice(&self.0.solve(x));
    }
}
