//! Dense Hermitian kernels backed by `faer`.

use faer::linalg::solvers::Lblt;
use faer::{Mat, Side};

use super::c64;
use crate::error::{Error, Result};

/// Counts of positive, negative and (numerically) zero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn signature(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }

    pub fn dim(&self) -> usize {
        self.positive + self.negative + self.zero
    }

    pub fn from_eigenvalues(eigs: &[f64], zero_tol: f64) -> Self {
        let mut out = Inertia::default();
        for &e in eigs {
            if e > zero_tol {
                out.positive += 1;
            } else if e < -zero_tol {
                out.negative += 1;
            } else {
                out.zero += 1;
            }
        }
        out
    }
}

impl std::ops::AddAssign for Inertia {
    fn add_assign(&mut self, rhs: Self) {
        self.positive += rhs.positive;
        self.negative += rhs.negative;
        self.zero += rhs.zero;
    }
}

/// All eigenvalues of a Hermitian matrix, ascending. Only the lower triangle is read.
pub fn hermitian_eigenvalues(m: &Mat<c64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut eigs = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigendecomposition(format!("{e:?}")))?;
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

/// Eigenvalues and eigenvectors (columns), eigenvalues ascending.
pub fn hermitian_eigen(m: &Mat<c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigendecomposition(format!("{e:?}")))?;
    let s = evd.S();
    let vals = (0..m.nrows()).map(|i| s[i].re).collect();
    Ok((vals, evd.U().to_owned()))
}

/// Bunch–Kaufman factorization `P A Pᵀ = L B Lᴴ` together with the inertia of `B`.
pub struct IndefiniteFactor {
    factor: Lblt<c64>,
    inertia: Inertia,
    min_pivot: f64,
}

impl IndefiniteFactor {
    /// Factors the Hermitian matrix `m` (lower triangle read). Pivot blocks whose
    /// eigenvalues fall below `zero_tol` in magnitude are counted as zero.
    pub fn new(m: &Mat<c64>, zero_tol: f64) -> Self {
        let factor = m.lblt(Side::Lower);
        let (inertia, min_pivot) = block_diagonal_inertia(&factor, zero_tol);
        Self {
            factor,
            inertia,
            min_pivot,
        }
    }

    pub fn inertia(&self) -> Inertia {
        self.inertia
    }

    /// Smallest modulus among the eigenvalues of the 1×1 and 2×2 pivot blocks.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn is_singular(&self) -> bool {
        self.inertia.zero > 0
    }

    /// Solves `A X = rhs` in place (columns of `rhs` are independent right-hand sides).
    pub fn solve_in_place(&self, rhs: &mut Mat<c64>) {
        use faer::linalg::solvers::Solve;
        self.factor.solve_in_place(rhs.as_mut());
    }
}

fn block_diagonal_inertia(f: &Lblt<c64>, zero_tol: f64) -> (Inertia, f64) {
    let d = f.B_diag();
    let s = f.B_subdiag();
    let n = d.dim();
    let mut inertia = Inertia::default();
    let mut min_pivot = f64::INFINITY;
    let mut classify = |e: f64, inertia: &mut Inertia| {
        min_pivot = min_pivot.min(e.abs());
        if !e.is_finite() || e.abs() <= zero_tol {
            inertia.zero += 1;
        } else if e > 0.0 {
            inertia.positive += 1;
        } else {
            inertia.negative += 1;
        }
    };
    let mut i = 0;
    while i < n {
        if i + 1 < n && s[i] != c64::new(0.0, 0.0) {
            // [[a, conj(b)], [b, c]]
            let a = d[i].re;
            let c = d[i + 1].re;
            let b = s[i].norm();
            let mean = 0.5 * (a + c);
            let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
            classify(mean + rad, &mut inertia);
            classify(mean - rad, &mut inertia);
            i += 2;
        } else {
            classify(d[i].re, &mut inertia);
            i += 1;
        }
    }
    (inertia, min_pivot)
}

/// Inertia of a dense Hermitian matrix via symmetric-indefinite factorization.
pub fn dense_inertia(m: &Mat<c64>, zero_tol: f64) -> Inertia {
    IndefiniteFactor::new(m, zero_tol).inertia()
}

/// Singular values of a general complex matrix, descending.
pub fn singular_values(m: &Mat<c64>) -> Result<Vec<f64>> {
    m.singular_values()
        .map_err(|e| Error::Eigendecomposition(format!("{e:?}")))
}

/// Dense Kronecker product `a ⊗ b`.
pub fn kron(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
    let (p, q) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * p, a.ncols() * q, |i, j| {
        a[(i / p, j / q)] * b[(i % p, j % q)]
    })
}

pub fn identity(n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// Largest entry modulus.
pub fn max_abs(m: &Mat<c64>) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

pub fn frobenius(m: &Mat<c64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// `max |m_ij - conj(m_ji)|`.
pub fn hermiticity_defect(m: &Mat<c64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Spectral norm of a Hermitian matrix, `max |eig|`.
pub fn hermitian_norm(m: &Mat<c64>) -> Result<f64> {
    let eigs = hermitian_eigenvalues(m)?;
    Ok(eigs.iter().fold(0.0f64, |acc, e| acc.max(e.abs())))
}
