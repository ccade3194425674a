//! Ordered tuples of same-size Hermitian matrices and probe points.

use std::sync::OnceLock;

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::dense::hermitian_norm;
use crate::linalg::krylov::{spectral_norm, KrylovOptions};
use crate::linalg::{c64, CsrMatrix};

/// Relative Hermiticity tolerance: `|A - Aᴴ|_max <= HERMITIAN_TOL · max(1, |A|_max)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dimension below which spectral norms are computed densely.
const DENSE_NORM_LIMIT: usize = 512;

/// `d` Hermitian `n × n` matrices, stored sparse.
#[derive(Debug)]
pub struct HermitianTuple {
    matrices: Vec<CsrMatrix>,
    label: String,
    norms: OnceLock<Vec<f64>>,
}

impl Clone for HermitianTuple {
    fn clone(&self) -> Self {
        let norms = OnceLock::new();
        if let Some(v) = self.norms.get() {
            let _ = norms.set(v.clone());
        }
        Self {
            matrices: self.matrices.clone(),
            label: self.label.clone(),
            norms,
        }
    }
}

impl HermitianTuple {
    /// Validates shapes and Hermiticity. Non-Hermitian input is rejected, never symmetrized.
    pub fn new(matrices: Vec<CsrMatrix>, label: impl Into<String>) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::InvalidArgument("a tuple needs at least one matrix".into()));
        };
        let n = first.nrows();
        for (j, m) in matrices.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "matrix {} is {}x{}, expected {n}x{n}",
                    j + 1,
                    m.nrows(),
                    m.ncols()
                )));
            }
            let defect = m.hermiticity_defect();
            if defect > HERMITIAN_TOL * m.max_abs().max(1.0) {
                return Err(Error::NotHermitian { index: j + 1, defect });
            }
        }
        Ok(Self {
            matrices,
            label: label.into(),
            norms: OnceLock::new(),
        })
    }

    pub fn from_dense(matrices: &[Mat<c64>], label: impl Into<String>) -> Result<Self> {
        Self::new(
            matrices.iter().map(|m| CsrMatrix::from_dense(m, 0.0)).collect(),
            label,
        )
    }

    /// The generators of a Clifford representation, read as a tuple.
    pub fn from_rep(rep: &crate::clifford::CliffordRep) -> Self {
        Self::from_dense(rep.gammas(), "gamma")
            .expect("Clifford generators are Hermitian and square")
    }

    /// `d` zero matrices of size `n`.
    pub fn zeros(d: usize, n: usize) -> Self {
        Self::new((0..d).map(|_| CsrMatrix::zeros(n, n)).collect(), "zero")
            .expect("zero matrices are Hermitian")
    }

    /// Commuting tuple of real diagonal matrices; `points[k]` is the `k`-th joint eigenvalue.
    pub fn diagonal(points: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidArgument("no joint eigenvalues given".into()));
        };
        let d = first.len();
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::DimensionMismatch("joint eigenvalues of unequal length".into()));
        }
        let mats = (0..d)
            .map(|j| CsrMatrix::from_diagonal(&points.iter().map(|p| p[j]).collect::<Vec<_>>()))
            .collect();
        Self::new(mats, "diagonal")
    }

    pub fn d(&self) -> usize {
        self.matrices.len()
    }

    pub fn n(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrices(&self) -> &[CsrMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, j: usize) -> &CsrMatrix {
        &self.matrices[j]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Spectral norms `|A_j|_2`, computed once.
    pub fn norms(&self) -> &[f64] {
        self.norms.get_or_init(|| self.matrices.iter().map(operator_norm).collect())
    }

    /// `Â_j = Σ_s u_{js} A_s` for a real `d × d` matrix `u`.
    pub fn rotate(&self, u: &Mat<f64>) -> Result<Self> {
        let d = self.d();
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "rotation is {}x{}, tuple has {d} matrices",
                u.nrows(),
                u.ncols()
            )));
        }
        let n = self.n();
        let mats = (0..d)
            .map(|j| {
                let terms: Vec<(c64, &CsrMatrix)> = (0..d)
                    .map(|s| (c64::new(u[(j, s)], 0.0), &self.matrices[s]))
                    .collect();
                CsrMatrix::linear_combination(n, n, &terms)
            })
            .collect();
        Self::new(mats, format!("{} (rotated)", self.label))
    }

    /// `Q A_j Qᴴ` for a unitary `Q`. The result is dense-filled.
    pub fn conjugate(&self, q: &Mat<c64>) -> Result<Self> {
        if q.nrows() != self.n() || q.ncols() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "unitary is {}x{}, tuple matrices are {n}x{n}",
                q.nrows(),
                q.ncols(),
                n = self.n()
            )));
        }
        let mats: Vec<Mat<c64>> = self
            .matrices
            .iter()
            .map(|m| {
                let c = q * m.to_dense() * q.adjoint();
                // Remove the rounding-level anti-Hermitian part introduced by the products.
                Mat::from_fn(c.nrows(), c.ncols(), |i, j| (c[(i, j)] + c[(j, i)].conj()) * 0.5)
            })
            .collect();
        Self::from_dense(&mats, format!("{} (conjugated)", self.label))
    }

    /// Each matrix multiplied by a real factor.
    pub fn scaled(&self, factors: &[f64]) -> Result<Self> {
        if factors.len() != self.d() {
            return Err(Error::DimensionMismatch(format!(
                "{} scale factors for {} matrices",
                factors.len(),
                self.d()
            )));
        }
        let mats = self
            .matrices
            .iter()
            .zip(factors)
            .map(|(m, &k)| m.scale(c64::new(k, 0.0)))
            .collect();
        Self::new(mats, self.label.clone())
    }

    /// Union of the sparsity patterns, used to derive elimination orderings.
    pub fn pattern(&self) -> CsrMatrix {
        let n = self.n();
        let one = c64::new(1.0, 0.0);
        CsrMatrix::from_triplets(
            n,
            n,
            self.matrices
                .iter()
                .flat_map(|m| m.iter().map(move |(i, j, _)| (i, j, one)))
                .chain((0..n).map(|i| (i, i, one))),
        )
    }
}

/// Spectral norm of a Hermitian sparse matrix.
pub fn operator_norm(m: &CsrMatrix) -> f64 {
    if m.nnz() == 0 {
        return 0.0;
    }
    if m.is_diagonal() {
        return m.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    if m.nrows() <= DENSE_NORM_LIMIT {
        if let Ok(v) = hermitian_norm(&m.to_dense()) {
            return v;
        }
    }
    let opts = KrylovOptions {
        block_size: 2,
        max_dim: 400,
        tol: 1e-10,
        ..Default::default()
    };
    match spectral_norm(m, &opts) {
        Ok(v) => v,
        Err(_) => hermitian_norm(&m.to_dense()).unwrap_or(f64::NAN),
    }
}

/// A point `λ ∈ R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbePoint(pub Vec<f64>);

impl ProbePoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn origin(d: usize) -> Self {
        Self(vec![0.0; d])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn check_dim(&self, d: usize) -> Result<()> {
        if self.0.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "probe point has {} coordinates, tuple has {d} matrices",
                self.0.len()
            )));
        }
        Ok(())
    }
}

impl From<Vec<f64>> for ProbePoint {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl From<&[f64]> for ProbePoint {
    fn from(v: &[f64]) -> Self {
        Self(v.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::pauli_rep;

    #[test]
    fn rejects_non_hermitian_input() {
        let m = CsrMatrix::from_triplets(2, 2, [(0, 1, c64::new(1.0, 0.0))]);
        let err = HermitianTuple::new(vec![m], "x").unwrap_err();
        assert!(matches!(err, Error::NotHermitian { index: 1, .. }));
    }

    #[test]
    fn rejects_mixed_sizes() {
        let err = HermitianTuple::new(vec![CsrMatrix::identity(2), CsrMatrix::identity(3)], "x").unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn pauli_norms_are_one() {
        let t = HermitianTuple::from_rep(&pauli_rep());
        for v in t.norms() {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }
}
