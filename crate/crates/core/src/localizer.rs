//! The spectral localizer `L_λ = Σ_j (A_j - λ_j I) ⊗ γ_j` and the quantities
//! read off it: gap (smallest |eigenvalue|), signature, index and the
//! eigenvalues nearest zero.
//!
//! Kronecker order is tuple-major, Clifford-minor: row `i·r + a` of `L_λ`
//! belongs to tuple basis vector `i` and Clifford basis vector `a`.
//!
//! Small localizers are diagonalized densely. Large ones are factored with a
//! block-tridiagonal `L D Lᴴ`, which gives the inertia directly and supplies
//! `L_λ⁻¹` to a shift-invert Krylov solver for the gap and eigenvalue window.

use std::sync::OnceLock;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::clifford::CliffordRep;
use crate::error::{Error, Result};
use crate::linalg::blockldl::{coordinate_partition, level_partition, BlockLdl, BlockPartition, InverseOperator};
use crate::linalg::dense::{dense_inertia, hermitian_eigenvalues, Inertia};
use crate::linalg::krylov::{largest_magnitude, KrylovOptions};
use crate::linalg::{c64, CsrMatrix};
use crate::tuple::{operator_norm, HermitianTuple, ProbePoint};

/// Localizer dimension at or below which the dense path is used.
pub const DENSE_THRESHOLD: usize = 2048;
/// Relative factor in the default singular tolerance.
pub const SINGULAR_REL_TOL: f64 = 1e-8;
/// Dimension above which a sparse-path breakdown is not retried densely.
const DENSE_FALLBACK_LIMIT: usize = 12_000;
/// Smallest block size worth handing to the dense kernels.
const MIN_BLOCK_ROWS: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SignatureMethod {
    /// Symmetric-indefinite factorization.
    #[default]
    Inertia,
    /// Signs of the eigenvalues.
    Eigen,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizerConfig {
    pub dense_threshold: usize,
    /// `singular_tol = singular_rel_tol · (1 + |λ|_2 + Σ_j |A_j|_2)`.
    pub singular_rel_tol: f64,
    /// Overrides the scale-relative tolerance when set.
    pub singular_tol: Option<f64>,
    pub method: SignatureMethod,
    pub krylov: KrylovOptions,
}

impl Default for LocalizerConfig {
    fn default() -> Self {
        Self {
            dense_threshold: DENSE_THRESHOLD,
            singular_rel_tol: SINGULAR_REL_TOL,
            singular_tol: None,
            method: SignatureMethod::Inertia,
            krylov: KrylovOptions::default(),
        }
    }
}

/// Everything computed at one probe point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizerReport {
    pub gap: f64,
    pub signature: Option<i64>,
    pub index: Option<i64>,
    /// Eigenvalues nearest zero, ascending.
    pub eigs: Vec<f64>,
    pub singular: bool,
}

/// Norms measuring how far a tuple is from commuting and from the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionNorms {
    /// `(j, k, |[A_j, A_k]|_2)` for `j < k`, zero-based.
    pub commutators: Vec<(usize, usize, f64)>,
    /// `|Σ_j A_j² - I|_2`.
    pub sphere_defect: f64,
    pub norms: Vec<f64>,
}

/// A tuple paired with a Clifford representation, ready to be probed.
pub struct Localizer<'a> {
    tuple: &'a HermitianTuple,
    rep: &'a CliffordRep,
    config: LocalizerConfig,
    /// `Σ_j A_j ⊗ γ_j`, the λ-independent part.
    base: CsrMatrix,
    partition: OnceLock<BlockPartition>,
}

/// Intermediate result of one evaluation.
struct Evaluation {
    gap: f64,
    inertia: Option<Inertia>,
    window: Vec<f64>,
}

impl<'a> Localizer<'a> {
    pub fn new(tuple: &'a HermitianTuple, rep: &'a CliffordRep) -> Result<Self> {
        Self::with_config(tuple, rep, LocalizerConfig::default())
    }

    pub fn with_config(tuple: &'a HermitianTuple, rep: &'a CliffordRep, config: LocalizerConfig) -> Result<Self> {
        if tuple.d() != rep.d() {
            return Err(Error::DimensionMismatch(format!(
                "tuple has {} matrices, representation has {} generators",
                tuple.d(),
                rep.d()
            )));
        }
        let n = tuple.n();
        let r = rep.r();
        let one = c64::new(1.0, 0.0);
        let parts: Vec<CsrMatrix> = tuple
            .matrices()
            .iter()
            .zip(rep.gammas())
            .map(|(a, g)| a.kron_dense(g))
            .collect();
        let terms: Vec<(c64, &CsrMatrix)> = parts.iter().map(|p| (one, p)).collect();
        let base = CsrMatrix::linear_combination(n * r, n * r, &terms);
        Ok(Self {
            tuple,
            rep,
            config,
            base,
            partition: OnceLock::new(),
        })
    }

    pub fn tuple(&self) -> &HermitianTuple {
        self.tuple
    }

    pub fn rep(&self) -> &CliffordRep {
        self.rep
    }

    pub fn config(&self) -> &LocalizerConfig {
        &self.config
    }

    /// `n · r`.
    pub fn dim(&self) -> usize {
        self.tuple.n() * self.rep.r()
    }

    pub fn uses_dense(&self) -> bool {
        self.dim() <= self.config.dense_threshold
    }

    pub fn singular_tol(&self, lambda: &ProbePoint) -> f64 {
        self.config.singular_tol.unwrap_or_else(|| {
            let scale: f64 = self.tuple.norms().iter().sum();
            self.config.singular_rel_tol * (1.0 + lambda.norm() + scale)
        })
    }

    /// `Σ_j λ_j γ_j`.
    fn clifford_shift(&self, lambda: &ProbePoint) -> Mat<c64> {
        let r = self.rep.r();
        let mut m = Mat::<c64>::zeros(r, r);
        for (l, g) in lambda.coords().iter().zip(self.rep.gammas()) {
            if *l != 0.0 {
                m += g * faer::Scale(c64::new(*l, 0.0));
            }
        }
        m
    }

    /// Sparse `L_λ`.
    pub fn assemble(&self, lambda: &ProbePoint) -> Result<CsrMatrix> {
        lambda.check_dim(self.tuple.d())?;
        let n = self.tuple.n();
        let r = self.rep.r();
        let shift = self.clifford_shift(lambda);
        let mut shift_nz = Vec::new();
        for a in 0..r {
            for b in 0..r {
                if shift[(a, b)] != c64::new(0.0, 0.0) {
                    shift_nz.push((a, b, -shift[(a, b)]));
                }
            }
        }
        let trip = self.base.iter().chain(
            (0..n).flat_map(|i| shift_nz.iter().map(move |&(a, b, v)| (i * r + a, i * r + b, v))),
        );
        let l = CsrMatrix::from_triplets(n * r, n * r, trip);
        debug_assert!(l.hermiticity_defect() <= 1e-12 * l.max_abs().max(1.0));
        Ok(l)
    }

    /// Dense `L_λ`.
    pub fn assemble_dense(&self, lambda: &ProbePoint) -> Result<Mat<c64>> {
        Ok(self.assemble(lambda)?.to_dense())
    }

    /// Block partition of the localizer rows, derived once from the tuple's
    /// sparsity pattern and any diagonal (position-like) matrices.
    fn partition(&self) -> &BlockPartition {
        self.partition.get_or_init(|| {
            let pattern = self.tuple.pattern();
            let mut best = level_partition(&pattern);
            let diagonals: Vec<Vec<f64>> = self
                .tuple
                .matrices()
                .iter()
                .filter(|m| m.is_diagonal() && m.is_real())
                .map(|m| m.diagonal().iter().map(|z| z.re).collect())
                .collect();
            let mut candidates: Vec<Vec<f64>> = diagonals.clone();
            if diagonals.len() > 1 {
                let n = self.tuple.n();
                candidates.push((0..n).map(|i| diagonals.iter().map(|d| d[i]).sum()).collect());
            }
            for values in candidates {
                let p = coordinate_partition(&values).make_tridiagonal(&pattern);
                if p.cost() < best.cost() {
                    best = p;
                }
            }
            let target = (best.max_block() * self.rep.r()).max(MIN_BLOCK_ROWS);
            best.expand(self.rep.r()).coarsen(target)
        })
    }

    fn evaluate(&self, lambda: &ProbePoint, want_inertia: bool, window: usize) -> Result<Evaluation> {
        lambda.check_dim(self.tuple.d())?;
        if self.uses_dense() {
            return self.evaluate_dense(lambda, want_inertia, window);
        }
        match self.evaluate_sparse(lambda, want_inertia, window) {
            Err(Error::Breakdown { .. }) if self.dim() <= DENSE_FALLBACK_LIMIT => {
                self.evaluate_dense(lambda, want_inertia, window)
            }
            other => other,
        }
    }

    fn evaluate_dense(&self, lambda: &ProbePoint, want_inertia: bool, window: usize) -> Result<Evaluation> {
        let l = self.assemble_dense(lambda)?;
        let eigs = hermitian_eigenvalues(&l)?;
        let gap = eigs.iter().fold(f64::INFINITY, |a, e| a.min(e.abs()));
        let inertia = if want_inertia {
            Some(match self.config.method {
                SignatureMethod::Eigen => Inertia::from_eigenvalues(&eigs, 0.0),
                SignatureMethod::Inertia => dense_inertia(&l, 0.0),
            })
        } else {
            None
        };
        Ok(Evaluation {
            gap,
            inertia,
            window: nearest_zero(&eigs, window),
        })
    }

    fn evaluate_sparse(&self, lambda: &ProbePoint, want_inertia: bool, window: usize) -> Result<Evaluation> {
        let l = self.assemble(lambda)?;
        if self.config.method == SignatureMethod::Eigen && want_inertia {
            return self.evaluate_dense(lambda, want_inertia, window);
        }
        let factor = BlockLdl::factor(&l, self.partition(), 0.0)?;
        let inertia = factor.inertia();
        if factor.is_singular() {
            return Ok(Evaluation {
                gap: 0.0,
                inertia: want_inertia.then_some(inertia),
                window: vec![0.0; window.min(inertia.zero)],
            });
        }
        let k = window.max(1).min(self.dim());
        let ritz = largest_magnitude(&InverseOperator(&factor), k, &self.config.krylov)?;
        let mut eigs: Vec<f64> = ritz.values.iter().map(|t| 1.0 / t).collect();
        let gap = eigs.iter().fold(f64::INFINITY, |a, e| a.min(e.abs()));
        eigs.sort_by(f64::total_cmp);
        eigs.truncate(self.dim());
        Ok(Evaluation {
            gap,
            inertia: want_inertia.then_some(inertia),
            window: if window == 0 { Vec::new() } else { nearest_zero(&eigs, window) },
        })
    }

    /// Smallest |eigenvalue| of `L_λ`.
    pub fn gap(&self, lambda: &ProbePoint) -> Result<f64> {
        Ok(self.evaluate(lambda, false, 0)?.gap)
    }

    /// Positive minus negative eigenvalue count. Fails with
    /// [`Error::SingularLocalizer`] when the gap is at or below the singular tolerance.
    pub fn signature(&self, lambda: &ProbePoint) -> Result<i64> {
        let ev = self.evaluate(lambda, true, 0)?;
        let tol = self.singular_tol(lambda);
        if ev.gap <= tol {
            return Err(Error::SingularLocalizer { gap: ev.gap, tol });
        }
        Ok(ev.inertia.expect("inertia requested").signature())
    }

    /// Half the signature.
    pub fn index(&self, lambda: &ProbePoint) -> Result<i64> {
        let sig = self.signature(lambda)?;
        if sig % 2 != 0 {
            return Err(Error::OddSignature { signature: sig });
        }
        Ok(sig / 2)
    }

    /// The `k` eigenvalues nearest zero, ascending.
    pub fn eig_window(&self, lambda: &ProbePoint, k: usize) -> Result<Vec<f64>> {
        if k == 0 || k > self.dim() {
            return Err(Error::InvalidArgument(format!(
                "eigenvalue window of {k} requested from a localizer of dimension {}",
                self.dim()
            )));
        }
        Ok(self.evaluate(lambda, false, k)?.window)
    }

    /// Gap, signature, index and an eigenvalue window of size `k` (possibly zero).
    pub fn report(&self, lambda: &ProbePoint, k: usize) -> Result<LocalizerReport> {
        let ev = self.evaluate(lambda, true, k.min(self.dim()))?;
        let tol = self.singular_tol(lambda);
        let singular = ev.gap <= tol;
        let signature = if singular { None } else { ev.inertia.map(|i| i.signature()) };
        let index = signature.filter(|s| s % 2 == 0).map(|s| s / 2);
        Ok(LocalizerReport {
            gap: ev.gap,
            signature,
            index,
            eigs: ev.window,
            singular,
        })
    }
}

/// The `k` entries of `eigs` nearest zero, returned ascending. Ties in modulus
/// are broken towards the negative value.
fn nearest_zero(eigs: &[f64], k: usize) -> Vec<f64> {
    let mut by_mod = eigs.to_vec();
    by_mod.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
    by_mod.truncate(k);
    by_mod.sort_by(f64::total_cmp);
    by_mod
}

/// `L_λ` with default settings.
pub fn assemble(tuple: &HermitianTuple, lambda: &ProbePoint, rep: &CliffordRep) -> Result<CsrMatrix> {
    Localizer::new(tuple, rep)?.assemble(lambda)
}

pub fn gap(tuple: &HermitianTuple, lambda: &ProbePoint, rep: &CliffordRep) -> Result<f64> {
    Localizer::new(tuple, rep)?.gap(lambda)
}

pub fn signature(tuple: &HermitianTuple, lambda: &ProbePoint, rep: &CliffordRep) -> Result<i64> {
    Localizer::new(tuple, rep)?.signature(lambda)
}

pub fn index(tuple: &HermitianTuple, lambda: &ProbePoint, rep: &CliffordRep) -> Result<i64> {
    Localizer::new(tuple, rep)?.index(lambda)
}

pub fn eig_window(tuple: &HermitianTuple, lambda: &ProbePoint, rep: &CliffordRep, k: usize) -> Result<Vec<f64>> {
    Localizer::new(tuple, rep)?.eig_window(lambda, k)
}

/// Commutator norms, sphere defect and matrix norms of a tuple. Every form
/// involved is Hermitian (`i[A_j, A_k]`, `Σ A_j² - I`), so spectral norms are
/// extremal eigenvalue moduli.
pub fn obstruction_norms(tuple: &HermitianTuple) -> ObstructionNorms {
    let d = tuple.d();
    let n = tuple.n();
    let mats = tuple.matrices();
    let mut commutators = Vec::new();
    for j in 0..d {
        for k in j + 1..d {
            let ab = mats[j].matmul(&mats[k]);
            let ba = mats[k].matmul(&mats[j]);
            let comm = CsrMatrix::linear_combination(
                n,
                n,
                &[(c64::new(0.0, 1.0), &ab), (c64::new(0.0, -1.0), &ba)],
            );
            commutators.push((j, k, operator_norm(&comm)));
        }
    }
    let squares: Vec<CsrMatrix> = mats.iter().map(|m| m.matmul(m)).collect();
    let id = CsrMatrix::identity(n);
    let mut terms: Vec<(c64, &CsrMatrix)> = squares.iter().map(|s| (c64::new(1.0, 0.0), s)).collect();
    terms.push((c64::new(-1.0, 0.0), &id));
    let defect = CsrMatrix::linear_combination(n, n, &terms);
    ObstructionNorms {
        commutators,
        sphere_defect: operator_norm(&defect),
        norms: tuple.norms().to_vec(),
    }
}
