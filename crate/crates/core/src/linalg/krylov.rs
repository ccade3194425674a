//! Block Krylov–Rayleigh–Ritz eigensolver for Hermitian operators.
//!
//! The basis is kept fully orthonormal (classical Gram–Schmidt applied twice),
//! so the projected matrix is computed explicitly rather than through the
//! three-term recurrence. A block size above one lets the solver resolve
//! eigenvalues of multiplicity up to the block size, which matters for
//! time-reversal symmetric localizers whose spectra come in degenerate pairs.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::c64;
use super::dense::hermitian_eigen;
use crate::error::{Error, Result};

/// A Hermitian linear operator acting on `C^dim`.
pub trait HermitianOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[c64], y: &mut [c64]);
}

impl HermitianOperator for super::CsrMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[c64], y: &mut [c64]) {
        self.matvec_into(x, y);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    pub block_size: usize,
    /// Upper bound on the basis dimension.
    pub max_dim: usize,
    /// Relative residual tolerance `|A y - θ y| <= tol · max(|θ|, scale)`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            block_size: 4,
            max_dim: 600,
            tol: 1e-11,
            seed: 0x5eed_10ca_112e,
        }
    }
}

/// Ritz values with largest modulus.
#[derive(Debug, Clone)]
pub struct RitzValues {
    /// Sorted by decreasing modulus.
    pub values: Vec<f64>,
    pub max_residual: f64,
    pub basis_dim: usize,
}

fn dot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[c64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(alpha: c64, x: &[c64], y: &mut [c64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Computes the `k` eigenvalues of largest modulus of `op`.
pub fn largest_magnitude<O: HermitianOperator + ?Sized>(
    op: &O,
    k: usize,
    opts: &KrylovOptions,
) -> Result<RitzValues> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "requested {k} eigenvalues of an operator of dimension {n}"
        )));
    }
    let block = opts.block_size.max(1).min(n);
    let max_dim = opts.max_dim.max(k + 2 * block).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<c64>> = Vec::new();
    let mut images: Vec<Vec<c64>> = Vec::new();
    let mut proj: Vec<Vec<c64>> = Vec::new();
    let mut candidates: Vec<Vec<c64>> = (0..block).map(|_| random_vector(n, &mut rng)).collect();
    let mut last_residual = f64::INFINITY;
    let mut next_check = (k + block).min(n);

    loop {
        // Orthonormalize new directions against the basis and each other.
        let mut added = 0;
        for mut v in candidates.drain(..) {
            if basis.len() >= n {
                break;
            }
            let mut attempts = 0;
            loop {
                let before = norm(&v);
                for _ in 0..2 {
                    for q in &basis {
                        let c = dot(q, &v);
                        axpy(-c, q, &mut v);
                    }
                }
                let after = norm(&v);
                if after > 1e-8 * before.max(f64::MIN_POSITIVE) && after > 0.0 {
                    let inv = 1.0 / after;
                    v.iter_mut().for_each(|x| *x *= inv);
                    break;
                }
                // Invariant subspace reached along this direction; restart it.
                attempts += 1;
                if attempts > 5 {
                    v.clear();
                    break;
                }
                v = random_vector(n, &mut rng);
            }
            if v.is_empty() {
                continue;
            }
            let mut av = vec![c64::new(0.0, 0.0); n];
            op.apply(&v, &mut av);
            basis.push(v);
            images.push(av);
            added += 1;
        }

        // Extend the projected matrix T = Vᴴ A V.
        let m = basis.len();
        for row in proj.iter_mut() {
            row.resize(m, c64::new(0.0, 0.0));
        }
        while proj.len() < m {
            proj.push(vec![c64::new(0.0, 0.0); m]);
        }
        for j in (m - added)..m {
            for i in 0..=j {
                let t = dot(&basis[i], &images[j]);
                proj[i][j] = t;
                proj[j][i] = t.conj();
            }
            proj[j][j] = c64::new(proj[j][j].re, 0.0);
        }

        let full = m >= n;
        if m >= k && (full || m >= max_dim || m >= next_check) {
            let t = Mat::<c64>::from_fn(m, m, |i, j| proj[i][j]);
            let (theta, s) = hermitian_eigen(&t)?;
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| theta[b].abs().total_cmp(&theta[a].abs()));
            let wanted = &order[..k];
            let scale = theta.iter().fold(0.0f64, |a, t| a.max(t.abs()));

            let mut worst = 0.0f64;
            for &w in wanted {
                let mut r = vec![c64::new(0.0, 0.0); n];
                for i in 0..m {
                    let coef = s[(i, w)];
                    axpy(coef, &images[i], &mut r);
                    axpy(-coef * theta[w], &basis[i], &mut r);
                }
                let rel = norm(&r) / theta[w].abs().max(1e-3 * scale).max(f64::MIN_POSITIVE);
                worst = worst.max(rel);
            }
            last_residual = worst;
            if full || worst <= opts.tol {
                return Ok(RitzValues {
                    values: wanted.iter().map(|&w| theta[w]).collect(),
                    max_residual: worst,
                    basis_dim: m,
                });
            }
            if m >= max_dim {
                return Err(Error::NotConverged {
                    iterations: m,
                    residual: worst,
                });
            }
            next_check = m + block.max(m / 8);
        }
        if m >= max_dim && m < k {
            return Err(Error::NotConverged {
                iterations: m,
                residual: last_residual,
            });
        }

        // Next block: images of the newest basis vectors.
        candidates = images[m - added..].to_vec();
        if candidates.is_empty() {
            candidates = (0..block).map(|_| random_vector(n, &mut rng)).collect();
        }
    }
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<c64> {
    (0..n)
        .map(|_| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Spectral norm `max |eig|` of a Hermitian operator.
pub fn spectral_norm<O: HermitianOperator + ?Sized>(op: &O, opts: &KrylovOptions) -> Result<f64> {
    if op.dim() == 0 {
        return Ok(0.0);
    }
    let r = largest_magnitude(op, 1, opts)?;
    Ok(r.values[0].abs())
}
