//! Seeded random ensembles used by property checks and the verification suite.

use faer::Mat;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::c64;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// `(G + Gᴴ)/2` with `G` a complex Gaussian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat<c64> {
    let g = Mat::<c64>::from_fn(n, n, |_, _| c64::new(gaussian(rng), gaussian(rng)));
    Mat::from_fn(n, n, |i, j| (g[(i, j)] + g[(j, i)].conj()) * 0.5)
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of `diag(R)` absorbed into `Q`. With `proper`, the first column is flipped
/// when needed so that `det = +1`.
pub fn random_orthogonal<R: Rng + ?Sized>(d: usize, proper: bool, rng: &mut R) -> Mat<f64> {
    let g = Mat::<f64>::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let r = qr.R();
    let mut q = qr.compute_Q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            for i in 0..d {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if proper && d > 0 && q.determinant() < 0.0 {
        for i in 0..d {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// Haar-distributed unitary matrix, by the same phase-fixed QR construction.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat<c64> {
    let g = Mat::<c64>::from_fn(n, n, |_, _| c64::new(gaussian(rng), gaussian(rng)));
    let qr = g.qr();
    let r = qr.R();
    let mut q = qr.compute_Q();
    for j in 0..n {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Uniform point on the unit sphere in `R^d`.
pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| gaussian(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform direction with radius drawn uniformly from `[r_min, r_max]`.
pub fn random_in_shell<R: Rng + ?Sized>(d: usize, r_min: f64, r_max: f64, rng: &mut R) -> Vec<f64> {
    let radius = if r_max > r_min { rng.random_range(r_min..r_max) } else { r_min };
    random_unit_vector(d, rng).into_iter().map(|x| x * radius).collect()
}

/// Uniform point in the box `[lo, hi]^d`.
pub fn random_in_box<R: Rng + ?Sized>(d: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(lo..hi)).collect()
}
