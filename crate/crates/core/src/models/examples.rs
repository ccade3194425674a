//! The 3×3 scaling example and fuzzy-sphere generators.

use crate::linalg::{c64, CsrMatrix};
use crate::tuple::HermitianTuple;

/// `(A, tB, tC)` with `A = diag(-1, 0, 1)`, `B` the tridiagonal matrix of ones
/// and `C` tridiagonal with `i` above and `-i` below the diagonal.
pub fn example_abc(t: f64) -> HermitianTuple {
    let a = CsrMatrix::from_diagonal(&[-1.0, 0.0, 1.0]);
    let one = c64::new(t, 0.0);
    let b = CsrMatrix::from_triplets(3, 3, [(0, 1, one), (1, 0, one), (1, 2, one), (2, 1, one)]);
    let up = c64::new(0.0, t);
    let c = CsrMatrix::from_triplets(3, 3, [(0, 1, up), (1, 0, -up), (1, 2, up), (2, 1, -up)]);
    HermitianTuple::new(vec![a, b, c], format!("abc t={t}")).expect("example matrices are Hermitian")
}

/// Spin-`j` matrices `(S_x, S_y, S_z)` of size `n = 2j + 1`, basis ordered
/// `m = j, j-1, …, -j`.
pub fn spin_matrices(n: usize) -> [CsrMatrix; 3] {
    assert!(n >= 1);
    let j = (n as f64 - 1.0) / 2.0;
    let m = |k: usize| j - k as f64;
    let sz = CsrMatrix::from_diagonal(&(0..n).map(m).collect::<Vec<_>>());
    // ⟨m+1| S_+ |m⟩ = sqrt(j(j+1) - m(m+1)); index k-1 holds m+1.
    let ladder: Vec<f64> = (1..n).map(|k| (j * (j + 1.0) - m(k) * (m(k) + 1.0)).sqrt()).collect();
    let mut sx = Vec::new();
    let mut sy = Vec::new();
    for (idx, &w) in ladder.iter().enumerate() {
        let (up, down) = (idx, idx + 1);
        sx.push((up, down, c64::new(0.5 * w, 0.0)));
        sx.push((down, up, c64::new(0.5 * w, 0.0)));
        sy.push((up, down, c64::new(0.0, -0.5 * w)));
        sy.push((down, up, c64::new(0.0, 0.5 * w)));
    }
    [
        CsrMatrix::from_triplets(n, n, sx),
        CsrMatrix::from_triplets(n, n, sy),
        sz,
    ]
}

/// `X_k = S_k / sqrt(j(j+1))`, so that `Σ X_k² = I`.
pub fn fuzzy_sphere(n: usize) -> HermitianTuple {
    assert!(n >= 2, "fuzzy sphere needs n >= 2");
    let j = (n as f64 - 1.0) / 2.0;
    let s = 1.0 / (j * (j + 1.0)).sqrt();
    let mats = spin_matrices(n).map(|m| m.scale(c64::new(s, 0.0))).to_vec();
    HermitianTuple::new(mats, format!("fuzzy sphere n={n}")).expect("spin matrices are Hermitian")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_half_is_pauli_over_two() {
        let [sx, sy, sz] = spin_matrices(2);
        assert_eq!(sx.get(0, 1), c64::new(0.5, 0.0));
        assert_eq!(sy.get(0, 1), c64::new(0.0, -0.5));
        assert_eq!(sz.get(1, 1), c64::new(-0.5, 0.0));
    }

    #[test]
    fn spin_commutation_relation() {
        // [S_x, S_y] = i S_z
        for n in 2..7 {
            let [sx, sy, sz] = spin_matrices(n);
            let lhs = sx.matmul(&sy).sub(&sy.matmul(&sx));
            let rhs = sz.scale(c64::new(0.0, 1.0));
            assert!(lhs.sub(&rhs).max_abs() < 1e-13, "n={n}");
        }
    }
}
