//! Four-dimensional four-band lattice with open boundaries.
//!
//! Cells `(m, n, j, l) ∈ [0, N)⁴` lie along axes `x₁ … x₄`; each carries sites
//! `a, b, c, d`, all at the cell's coordinate. Terms whose target cell leaves
//! the sample are dropped.

use serde::{Deserialize, Serialize};

use super::{center_sites, HoppingBuilder, LatticeModel, ModelParams, Site};
use crate::linalg::c64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice4dParams {
    /// Cells per axis.
    pub n: usize,
    #[serde(default = "half")]
    pub m: f64,
    #[serde(default = "one")]
    pub t: f64,
    /// Long-range hopping; real for class AI, complex for class A.
    #[serde(default = "default_t1")]
    pub t1: c64,
    #[serde(default = "one")]
    pub a: f64,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

fn default_t1() -> c64 {
    c64::new(0.8, 0.0)
}

impl Lattice4dParams {
    /// `M = t/2`, `t₁ = 0.8t`: real Hamiltonian.
    pub fn class_ai(n: usize) -> Self {
        Self { n, m: 0.5, t: 1.0, t1: c64::new(0.8, 0.0), a: 1.0 }
    }

    /// `M = t/2`, `t₁ = 0.8 e^{0.1iπ} t`.
    pub fn class_a(n: usize) -> Self {
        Self {
            n,
            m: 0.5,
            t: 1.0,
            t1: c64::from_polar(0.8, 0.1 * std::f64::consts::PI),
            a: 1.0,
        }
    }
}

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;

pub fn lattice4d(p: &Lattice4dParams) -> LatticeModel {
    assert!(p.n >= 1, "4D lattice needs at least one cell per axis");
    let n = p.n as i64;
    let cell_index = |c: [i64; 4]| -> Option<usize> {
        if c.iter().all(|&x| (0..n).contains(&x)) {
            Some((((c[0] * n + c[1]) * n + c[2]) * n + c[3]) as usize)
        } else {
            None
        }
    };
    let n_cells = p.n.pow(4);
    let mut sites = Vec::with_capacity(4 * n_cells);
    for m in 0..n {
        for nn in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let cell = vec![m, nn, j, l];
                    let coords: Vec<f64> = cell.iter().map(|&x| x as f64 * p.a).collect();
                    for tag in ['a', 'b', 'c', 'd'] {
                        sites.push(Site { coords: coords.clone(), sublattice: tag, cell: cell.clone() });
                    }
                }
            }
        }
    }
    center_sites(&mut sites);

    let t = c64::new(p.t, 0.0);
    // (amplitude, target site, target cell offset, source site)
    let inter: [(c64, usize, [i64; 4], usize); 8] = [
        (-t, A, [1, 1, 0, 0], C),
        (t, D, [1, 1, 0, 0], B),
        (-t, C, [-1, 0, 0, 0], A),
        (t, B, [-1, 0, 0, 0], D),
        (-t, A, [0, 0, 1, 1], D),
        (-t, C, [0, 0, 1, 1], B),
        (-t, D, [0, 0, -1, 0], A),
        (-t, B, [0, 0, -1, 0], C),
    ];
    let intra: [(c64, usize, usize); 4] = [(-t, C, A), (t, B, D), (-t, D, A), (-t, B, C)];
    let long: [(c64, usize); 4] = [(-p.t1, A), (-p.t1, B), (p.t1, C), (p.t1, D)];

    let mut h = HoppingBuilder::default();
    for m in 0..n {
        for nn in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let here = [m, nn, j, l];
                    let c = cell_index(here).unwrap();
                    let site = |cell: usize, s: usize| 4 * cell + s;
                    h.onsite(site(c, A), p.m);
                    h.onsite(site(c, B), p.m);
                    h.onsite(site(c, C), -p.m);
                    h.onsite(site(c, D), -p.m);
                    for (amp, tgt, src) in intra {
                        h.hop(site(c, tgt), site(c, src), amp);
                    }
                    for (amp, tgt, off, src) in inter {
                        let there = [here[0] + off[0], here[1] + off[1], here[2] + off[2], here[3] + off[3]];
                        if let Some(c2) = cell_index(there) {
                            h.hop(site(c2, tgt), site(c, src), amp);
                        }
                    }
                    if let Some(c2) = cell_index([m + 1, nn + 1, j + 1, l + 1]) {
                        for (amp, s) in long {
                            h.hop(site(c2, s), site(c, s), amp);
                        }
                    }
                }
            }
        }
    }
    let hamiltonian = h.build(sites.len());
    LatticeModel::from_parts(sites, hamiltonian, ModelParams::Lattice4d(p.clone()), p.a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_keeps_only_local_terms() {
        let model = lattice4d(&Lattice4dParams::class_ai(1));
        let h = model.hamiltonian();
        assert_eq!(model.n_sites(), 4);
        // diag(M, M, -M, -M) plus four intra-cell bonds and their conjugates
        assert_eq!(h.nnz(), 4 + 8);
        assert_eq!(h.get(C, A), c64::new(-1.0, 0.0));
        assert_eq!(h.get(B, D), c64::new(1.0, 0.0));
        assert_eq!(h.get(D, D), c64::new(-0.5, 0.0));
    }

    #[test]
    fn positions_are_centred() {
        let model = lattice4d(&Lattice4dParams::class_ai(3));
        for x in model.positions() {
            let d = x.diagonal();
            let lo = d.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
            let hi = d.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            assert_eq!((lo, hi), (-1.0, 1.0));
        }
    }
}
