//! Finite Haldane lattice on a rectangular cut of the honeycomb lattice.
//!
//! Geometry: sublattice `a` at the cell origin and `b` at `(a, 0)`, lattice
//! vectors `a₁ = (3a/2, √3a/2)` and `a₂ = (0, √3a)`. Cell `(m, n)` with
//! `0 ≤ m < N₁`, `0 ≤ n < N₂` sits at `(3a/2·m, √3a·(n + (m mod 2)/2))`, so
//! the sample is a rectangle with armchair rows along `x`.
//!
//! Next-nearest-neighbour hops carry `e^{iνφ}` with `ν = +1` when the two-bond
//! path from source to target turns counterclockwise, as in Haldane's model.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{center_sites, HoppingBuilder, LatticeModel, ModelParams, Site};
use crate::linalg::c64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaldaneParams {
    pub n1: usize,
    pub n2: usize,
    /// On-site energy, `+M` on `a` and `-M` on `b`.
    #[serde(default)]
    pub m: f64,
    #[serde(default = "one")]
    pub t: f64,
    #[serde(default)]
    pub tc: f64,
    /// Radians.
    #[serde(default)]
    pub phi: f64,
    /// Site-to-site spacing.
    #[serde(default = "one")]
    pub a: f64,
    /// Attach `+φ` to clockwise instead of counterclockwise hops.
    #[serde(default)]
    pub clockwise: bool,
}

fn one() -> f64 {
    1.0
}

impl HaldaneParams {
    /// The sample of the κ-comparison figure: 12×12 cells, `M = 0`,
    /// `t_c = t/2`, `φ = π/6`.
    pub fn figure_sample() -> Self {
        Self {
            n1: 12,
            n2: 12,
            m: 0.0,
            t: 1.0,
            tc: 0.5,
            phi: std::f64::consts::PI / 6.0,
            a: 1.0,
            clockwise: false,
        }
    }
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Nearest-neighbour vectors from an `a` site (unit spacing); `b` uses their negatives.
const NN_A: [[f64; 2]; 3] = [[1.0, 0.0], [-0.5, -SQRT3 / 2.0], [-0.5, SQRT3 / 2.0]];

fn bravais(m: usize, n: usize) -> (i64, i64) {
    (m as i64, n as i64 - (m as i64).div_euclid(2))
}

/// Counterclockwise sign of the two-bond path realising displacement `v`
/// (unit spacing) from a site on sublattice `a` (`from_a`) or `b`.
fn chirality(v: [f64; 2], from_a: bool) -> f64 {
    let s = if from_a { 1.0 } else { -1.0 };
    for d in NN_A {
        let d1 = [s * d[0], s * d[1]];
        let d2 = [v[0] - d1[0], v[1] - d1[1]];
        // d2 must be a bond leaving the other sublattice.
        let is_bond = NN_A
            .iter()
            .any(|e| (d2[0] + s * e[0]).abs() < 1e-9 && (d2[1] + s * e[1]).abs() < 1e-9);
        if is_bond {
            return (d1[0] * d2[1] - d1[1] * d2[0]).signum();
        }
    }
    unreachable!("displacement is not a next-nearest-neighbour vector")
}

pub fn haldane(p: &HaldaneParams) -> LatticeModel {
    assert!(p.n1 >= 1 && p.n2 >= 1, "Haldane sample needs at least one cell");
    let mut sites = Vec::with_capacity(2 * p.n1 * p.n2);
    let mut cell_of: HashMap<(i64, i64), usize> = HashMap::new();
    for m in 0..p.n1 {
        for n in 0..p.n2 {
            let x = 1.5 * p.a * m as f64;
            let y = SQRT3 * p.a * (n as f64 + (m % 2) as f64 / 2.0);
            let cell = vec![m as i64, n as i64];
            cell_of.insert(bravais(m, n), sites.len() / 2);
            sites.push(Site { coords: vec![x, y], sublattice: 'a', cell: cell.clone() });
            sites.push(Site { coords: vec![x + p.a, y], sublattice: 'b', cell });
        }
    }
    center_sites(&mut sites);

    let n_sites = sites.len();
    let mut h = HoppingBuilder::default();
    for c in 0..n_sites / 2 {
        h.onsite(2 * c, p.m);
        h.onsite(2 * c + 1, -p.m);
    }
    let lookup = |b: (i64, i64)| cell_of.get(&b).copied();
    let mut cells: Vec<(&(i64, i64), &usize)> = cell_of.iter().collect();
    cells.sort_by_key(|(_, &c)| c);
    for (&(m, k), &c) in cells {
        let a_site = 2 * c;
        // Nearest neighbours of the a site: b in this cell, in cell -a₁ and in cell -a₁+a₂.
        for nb in [(m, k), (m - 1, k), (m - 1, k + 1)] {
            if let Some(c2) = lookup(nb) {
                h.hop(2 * c2 + 1, a_site, c64::new(-p.t, 0.0));
            }
        }
        // Next-nearest neighbours along +a₁, +a₂ and +a₁-a₂ on both sublattices.
        if p.tc != 0.0 {
            for (dm, dk) in [(1, 0), (0, 1), (1, -1)] {
                let Some(c2) = lookup((m + dm, k + dk)) else { continue };
                let v = [1.5 * dm as f64, SQRT3 / 2.0 * dm as f64 + SQRT3 * dk as f64];
                for (offset, from_a) in [(0, true), (1, false)] {
                    let mut nu = chirality(v, from_a);
                    if p.clockwise {
                        nu = -nu;
                    }
                    let amp = c64::from_polar(-p.tc, nu * p.phi);
                    h.hop(2 * c2 + offset, 2 * c + offset, amp);
                }
            }
        }
    }
    let hamiltonian = h.build(n_sites);
    LatticeModel::from_parts(sites, hamiltonian, ModelParams::Haldane(p.clone()), p.a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_is_one_bond() {
        let m = haldane(&HaldaneParams { n1: 1, n2: 1, m: 0.3, t: 1.0, tc: 0.2, phi: 0.5, a: 1.0, clockwise: false });
        let h = m.hamiltonian();
        assert_eq!(h.get(0, 0), c64::new(0.3, 0.0));
        assert_eq!(h.get(1, 1), c64::new(-0.3, 0.0));
        assert_eq!(h.get(0, 1), c64::new(-1.0, 0.0));
        assert_eq!(h.nnz(), 4);
    }

    #[test]
    fn chirality_is_opposite_on_the_two_sublattices() {
        let v = [1.5, SQRT3 / 2.0];
        assert_eq!(chirality(v, true), -chirality(v, false));
        assert_eq!(chirality(v, true), -chirality([-v[0], -v[1]], true));
    }

    #[test]
    fn counterclockwise_triangle_accumulates_three_phases() {
        // The three a sites around one hexagon: hopping counterclockwise
        // around the triangle picks up 3φ.
        let p = HaldaneParams { n1: 3, n2: 3, m: 0.0, t: 1.0, tc: 1.0, phi: 0.2, a: 1.0, clockwise: false };
        let model = haldane(&p);
        let h = model.hamiltonian();
        let s = model.sites();
        // The point a to the right of the b site of cell (0,1) is a hexagon centre.
        let centre = [s[2 + 1].coords[0] + 1.0, s[2 + 1].coords[1]];
        let mut tri: Vec<usize> = (0..s.len())
            .filter(|&i| s[i].sublattice == 'a')
            .filter(|&i| ((s[i].coords[0] - centre[0]).hypot(s[i].coords[1] - centre[1]) - 1.0).abs() < 1e-9)
            .collect();
        assert_eq!(tri.len(), 3);
        let angle = |i: usize| (s[i].coords[1] - centre[1]).atan2(s[i].coords[0] - centre[0]);
        tri.sort_by(|&x, &y| angle(x).total_cmp(&angle(y)));
        // Counterclockwise order: tri[0] -> tri[1] -> tri[2] -> tri[0].
        let loop_phase = h.get(tri[1], tri[0]) * h.get(tri[2], tri[1]) * h.get(tri[0], tri[2]);
        let want = c64::from_polar(-1.0, 3.0 * 0.2);
        assert!((loop_phase - want).norm() < 1e-12, "{loop_phase} vs {want}");
    }
}
