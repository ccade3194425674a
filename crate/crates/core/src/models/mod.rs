//! Matrix ensembles: small analytic examples and finite tight-binding lattices
//! together with their position operators.
//!
//! Units: energies are in units of the nearest-neighbour hopping `t`,
//! distances in units of the lattice constant `a`, unless the caller passes
//! other values explicitly.

mod examples;
mod haldane;
mod lattice4d;

pub use examples::{example_abc, fuzzy_sphere, spin_matrices};
pub use haldane::{haldane, HaldaneParams};
pub use lattice4d::{lattice4d, Lattice4dParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, CsrMatrix};
use crate::tuple::{HermitianTuple, ProbePoint};

/// One tight-binding site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub coords: Vec<f64>,
    pub sublattice: char,
    /// Integer unit-cell label.
    pub cell: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelParams {
    Haldane(HaldaneParams),
    Lattice4d(Lattice4dParams),
}

/// A finite lattice: sites, Hamiltonian and diagonal position operators.
#[derive(Debug, Clone)]
pub struct LatticeModel {
    sites: Vec<Site>,
    hamiltonian: CsrMatrix,
    positions: Vec<CsrMatrix>,
    params: ModelParams,
    lattice_constant: f64,
}

impl LatticeModel {
    pub(crate) fn from_parts(
        sites: Vec<Site>,
        hamiltonian: CsrMatrix,
        params: ModelParams,
        lattice_constant: f64,
    ) -> Self {
        let dim = sites.first().map_or(0, |s| s.coords.len());
        let positions = (0..dim)
            .map(|j| CsrMatrix::from_diagonal(&sites.iter().map(|s| s.coords[j]).collect::<Vec<_>>()))
            .collect();
        Self {
            sites,
            hamiltonian,
            positions,
            params,
            lattice_constant,
        }
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    /// Spatial dimension.
    pub fn dim(&self) -> usize {
        self.positions.len()
    }

    pub fn hamiltonian(&self) -> &CsrMatrix {
        &self.hamiltonian
    }

    pub fn positions(&self) -> &[CsrMatrix] {
        &self.positions
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn lattice_constant(&self) -> f64 {
        self.lattice_constant
    }

    pub fn label(&self) -> String {
        match &self.params {
            ModelParams::Haldane(p) => format!("haldane {}x{}", p.n1, p.n2),
            ModelParams::Lattice4d(p) => {
                let class = if p.t1.im == 0.0 { "AI" } else { "A" };
                format!("lattice4d N={} class {class}", p.n)
            }
        }
    }

    /// `(X_1, …, X_D, H)` scaled entrywise by `kappas` (one per matrix).
    pub fn scaled_tuple(&self, kappas: &[f64]) -> Result<ScaledTuple> {
        if kappas.len() != self.dim() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} scaling coefficients for a {}-dimensional model (expected {})",
                kappas.len(),
                self.dim(),
                self.dim() + 1
            )));
        }
        let mats: Vec<CsrMatrix> = self
            .positions
            .iter()
            .chain(std::iter::once(&self.hamiltonian))
            .zip(kappas)
            .map(|(m, &k)| m.scale(c64::new(k, 0.0)))
            .collect();
        Ok(ScaledTuple {
            tuple: HermitianTuple::new(mats, self.label())?,
            kappas: kappas.to_vec(),
        })
    }
}

/// A lattice tuple with the scaling coefficients that produced it.
#[derive(Debug, Clone)]
pub struct ScaledTuple {
    pub tuple: HermitianTuple,
    /// One coefficient per matrix: positions first, Hamiltonian last.
    pub kappas: Vec<f64>,
}

impl ScaledTuple {
    /// Maps a physical probe `(x_1, …, x_D, E)` to λ-space.
    pub fn probe(&self, physical: &[f64]) -> Result<ProbePoint> {
        if physical.len() != self.kappas.len() {
            return Err(Error::DimensionMismatch(format!(
                "probe has {} coordinates, expected {}",
                physical.len(),
                self.kappas.len()
            )));
        }
        Ok(ProbePoint::new(physical.iter().zip(&self.kappas).map(|(x, k)| x * k).collect()))
    }

    /// Inverse of [`ScaledTuple::probe`].
    pub fn physical(&self, lambda: &ProbePoint) -> Vec<f64> {
        lambda.coords().iter().zip(&self.kappas).map(|(l, k)| l / k).collect()
    }
}

/// `(κ_X X, κ_X Y, κ_H H)` and `λ = (κ_X x, κ_X y, κ_H E)`.
pub fn scale_2d(model: &LatticeModel, kappa_x: f64, kappa_h: f64, probe: [f64; 3]) -> Result<(ScaledTuple, ProbePoint)> {
    if model.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "scale_2d needs a 2D model, got {}D",
            model.dim()
        )));
    }
    let st = model.scaled_tuple(&[kappa_x, kappa_x, kappa_h])?;
    let p = st.probe(&probe)?;
    Ok((st, p))
}

/// `(κX_1, …, κX_4, H)` and `λ = (κx_1, …, κx_4, E)`. The Hamiltonian is not
/// rescaled: `κ` carries units of energy per distance.
pub fn scale_4d(model: &LatticeModel, kappa: f64, probe: [f64; 5]) -> Result<(ScaledTuple, ProbePoint)> {
    if model.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "scale_4d needs a 4D model, got {}D",
            model.dim()
        )));
    }
    let st = model.scaled_tuple(&[kappa, kappa, kappa, kappa, 1.0])?;
    let p = st.probe(&probe)?;
    Ok((st, p))
}

/// Shifts coordinates so that the bounding box is centred on the origin.
pub(crate) fn center_sites(sites: &mut [Site]) {
    let Some(first) = sites.first() else { return };
    let dim = first.coords.len();
    for j in 0..dim {
        let lo = sites.iter().map(|s| s.coords[j]).fold(f64::INFINITY, f64::min);
        let hi = sites.iter().map(|s| s.coords[j]).fold(f64::NEG_INFINITY, f64::max);
        let mid = 0.5 * (lo + hi);
        for s in sites.iter_mut() {
            s.coords[j] -= mid;
        }
    }
}

/// Accumulates `amp · |tgt⟩⟨src|` together with its Hermitian conjugate.
#[derive(Default)]
pub(crate) struct HoppingBuilder {
    triplets: Vec<(usize, usize, c64)>,
}

impl HoppingBuilder {
    pub fn onsite(&mut self, i: usize, e: f64) {
        if e != 0.0 {
            self.triplets.push((i, i, c64::new(e, 0.0)));
        }
    }

    pub fn hop(&mut self, tgt: usize, src: usize, amp: c64) {
        debug_assert_ne!(tgt, src);
        if amp != c64::new(0.0, 0.0) {
            self.triplets.push((tgt, src, amp));
            self.triplets.push((src, tgt, amp.conj()));
        }
    }

    pub fn build(self, n: usize) -> CsrMatrix {
        CsrMatrix::from_triplets(n, n, self.triplets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centering_uses_bounding_box() {
        let mut s = vec![
            Site { coords: vec![0.0, 1.0], sublattice: 'a', cell: vec![0] },
            Site { coords: vec![3.0, 5.0], sublattice: 'b', cell: vec![0] },
            Site { coords: vec![1.0, 2.0], sublattice: 'a', cell: vec![1] },
        ];
        center_sites(&mut s);
        assert_eq!(s[0].coords, vec![-1.5, -2.0]);
        assert_eq!(s[1].coords, vec![1.5, 2.0]);
    }
}
