//! Representations of the complex Clifford relations
//! `γ_j = γ_jᴴ`, `γ_j² = I`, `γ_j γ_k = -γ_k γ_j (j ≠ k)`.
//!
//! Odd-dimensional irreducible representations come in two inequivalent
//! flavours distinguished by the sign in `γ_d = ±ε_d γ_{d-1}⋯γ_2 γ_1`. The
//! phase is anchored by `γ₁, γ₂, γ₃ = σ_x, σ_y, σ_z`, so `γ₃ = iγ₂γ₁` and
//! `ε₃ = i`, and propagated by the doubling step
//!
//! ```text
//! α_j     = γ_j ⊗ σ_x   (j ≤ d)
//! α_{d+1} = I ⊗ σ_y
//! α_{d+2} = I ⊗ σ_z
//! ```
//!
//! which forces `ε_{d+2} = iε_d`, hence `ε_d = i^{(d-1)/2}`. Every odd
//! representation built here carries the `+` orientation.
//!
//! Even-dimensional representations are truncations of the next odd one.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::c64;
use crate::linalg::dense::{frobenius, hermiticity_defect, identity, kron, max_abs};

/// Tolerance used when classifying the orientation of an odd representation.
pub const ORIENTATION_TOL: f64 = 1e-12;
/// Default tolerance for the Clifford relations.
pub const RELATION_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    RecursivePauli,
    ExplicitGamma5,
    Rotated,
    UserSupplied,
}

/// `d` anticommuting Hermitian involutions of size `r × r`.
#[derive(Debug, Clone)]
pub struct CliffordRep {
    gammas: Vec<Mat<c64>>,
    orientation: Option<i8>,
    construction: Construction,
}

fn c(re: f64, im: f64) -> c64 {
    c64::new(re, im)
}

fn mat2(a: [[c64; 2]; 2]) -> Mat<c64> {
    Mat::from_fn(2, 2, |i, j| a[i][j])
}

pub fn sigma_x() -> Mat<c64> {
    mat2([[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]])
}

pub fn sigma_y() -> Mat<c64> {
    mat2([[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]])
}

pub fn sigma_z() -> Mat<c64> {
    mat2([[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]])
}

/// `ε_d = i^{(d-1)/2}` for odd `d`.
pub fn orientation_phase(d: usize) -> c64 {
    debug_assert!(d % 2 == 1);
    match ((d - 1) / 2) % 4 {
        0 => c(1., 0.),
        1 => c(0., 1.),
        2 => c(-1., 0.),
        _ => c(0., -1.),
    }
}

/// Result of [`CliffordRep::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub tol: f64,
    /// `max_j max |γ_j - γ_jᴴ|`.
    pub hermiticity: f64,
    /// `max_j ‖γ_j² - I‖_F`.
    pub square: f64,
    /// `max_{j≠k} ‖γ_jγ_k + γ_kγ_j‖_F`.
    pub anticommutator: f64,
    /// `‖γ_d - o·ε_d γ_{d-1}⋯γ_1‖_F` for odd `d ≥ 3` with declared orientation `o`.
    pub orientation: Option<f64>,
    pub pass: bool,
}

impl CliffordRep {
    /// Wraps user-supplied generators. Shapes are checked here; the relations
    /// are checked by [`CliffordRep::validate`]. The orientation is measured.
    pub fn from_matrices(gammas: Vec<Mat<c64>>) -> Result<Self> {
        Self::check_shapes(&gammas)?;
        let mut rep = Self {
            gammas,
            orientation: None,
            construction: Construction::UserSupplied,
        };
        rep.orientation = rep.measured_orientation();
        Ok(rep)
    }

    fn check_shapes(gammas: &[Mat<c64>]) -> Result<()> {
        let Some(first) = gammas.first() else {
            return Err(Error::InvalidArgument("empty Clifford representation".into()));
        };
        let r = first.nrows();
        if r == 0 {
            return Err(Error::InvalidArgument("zero-sized Clifford generators".into()));
        }
        for (j, g) in gammas.iter().enumerate() {
            if g.nrows() != r || g.ncols() != r {
                return Err(Error::DimensionMismatch(format!(
                    "generator {} is {}x{}, expected {r}x{r}",
                    j + 1,
                    g.nrows(),
                    g.ncols()
                )));
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.gammas.len()
    }

    /// Matrix size of each generator.
    pub fn r(&self) -> usize {
        self.gammas[0].nrows()
    }

    pub fn gammas(&self) -> &[Mat<c64>] {
        &self.gammas
    }

    pub fn gamma(&self, j: usize) -> &Mat<c64> {
        &self.gammas[j]
    }

    /// Declared orientation (`±1`) for odd `d ≥ 3`; `None` otherwise.
    pub fn orientation(&self) -> Option<i8> {
        self.orientation
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    /// `ε_d γ_{d-1}⋯γ_2γ_1`, for odd `d ≥ 3`.
    pub fn orientation_product(&self) -> Option<Mat<c64>> {
        let d = self.d();
        if d < 3 || d % 2 == 0 {
            return None;
        }
        let mut prod = identity(self.r());
        for g in &self.gammas[..d - 1] {
            prod = g * &prod;
        }
        Some(prod * faer::Scale(orientation_phase(d)))
    }

    /// Orientation read off the matrices: `+1` if `γ_d = ε_d γ_{d-1}⋯γ_1`,
    /// `-1` if `γ_d = -ε_d γ_{d-1}⋯γ_1`, `None` when neither holds or `d` is
    /// even or one.
    pub fn measured_orientation(&self) -> Option<i8> {
        let p = self.orientation_product()?;
        let last = &self.gammas[self.d() - 1];
        if frobenius(&(last - &p)) <= ORIENTATION_TOL {
            Some(1)
        } else if frobenius(&(last + &p)) <= ORIENTATION_TOL {
            Some(-1)
        } else {
            None
        }
    }

    /// Checks the Clifford relations and, for odd `d ≥ 3`, the declared orientation.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let r = self.r();
        let id = identity(r);
        let mut herm: f64 = 0.0;
        let mut square: f64 = 0.0;
        let mut anti: f64 = 0.0;
        for (j, g) in self.gammas.iter().enumerate() {
            herm = herm.max(hermiticity_defect(g));
            square = square.max(frobenius(&(g * g - &id)));
            for h in &self.gammas[j + 1..] {
                anti = anti.max(frobenius(&(g * h + h * g)));
            }
        }
        let orientation = self.orientation_product().map(|p| {
            let sign = self.orientation.unwrap_or(1) as f64;
            let target = p * faer::Scale(c(sign, 0.0));
            match self.orientation {
                Some(_) => frobenius(&(&self.gammas[self.d() - 1] - &target)),
                None => f64::INFINITY,
            }
        });
        let pass = herm <= tol
            && square <= tol
            && anti <= tol
            && orientation.map_or(true, |o| o <= tol);
        ValidationReport {
            tol,
            hermiticity: herm,
            square,
            anticommutator: anti,
            orientation,
            pass,
        }
    }

    /// Every generator negated. For odd `d ≥ 3` this is the other irreducible
    /// representation and the declared orientation flips.
    pub fn negated(&self) -> Self {
        Self {
            gammas: self.gammas.iter().map(|g| -g).collect(),
            orientation: self.orientation.map(|o| -o),
            construction: self.construction,
        }
    }

    /// Every generator negated but the declared orientation kept, which leaves
    /// the representation inconsistent with its label for odd `d`.
    pub fn negated_keeping_label(&self) -> Self {
        Self {
            gammas: self.gammas.iter().map(|g| -g).collect(),
            orientation: self.orientation,
            construction: self.construction,
        }
    }

    /// The first `k` generators.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.d() {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate a {}-generator representation to {k}",
                self.d()
            )));
        }
        let mut rep = Self {
            gammas: self.gammas[..k].to_vec(),
            orientation: None,
            construction: self.construction,
        };
        rep.orientation = rep.measured_orientation();
        Ok(rep)
    }

    /// Direct sum with itself, `γ_j ⊗ I_m`; a reducible representation.
    pub fn amplify(&self, m: usize) -> Self {
        let id = identity(m);
        let mut rep = Self {
            gammas: self.gammas.iter().map(|g| kron(g, &id)).collect(),
            orientation: None,
            construction: Construction::UserSupplied,
        };
        rep.orientation = rep.measured_orientation();
        rep
    }

    /// Conjugation `Q γ_j Qᴴ` by a unitary.
    pub fn conjugate(&self, q: &Mat<c64>) -> Result<Self> {
        if q.nrows() != self.r() || q.ncols() != self.r() {
            return Err(Error::DimensionMismatch(format!(
                "unitary is {}x{}, representation has size {}",
                q.nrows(),
                q.ncols(),
                self.r()
            )));
        }
        Ok(Self {
            gammas: self.gammas.iter().map(|g| q * g * q.adjoint()).collect(),
            orientation: self.orientation,
            construction: Construction::UserSupplied,
        })
    }

    /// Largest absolute entry over all generators.
    pub fn max_entry(&self) -> f64 {
        self.gammas.iter().map(max_abs).fold(0.0, f64::max)
    }
}

/// `γ₁, γ₂, γ₃ = σ_x, σ_y, σ_z`.
pub fn pauli_rep() -> CliffordRep {
    CliffordRep {
        gammas: vec![sigma_x(), sigma_y(), sigma_z()],
        orientation: Some(1),
        construction: Construction::RecursivePauli,
    }
}

/// Irreducible representation with `d` generators of size `2^{⌊d/2⌋}`.
///
/// `d = 1` is the exception: it returns the 2×2 `σ_z`, a genuine involution
/// with spectrum `{-1, 1}`, rather than the 1×1 scalar.
pub fn build_rep(d: usize) -> Result<CliffordRep> {
    match d {
        0 => Err(Error::InvalidArgument(
            "a Clifford representation needs at least one generator".into(),
        )),
        1 => Ok(CliffordRep {
            gammas: vec![sigma_z()],
            orientation: None,
            construction: Construction::RecursivePauli,
        }),
        2 => build_rep(3)?.truncate(2),
        3 => Ok(pauli_rep()),
        d if d % 2 == 1 => {
            let base = build_rep(d - 2)?;
            let id = identity(base.r());
            let sx = sigma_x();
            let mut gammas: Vec<Mat<c64>> = base.gammas.iter().map(|g| kron(g, &sx)).collect();
            gammas.push(kron(&id, &sigma_y()));
            gammas.push(kron(&id, &sigma_z()));
            Ok(CliffordRep {
                gammas,
                orientation: Some(1),
                construction: Construction::RecursivePauli,
            })
        }
        d => build_rep(d + 1)?.truncate(d),
    }
}

/// The 4×4 five-generator set used for the four-dimensional lattice localizer,
/// entered entry by entry.
pub fn gamma5_explicit() -> CliffordRep {
    let z = c(0., 0.);
    let o = c(1., 0.);
    let m = c(-1., 0.);
    let i = c(0., 1.);
    let mi = c(0., -1.);
    let g = |rows: [[c64; 4]; 4]| Mat::from_fn(4, 4, |a, b| rows[a][b]);
    let gammas = vec![
        g([[z, z, o, z], [z, z, z, m], [o, z, z, z], [z, m, z, z]]),
        g([[z, z, mi, z], [z, z, z, mi], [i, z, z, z], [z, i, z, z]]),
        g([[z, z, z, o], [z, z, o, z], [z, o, z, z], [o, z, z, z]]),
        g([[z, z, z, mi], [z, z, i, z], [z, mi, z, z], [i, z, z, z]]),
        g([[o, z, z, z], [z, o, z, z], [z, z, m, z], [z, z, z, m]]),
    ];
    let mut rep = CliffordRep {
        gammas,
        orientation: None,
        construction: Construction::ExplicitGamma5,
    };
    rep.orientation = rep.measured_orientation();
    rep
}

/// `γ̂_j = Σ_s u_{js} γ_s` for a real orthogonal `d × d` matrix `u`.
pub fn rotate_rep(rep: &CliffordRep, u: &Mat<f64>) -> Result<CliffordRep> {
    let d = rep.d();
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "rotation is {}x{}, representation has {d} generators",
            u.nrows(),
            u.ncols()
        )));
    }
    let defect = orthogonality_defect(u);
    if defect > 1e-12 {
        return Err(Error::NotOrthogonal { defect });
    }
    let r = rep.r();
    let gammas = (0..d)
        .map(|j| {
            let mut acc = Mat::<c64>::zeros(r, r);
            for s in 0..d {
                acc += &rep.gammas[s] * faer::Scale(c(u[(j, s)], 0.0));
            }
            acc
        })
        .collect();
    let orientation = rep
        .orientation
        .map(|o| if u.determinant() < 0.0 { -o } else { o });
    Ok(CliffordRep {
        gammas,
        orientation,
        construction: Construction::Rotated,
    })
}

/// `max |UᵀU - I|`.
pub fn orthogonality_defect(u: &Mat<f64>) -> f64 {
    let utu = u.transpose() * u;
    let mut worst: f64 = 0.0;
    for i in 0..u.ncols() {
        for j in 0..u.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((utu[(i, j)] - target).abs());
        }
    }
    worst
}
