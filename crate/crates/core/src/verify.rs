//! Numerical checks of the closed-form results about Clifford spectra of
//! Clifford generators, the Pauli sphere, the `d = 2` reduction to ordinary
//! spectra, and rotation/conjugation symmetry.

use std::time::Instant;

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{build_rep, gamma5_explicit, pauli_rep, rotate_rep, CliffordRep};
use crate::error::{Error, Result};
use crate::linalg::dense::{hermitian_eigenvalues, singular_values};
use crate::linalg::c64;
use crate::localizer::Localizer;
use crate::sampling::{random_hermitian, random_in_box, random_in_shell, random_orthogonal, random_unit_vector, random_unitary};
use crate::tuple::{HermitianTuple, ProbePoint};

/// Sphere-membership tolerance for odd-`d` generators.
pub const SPHERE_TOL: f64 = 1e-8;
/// Agreement tolerance between two computations of the same gap.
pub const GAP_TOL: f64 = 1e-10;

/// How a measured value is compared with its expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `|measured - expected| ≤ tol`.
    Close,
    /// `measured ≤ expected`.
    AtMost,
    /// `measured > expected`.
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub measured: f64,
    pub expected: f64,
    pub tol: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    pub fn close(id: &str, description: impl Into<String>, measured: f64, expected: f64, tol: f64) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            measured,
            expected,
            tol,
            comparison: Comparison::Close,
            pass: (measured - expected).abs() <= tol,
        }
    }

    pub fn at_most(id: &str, description: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            measured,
            expected: bound,
            tol: 0.0,
            comparison: Comparison::AtMost,
            pass: measured <= bound,
        }
    }

    pub fn above(id: &str, description: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            measured,
            expected: bound,
            tol: 0.0,
            comparison: Comparison::Above,
            pass: measured > bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: String,
    pub d: Option<usize>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub seconds: f64,
}

impl TheoremReport {
    fn new(theorem: &str, d: Option<usize>, checks: Vec<Check>, start: Instant) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            theorem: theorem.into(),
            d,
            checks,
            pass,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

/// Binomial coefficient as an exact integer.
pub fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn gamma_localizer(d: usize) -> Result<(HermitianTuple, CliffordRep)> {
    let rep = build_rep(d)?;
    Ok((HermitianTuple::from_rep(&rep).with_label(format!("gamma d={d}")), rep))
}

/// Even `d`: the Clifford spectrum of the generators is `{0}`.
pub fn verify_even_gamma(d: usize, seed: u64) -> Result<TheoremReport> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::InvalidArgument(format!("even-d check needs even d >= 2, got {d}")));
    }
    let start = Instant::now();
    let (tuple, rep) = gamma_localizer(d)?;
    let loc = Localizer::new(&tuple, &rep)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = vec![Check::at_most(
        "gap-origin",
        "gap at λ = 0",
        loc.gap(&ProbePoint::origin(d))?,
        GAP_TOL,
    )];
    let mut min_gap = f64::INFINITY;
    for _ in 0..100 {
        let l = ProbePoint::new(random_in_shell(d, 0.1, 3.0, &mut rng));
        min_gap = min_gap.min(loc.gap(&l)?);
    }
    checks.push(Check::above(
        "gap-off-origin",
        "minimum gap over 100 random λ with 0.1 ≤ |λ| ≤ 3",
        min_gap,
        0.0,
    ));
    Ok(TheoremReport::new("even-gamma", Some(d), checks, start))
}

/// Odd `d ≥ 3`: the Clifford spectrum of the generators is the unit sphere,
/// with signature `C(d-1, (d-1)/2)` inside and `0` outside.
pub fn verify_odd_gamma(d: usize, seed: u64) -> Result<TheoremReport> {
    if d < 3 || d % 2 != 1 {
        return Err(Error::InvalidArgument(format!("odd-d check needs odd d >= 3, got {d}")));
    }
    let start = Instant::now();
    let (tuple, rep) = gamma_localizer(d)?;
    let loc = Localizer::new(&tuple, &rep)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let origin = ProbePoint::origin(d);
    let expected = binomial(d as u64 - 1, (d as u64 - 1) / 2) as f64;
    let report0 = loc.report(&origin, 0)?;
    let mut checks = vec![
        Check::close(
            "signature-origin",
            format!("signature at λ = 0 equals C({}, {})", d - 1, (d - 1) / 2),
            report0.signature.map_or(f64::NAN, |s| s as f64),
            expected,
            0.0,
        ),
        Check::close("gap-origin", "gap at λ = 0 equals 1", report0.gap, 1.0, GAP_TOL),
    ];
    let mut worst_sphere: f64 = 0.0;
    for _ in 0..50 {
        let l = ProbePoint::new(random_unit_vector(d, &mut rng));
        worst_sphere = worst_sphere.max(loc.gap(&l)?);
    }
    checks.push(Check::at_most(
        "gap-sphere",
        "maximum gap over 50 random unit λ",
        worst_sphere,
        SPHERE_TOL,
    ));
    let mut worst_sig: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    for _ in 0..50 {
        let l = ProbePoint::new(random_in_shell(d, 2.0, 2.0, &mut rng));
        let r = loc.report(&l, 0)?;
        min_gap = min_gap.min(r.gap);
        worst_sig = worst_sig.max(r.signature.map_or(f64::INFINITY, |s| (s as f64).abs()));
    }
    checks.push(Check::close(
        "signature-outside",
        "largest |signature| over 50 random λ with |λ| = 2",
        worst_sig,
        0.0,
        0.0,
    ));
    checks.push(Check::above("gap-outside", "minimum gap over the same points", min_gap, 0.0));
    Ok(TheoremReport::new("odd-gamma", Some(d), checks, start))
}

/// The diagonalizing unitary for `L_{(0,0,z)}` of the Pauli matrices.
///
/// Its last row is negated relative to the commonly printed form: with the
/// printed sign, `Q(I⊗σ_z)Q*` has `-1` at `(0, 3)` and the first block comes
/// out as `[[1, z], [z, -3]]`. The flip is a diagonal unitary, so spectra agree.
pub fn pauli_block_unitary() -> Mat<c64> {
    let s = 1.0 / 2f64.sqrt();
    let rows = [[0.0, 1.0, 1.0, 0.0], [1.0, 0.0, 0.0, 1.0], [1.0, 0.0, 0.0, -1.0], [0.0, -1.0, 1.0, 0.0]];
    Mat::from_fn(4, 4, |i, j| c64::new(s * rows[i][j], 0.0))
}

/// `Q L_{(0,0,z)} Qᴴ` as predicted: blocks `[[1, -z], [-z, -3]]` on basis
/// vectors `{0, 3}` and `[[1, -z], [-z, 1]]` on `{1, 2}`.
pub fn pauli_block_form(z: f64) -> Mat<c64> {
    let mut m = Mat::<c64>::zeros(4, 4);
    let r = |x: f64| c64::new(x, 0.0);
    m[(0, 0)] = r(1.0);
    m[(3, 3)] = r(-3.0);
    m[(0, 3)] = r(-z);
    m[(3, 0)] = r(-z);
    m[(1, 1)] = r(1.0);
    m[(2, 2)] = r(1.0);
    m[(1, 2)] = r(-z);
    m[(2, 1)] = r(-z);
    m
}

/// `μ(λ) = ||λ| - 1|` for the Pauli matrices, plus the block-decomposition fixture.
pub fn verify_pauli_closed_form(n_samples: usize, seed: u64) -> Result<TheoremReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let start = Instant::now();
    let rep = pauli_rep();
    let tuple = HermitianTuple::from_rep(&rep).with_label("pauli");
    let loc = Localizer::new(&tuple, &rep)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n_samples {
        let l = ProbePoint::new(random_in_box(3, -2.0, 2.0, &mut rng));
        let want = (l.norm() - 1.0).abs();
        worst = worst.max((loc.gap(&l)? - want).abs());
    }
    let mut checks = vec![
        Check::close("gap-origin", "gap at λ = 0", loc.gap(&ProbePoint::origin(3))?, 1.0, GAP_TOL),
        Check::at_most(
            "closed-form",
            format!("max |gap - ||λ| - 1|| over {n_samples} random λ in [-2, 2]³"),
            worst,
            GAP_TOL,
        ),
    ];
    let q = pauli_block_unitary();
    let mut worst_block: f64 = 0.0;
    for z in [0.0, 0.5, -1.3, 2.0] {
        let l = loc.assemble_dense(&ProbePoint::new(vec![0.0, 0.0, z]))?;
        let conj = &q * &l * q.adjoint();
        let want = pauli_block_form(z);
        for i in 0..4 {
            for j in 0..4 {
                worst_block = worst_block.max((conj[(i, j)] - want[(i, j)]).norm());
            }
        }
    }
    checks.push(Check::at_most(
        "block-form",
        "max entry error of Q L_(0,0,z) Qᴴ against the 2×2 block form",
        worst_block,
        1e-14,
    ));
    let z: f64 = 0.5;
    let eigs = loc.eig_window(&ProbePoint::new(vec![0.0, 0.0, z]), 4)?;
    let r = (z * z + 4.0).sqrt();
    let mut want = [1.0 + z, 1.0 - z, -1.0 + r, -1.0 - r];
    want.sort_by(f64::total_cmp);
    let spec_err = eigs.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    checks.push(Check::at_most(
        "spectrum-z",
        "spectrum at λ = (0, 0, 1/2) against {1 ± z, -1 ± sqrt(z² + 4)}",
        spec_err,
        GAP_TOL,
    ));
    Ok(TheoremReport::new("pauli-sphere", Some(3), checks, start))
}

/// For `d = 2`, the gap at `(x, y)` is the smallest singular value of
/// `A₁ + iA₂ - (x + iy)`.
pub fn verify_d2_equivalence(n: usize, trials: usize, probes: usize, seed: u64) -> Result<TheoremReport> {
    if n < 2 {
        return Err(Error::InvalidArgument("d = 2 check needs n >= 2".into()));
    }
    let start = Instant::now();
    let rep = build_rep(2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    for _ in 0..trials {
        let a1 = random_hermitian(n, &mut rng);
        let a2 = random_hermitian(n, &mut rng);
        let tuple = HermitianTuple::from_dense(&[a1.clone(), a2.clone()], "random pair")?;
        let loc = Localizer::new(&tuple, &rep)?;
        let b = Mat::<c64>::from_fn(n, n, |i, j| a1[(i, j)] + c64::new(0.0, 1.0) * a2[(i, j)]);
        for _ in 0..probes {
            let p = random_in_box(2, -3.0, 3.0, &mut rng);
            let shifted = Mat::<c64>::from_fn(n, n, |i, j| {
                if i == j {
                    b[(i, j)] - c64::new(p[0], p[1])
                } else {
                    b[(i, j)]
                }
            });
            let sv = singular_values(&shifted)?;
            let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
            worst = worst.max((loc.gap(&ProbePoint::new(p))? - smin).abs());
        }
        let ev = b.eigenvalues().map_err(|e| Error::Eigendecomposition(format!("{e:?}")))?;
        for z in ev {
            let g = loc.gap(&ProbePoint::new(vec![z.re, z.im]))?;
            worst_eig = worst_eig.max(g);
        }
    }
    let checks = vec![
        Check::at_most(
            "smin-agreement",
            format!("max |gap - s_min| over {trials} random {n}×{n} pairs × {probes} probes"),
            worst,
            GAP_TOL,
        ),
        Check::at_most(
            "eigenvalues-in-spectrum",
            "max gap at the eigenvalues of A₁ + iA₂",
            worst_eig,
            SPHERE_TOL,
        ),
    ];
    Ok(TheoremReport::new("d2-equivalence", Some(2), checks, start))
}

/// Gap covariance under `O(d)` rotations of tuple and probe, signature
/// invariance under `SO(d)`, and invariance under unitary conjugation.
pub fn verify_symmetry(
    tuple: &HermitianTuple,
    rep: &CliffordRep,
    trials: usize,
    seed: u64,
) -> Result<TheoremReport> {
    let start = Instant::now();
    let d = tuple.d();
    let loc = Localizer::new(tuple, rep)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = 0.5 * tuple.norms().iter().sum::<f64>().max(1.0);
    let mut worst_gap: f64 = 0.0;
    let mut sig_mismatch = 0usize;
    let mut sig_tested = 0usize;
    let mut worst_conj: f64 = 0.0;
    for trial in 0..trials {
        let proper = trial % 2 == 0;
        let u = random_orthogonal(d, proper, &mut rng);
        let rotated = tuple.rotate(&u)?;
        let rloc = Localizer::new(&rotated, rep)?;
        let lambda = random_in_box(d, -radius, radius, &mut rng);
        let ulambda: Vec<f64> = (0..d).map(|j| (0..d).map(|s| u[(j, s)] * lambda[s]).sum()).collect();
        let (l, ul) = (ProbePoint::new(lambda), ProbePoint::new(ulambda));
        let a = loc.report(&l, 0)?;
        let b = rloc.report(&ul, 0)?;
        worst_gap = worst_gap.max((a.gap - b.gap).abs());
        if proper && a.gap > 1e-6 {
            sig_tested += 1;
            if a.signature != b.signature {
                sig_mismatch += 1;
            }
        }
        let q = random_unitary(tuple.n(), &mut rng);
        let conj = tuple.conjugate(&q)?;
        let cloc = Localizer::new(&conj, rep)?;
        let c = cloc.report(&l, 0)?;
        worst_conj = worst_conj.max((a.gap - c.gap).abs());
        if a.gap > 1e-6 && a.signature != c.signature {
            sig_mismatch += 1;
        }
    }
    let checks = vec![
        Check::at_most("rotation-gap", format!("max |gap(λ) - gap_U(Uλ)| over {trials} rotations"), worst_gap, GAP_TOL),
        Check::close(
            "rotation-signature",
            format!("signature mismatches over {sig_tested} proper rotations and all conjugations"),
            sig_mismatch as f64,
            0.0,
            0.0,
        ),
        Check::at_most("conjugation-gap", "max gap change under unitary conjugation", worst_conj, GAP_TOL),
    ];
    Ok(TheoremReport::new("symmetry", Some(d), checks, start))
}

/// The three recorded symmetry instances: identity rotation on the Pauli
/// tuple, the improper `diag(1, 1, -1)` on gaps, and a random `SO(5)` on the
/// explicit five-generator tuple.
pub fn verify_symmetry_instances(seed: u64) -> Result<TheoremReport> {
    let start = Instant::now();
    let mut checks = Vec::new();
    let p = pauli_rep();
    let pt = HermitianTuple::from_rep(&p);
    let ploc = Localizer::new(&pt, &p)?;
    let lambda = ProbePoint::new(vec![0.3, -0.2, 0.4]);
    let base = ploc.report(&lambda, 0)?;

    let id = Mat::<f64>::identity(3, 3);
    let same = pt.rotate(&id)?;
    let r = Localizer::new(&same, &p)?.report(&lambda, 0)?;
    checks.push(Check::close("identity-gap", "identity rotation leaves the gap unchanged", r.gap, base.gap, 0.0));

    let mut flip = Mat::<f64>::identity(3, 3);
    flip[(2, 2)] = -1.0;
    let flipped = pt.rotate(&flip)?;
    let fl = ProbePoint::new(vec![0.3, -0.2, -0.4]);
    let r = Localizer::new(&flipped, &p)?.gap(&fl)?;
    checks.push(Check::close("improper-gap", "diag(1, 1, -1) covariance of the gap", r, base.gap, GAP_TOL));

    let g = gamma5_explicit();
    let gt = HermitianTuple::from_rep(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_orthogonal(5, true, &mut rng);
    let rotated = gt.rotate(&u)?;
    let l = ProbePoint::new(random_in_shell(5, 0.2, 0.8, &mut rng));
    let ul = ProbePoint::new((0..5).map(|j| (0..5).map(|s| u[(j, s)] * l.coords()[s]).sum()).collect());
    let a = Localizer::new(&gt, &g)?.report(&l, 0)?;
    let b = Localizer::new(&rotated, &g)?.report(&ul, 0)?;
    checks.push(Check::close("so5-gap", "random SO(5) covariance of the gap", b.gap, a.gap, GAP_TOL));
    checks.push(Check::close(
        "so5-signature",
        "random SO(5) invariance of the signature",
        b.signature.map_or(f64::NAN, |s| s as f64),
        a.signature.map_or(f64::NAN, |s| s as f64),
        0.0,
    ));
    // The rotated representation is again a valid representation.
    let rr = rotate_rep(&g, &u)?;
    let v = rr.validate(crate::clifford::RELATION_TOL * 10.0);
    checks.push(Check::at_most("so5-relations", "Clifford defect of the rotated generators", v.anticommutator.max(v.square), 1e-12));
    Ok(TheoremReport::new("symmetry-instances", None, checks, start))
}

/// Every report above, for `d` up to `d_max`.
pub fn run_suite(d_max: usize, seed: u64) -> Result<Vec<TheoremReport>> {
    let mut reports = Vec::new();
    for d in (2..=d_max).step_by(2) {
        reports.push(verify_even_gamma(d, seed)?);
    }
    for d in (3..=d_max).step_by(2) {
        reports.push(verify_odd_gamma(d, seed)?);
    }
    reports.push(verify_pauli_closed_form(1000, seed)?);
    reports.push(verify_d2_equivalence(6, 10, 20, seed)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mats: Vec<Mat<c64>> = (0..3).map(|_| random_hermitian(4, &mut rng)).collect();
    let tuple = HermitianTuple::from_dense(&mats, "random triple")?;
    reports.push(verify_symmetry(&tuple, &pauli_rep(), 20, seed)?);
    reports.push(verify_symmetry_instances(seed)?);
    Ok(reports)
}

/// Estimated bytes for one dense localizer of the `d`-generator tuple.
pub fn dense_memory_estimate(d: usize) -> u64 {
    let r = 1u64 << (d / 2);
    let n = r * r;
    n * n * 16
}

/// Eigenvalues of `L_0` for the `d`-generator tuple, for diagnostics.
pub fn origin_spectrum(d: usize) -> Result<Vec<f64>> {
    let (tuple, rep) = gamma_localizer(d)?;
    let loc = Localizer::new(&tuple, &rep)?;
    hermitian_eigenvalues(&loc.assemble_dense(&ProbePoint::origin(d))?)
}
