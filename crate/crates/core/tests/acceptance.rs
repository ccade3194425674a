//! Acceptance criteria 1 to 10, one PASS/FAIL line each.
//!
//! Run with `cargo test -p localizer-lab --test acceptance`. The N = 5
//! figure tier of criteria 7 and 8 takes tens of minutes on one core and only
//! runs with `-- --slow` (or `LOCALIZER_LAB_SLOW=1`).

use std::process::ExitCode;
use std::time::Instant;

use faer::Mat;
use localizer_lab::localizer::{obstruction_norms, SignatureMethod};
use localizer_lab::models::{
    example_abc, fuzzy_sphere, haldane, lattice4d, scale_2d, scale_4d, HaldaneParams, Lattice4dParams,
};
use localizer_lab::sampling::{random_hermitian, random_in_box, random_in_shell, random_orthogonal, random_unit_vector, random_unitary};
use localizer_lab::spectrum::{component_count, point_cloud, ray_crossings, scan, zero_set, ScanGrid};
use localizer_lab::{build_rep, c64, gamma5_explicit, pauli_rep, CliffordRep, HermitianTuple, Localizer, LocalizerConfig, ProbePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Tolerances, pinned.
const PAULI_TOL: f64 = 1e-10;
const EVEN_ORIGIN_TOL: f64 = 1e-10;
const SPHERE_TOL: f64 = 1e-8;
const D2_TOL: f64 = 1e-10;
const SYM_TOL: f64 = 1e-10;
const NORM_X_TOL: f64 = 1e-12;
const FUZZY_TOL: f64 = 1e-13;
const KAPPA_4D: f64 = 0.1;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn report(label: &str, o: &Outcome) {
    println!("{} criterion {label}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
}

/// Independent dense assembly of `Σ (A_j - λ_j) ⊗ γ_j`.
fn oracle_localizer(tuple: &HermitianTuple, rep: &CliffordRep, lambda: &[f64]) -> Mat<c64> {
    let n = tuple.n();
    let r = rep.r();
    let mut l = Mat::<c64>::zeros(n * r, n * r);
    for (j, a) in tuple.matrices().iter().enumerate() {
        let a = a.to_dense();
        let g = rep.gamma(j);
        for p in 0..n {
            for q in 0..n {
                let mut apq = a[(p, q)];
                if p == q {
                    apq -= c64::new(lambda[j], 0.0);
                }
                if apq == c64::new(0.0, 0.0) {
                    continue;
                }
                for s in 0..r {
                    for t in 0..r {
                        l[(p * r + s, q * r + t)] += apq * g[(s, t)];
                    }
                }
            }
        }
    }
    l
}

fn oracle_eigs(tuple: &HermitianTuple, rep: &CliffordRep, lambda: &[f64]) -> Vec<f64> {
    let l = oracle_localizer(tuple, rep, lambda);
    l.self_adjoint_eigenvalues(faer::Side::Lower).unwrap()
}

fn oracle_gap(tuple: &HermitianTuple, rep: &CliffordRep, lambda: &[f64]) -> f64 {
    oracle_eigs(tuple, rep, lambda).iter().fold(f64::INFINITY, |m, e| m.min(e.abs()))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let rep = pauli_rep();
    let t = HermitianTuple::from_rep(&rep);
    let loc = Localizer::new(&t, &rep).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let l = ProbePoint::new(random_in_box(3, -2.0, 2.0, &mut rng));
        worst = worst.max((loc.gap(&l).unwrap() - (l.norm() - 1.0).abs()).abs());
    }
    let mut bad_sig = 0;
    for _ in 0..100 {
        let inside = ProbePoint::new(random_in_shell(3, 0.0, 0.9, &mut rng));
        let outside = ProbePoint::new(random_in_shell(3, 1.1, 2.0, &mut rng));
        bad_sig += (loc.signature(&inside).unwrap() != 2) as usize;
        bad_sig += (loc.signature(&outside).unwrap() != 0) as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(
        worst <= PAULI_TOL && bad_sig == 0 && secs < 5.0,
        format!("max |gap - ||λ|-1|| = {worst:.2e} (tol {PAULI_TOL:.0e}), signature mismatches {bad_sig}/200, {secs:.2}s (< 5s)"),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2, 4, 6] {
        let rep = build_rep(d).unwrap();
        let t = HermitianTuple::from_rep(&rep);
        let loc = Localizer::new(&t, &rep).unwrap();
        let g0 = loc.gap(&ProbePoint::origin(d)).unwrap();
        let mut min_gap = f64::INFINITY;
        let mut worst_oracle: f64 = 0.0;
        for _ in 0..100 {
            let l = random_in_shell(d, 0.1, 3.0, &mut rng);
            let g = loc.gap(&ProbePoint::new(l.clone())).unwrap();
            min_gap = min_gap.min(g);
            worst_oracle = worst_oracle.max((g - oracle_gap(&t, &rep, &l)).abs());
        }
        ok &= g0 <= EVEN_ORIGIN_TOL && min_gap > 0.0 && worst_oracle <= SYM_TOL;
        parts.push(format!("d={d}: gap(0)={g0:.1e}, min off-origin gap {min_gap:.3e}"));
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(ok && secs < 10.0, format!("{}; {secs:.2}s (< 10s)", parts.join("; ")))
}

fn criterion_3() -> Outcome {
    let expected = [(3, 2i64), (5, 6), (7, 20), (9, 70), (11, 252)];
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut ok = true;
    let mut parts = Vec::new();
    let mut small_secs = 0.0;
    let mut d11_secs = 0.0;
    for (d, want) in expected {
        let start = Instant::now();
        let rep = build_rep(d).unwrap();
        let t = HermitianTuple::from_rep(&rep);
        let loc = Localizer::new(&t, &rep).unwrap();
        let sig0 = loc.signature(&ProbePoint::origin(d)).unwrap();
        let mut worst_sphere: f64 = 0.0;
        for _ in 0..50 {
            worst_sphere = worst_sphere.max(loc.gap(&ProbePoint::new(random_unit_vector(d, &mut rng))).unwrap());
        }
        let mut nonzero_outside = 0;
        for _ in 0..10 {
            let l = ProbePoint::new(random_in_shell(d, 2.0, 2.0, &mut rng));
            nonzero_outside += (loc.signature(&l).unwrap() != 0) as usize;
        }
        let secs = start.elapsed().as_secs_f64();
        if d <= 9 {
            small_secs += secs;
        } else {
            d11_secs = secs;
        }
        ok &= sig0 == want && worst_sphere <= SPHERE_TOL && nonzero_outside == 0;
        parts.push(format!("d={d}: sig {sig0} (want {want}), sphere gap {worst_sphere:.1e}"));
    }
    ok &= small_secs < 60.0 && d11_secs < 600.0;
    Outcome::new(
        ok,
        format!("{}; d<=9 {small_secs:.1}s (< 60s), d=11 {d11_secs:.1}s (< 600s)", parts.join("; ")),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let rep = pauli_rep();
    let grid = ScanGrid::parse(3, "x1=-2:2:161,x2=-2:2:161", "x3=0").unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (t, want) in [(1.0 / 7.0, 3), (0.2, 3), (0.3, 1), (1.0, 1)] {
        let tuple = example_abc(t);
        let loc = Localizer::new(&tuple, &rep).unwrap();
        let r = scan(&loc, &grid, false, None).unwrap();
        let cloud = point_cloud(&r, &zero_set(&r, grid.default_eps()));
        let count = component_count(&cloud, grid.default_radius()).unwrap().count;
        ok &= count == want && r.failures.is_empty();
        parts.push(format!("t={t:.4}: {count} (want {want})"));
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(ok && secs < 120.0, format!("{}; {secs:.1}s (< 120s)", parts.join(", ")))
}

fn criterion_5() -> Outcome {
    let rep = build_rep(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a1 = random_hermitian(8, &mut rng);
        let a2 = random_hermitian(8, &mut rng);
        let t = HermitianTuple::from_dense(&[a1.clone(), a2.clone()], "pair").unwrap();
        let loc = Localizer::new(&t, &rep).unwrap();
        for _ in 0..20 {
            let p = random_in_box(2, -3.0, 3.0, &mut rng);
            let z = c64::new(p[0], p[1]);
            let m = Mat::<c64>::from_fn(8, 8, |i, j| {
                a1[(i, j)] + c64::new(0.0, 1.0) * a2[(i, j)] - if i == j { z } else { c64::new(0.0, 0.0) }
            });
            let smin = m.singular_values().unwrap().into_iter().fold(f64::INFINITY, f64::min);
            worst = worst.max((loc.gap(&ProbePoint::new(p)).unwrap() - smin).abs());
        }
    }
    Outcome::new(worst <= D2_TOL, format!("max |gap - s_min(A1 + iA2 - z)| = {worst:.2e} over 1000 probes (tol {D2_TOL:.0e})"))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut worst: f64 = 0.0;
    let mut sig_mismatch = 0usize;
    let mut instances = 0usize;
    let reps: Vec<CliffordRep> = (2..=5).map(|d| build_rep(d).unwrap()).collect();
    let random_tuple = |d: usize, rng: &mut ChaCha8Rng| {
        let mats: Vec<Mat<c64>> = (0..d).map(|_| random_hermitian(3, rng)).collect();
        HermitianTuple::from_dense(&mats, "random").unwrap()
    };
    let sig = |loc: &Localizer, l: &ProbePoint| loc.report(l, 0).unwrap();
    for kind in 0..4 {
        for _ in 0..250 {
            let d = rng.random_range(2..=5usize);
            let rep = &reps[d - 2];
            let t = random_tuple(d, &mut rng);
            let l = ProbePoint::new(random_in_box(d, -1.5, 1.5, &mut rng));
            let loc = Localizer::new(&t, rep).unwrap();
            let a = sig(&loc, &l);
            let b = match kind {
                // Another representation of the same algebra.
                0 => {
                    let w = random_unitary(rep.r(), &mut rng);
                    let other = rep.conjugate(&w).unwrap();
                    sig(&Localizer::new(&t, &other).unwrap(), &l)
                }
                // O(d) covariance of the gap, SO(d) for the signature.
                1 | 2 => {
                    let u = random_orthogonal(d, kind == 2, &mut rng);
                    let rt = t.rotate(&u).unwrap();
                    let ul: Vec<f64> = (0..d).map(|i| (0..d).map(|k| u[(i, k)] * l.coords()[k]).sum()).collect();
                    let mut r = sig(&Localizer::new(&rt, rep).unwrap(), &ProbePoint::new(ul));
                    if kind == 1 {
                        r.signature = a.signature;
                    }
                    r
                }
                _ => {
                    let q = random_unitary(3, &mut rng);
                    let ct = t.conjugate(&q).unwrap();
                    sig(&Localizer::new(&ct, rep).unwrap(), &l)
                }
            };
            worst = worst.max((a.gap - b.gap).abs());
            if a.gap > 1e-6 && a.signature != b.signature {
                sig_mismatch += 1;
            }
            instances += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(
        worst <= SYM_TOL && sig_mismatch == 0 && secs < 30.0,
        format!("{instances} instances: max gap change {worst:.2e} (tol {SYM_TOL:.0e}), signature mismatches {sig_mismatch}, {secs:.1}s (< 30s)"),
    )
}

fn index_at(model: &localizer_lab::models::LatticeModel, x1: f64, config: LocalizerConfig) -> Option<i64> {
    let (st, p) = scale_4d(model, KAPPA_4D, [x1, 0.0, 0.0, 0.0, 0.0]).unwrap();
    let rep = gamma5_explicit();
    let loc = Localizer::with_config(&st.tuple, &rep, config).unwrap();
    loc.report(&p, 0).unwrap().index
}

fn dense_eigen() -> LocalizerConfig {
    LocalizerConfig { method: SignatureMethod::Eigen, ..LocalizerConfig::default() }
}

fn sparse() -> LocalizerConfig {
    LocalizerConfig { dense_threshold: 0, ..LocalizerConfig::default() }
}

/// Index along `x₁ ∈ [0, 3a]` at `E = 0` with repeated plateaus merged.
fn x1_sequence(model: &localizer_lab::models::LatticeModel, points: usize, config: &LocalizerConfig) -> Vec<i64> {
    let mut seq: Vec<i64> = Vec::new();
    for k in 0..points {
        let x = 3.0 * k as f64 / (points - 1) as f64;
        if let Some(i) = index_at(model, x, config.clone()) {
            if seq.last() != Some(&i) {
                seq.push(i);
            }
        }
    }
    seq
}

fn criterion_7(slow: bool) -> Outcome {
    let start = Instant::now();
    let m3 = lattice4d(&Lattice4dParams::class_ai(3));
    let dense = index_at(&m3, 0.0, dense_eigen());
    let sp = index_at(&m3, 0.0, sparse());
    let secs = start.elapsed().as_secs_f64();
    let gate = dense == Some(2) && sp == dense && secs < 60.0;
    let mut detail = format!(
        "N=3 gating: index at origin {dense:?} by dense eigenvalues, {sp:?} by sparse inertia (want Some(2)), {secs:.1}s (< 60s)"
    );
    let mut pass = gate;
    if slow {
        let (tier, text) = class_ai_n5();
        pass &= tier;
        detail.push_str(&format!("; N=5 tier {}: {text}", if tier { "PASS" } else { "FAIL" }));
    } else {
        detail.push_str("; N=5 tier skipped (--slow)");
    }
    Outcome::new(pass, detail)
}

fn class_ai_n5() -> (bool, String) {
    let start = Instant::now();
    let m = lattice4d(&Lattice4dParams::class_ai(5));
    let origin = index_at(&m, 0.0, LocalizerConfig::default());
    let outside = index_at(&m, 3.0, LocalizerConfig::default());
    let (st, _) = scale_4d(&m, KAPPA_4D, [0.0; 5]).unwrap();
    let rep = gamma5_explicit();
    let loc = Localizer::new(&st.tuple, &rep).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut crossings = Vec::new();
    for _ in 0..20 {
        let mut u = random_unit_vector(4, &mut rng);
        u.push(0.0);
        // Out to 5a in physical units, sampled every a/20.
        let r = ray_crossings(&loc, &ProbePoint::origin(5), &u, 0.5, 0.005, 0.0075).unwrap();
        crossings.push(r.crossings);
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = origin == Some(2) && outside == Some(0) && crossings.iter().all(|&c| c == 1);
    (pass, format!("index(0) {origin:?}, index(x1=3a) {outside:?}, ray crossings {crossings:?}, {secs:.0}s"))
}

fn criterion_8(slow: bool) -> Outcome {
    let start = Instant::now();
    let m3 = lattice4d(&Lattice4dParams::class_a(3));
    let seq = x1_sequence(&m3, 16, &dense_eigen());
    let secs = start.elapsed().as_secs_f64();
    let mut pass = seq == [2, 1, 0];
    let mut detail = format!("N=3 gating: index sequence along x1 in [0, 3a] {seq:?} (want [2, 1, 0]), {secs:.1}s");
    if slow {
        let start = Instant::now();
        let m5 = lattice4d(&Lattice4dParams::class_a(5));
        let seq5 = x1_sequence(&m5, 31, &LocalizerConfig::default());
        let ok = seq5 == [2, 1, 0];
        pass &= ok;
        detail.push_str(&format!(
            "; N=5 tier {}: {seq5:?}, {:.0}s",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        ));
    } else {
        detail.push_str("; N=5 tier skipped (--slow)");
    }
    Outcome::new(pass, detail)
}

fn criterion_9() -> Outcome {
    let m = lattice4d(&Lattice4dParams::class_ai(5));
    let st = m.scaled_tuple(&[1.0; 5]).unwrap();
    let obs = obstruction_norms(&st.tuple);
    let h = obs.norms[4];
    let mut ok = (3.8..=4.2).contains(&h);
    let mut parts = vec![format!("|H| = {h:.4}")];
    for j in 0..4 {
        let x = obs.norms[j];
        let c = obs.commutators.iter().find(|&&(a, b, _)| a == j && b == 4).unwrap().2;
        let ratio = c / (x * h);
        let range = if j % 2 == 0 { 0.27..=0.31 } else { 0.19..=0.23 };
        ok &= range.contains(&ratio) && (x - 2.0).abs() <= NORM_X_TOL;
        parts.push(format!("j={}: |X|={x:.12}, ratio {ratio:.4}", j + 1));
    }
    Outcome::new(ok, parts.join("; "))
}

fn criterion_10() -> Outcome {
    let rep = pauli_rep();
    let mut ok = true;
    let mut prev = f64::INFINITY;
    let mut parts = Vec::new();
    for n in 2..=10 {
        let t = fuzzy_sphere(n);
        let dense: Vec<Mat<c64>> = t.matrices().iter().map(|m| m.to_dense()).collect();
        let mut sum = Mat::<c64>::zeros(n, n);
        for x in &dense {
            sum += x * x;
        }
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((sum[(i, j)] - c64::new(want, 0.0)).norm());
            }
        }
        let comm = obstruction_norms(&t).commutators.iter().map(|c| c.2).fold(0.0, f64::max);
        let loc = Localizer::new(&t, &rep).unwrap();
        let sig = loc.signature(&ProbePoint::origin(3)).unwrap();
        let oracle_sig = oracle_eigs(&t, &rep, &[0.0; 3]).iter().map(|e| e.signum() as i64).sum::<i64>();
        ok &= defect <= FUZZY_TOL && comm < prev && sig == 2 && oracle_sig == 2;
        prev = comm;
        parts.push(format!("n={n}: comm {comm:.4}"));
    }
    Outcome::new(ok, format!("sphere defect <= {FUZZY_TOL:.0e}, signature 2 for all n, {}", parts.join(", ")))
}

/// Gap along the Haldane row nearest the centre at `E = 0`, in physical `x`.
fn haldane_row_profile(kappa_x: f64, kappa_h: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let m = haldane(&HaldaneParams::figure_sample());
    let y = m
        .sites()
        .iter()
        .map(|s| s.coords[1])
        .filter(|&y| y > 0.0)
        .fold(f64::INFINITY, f64::min);
    let row: Vec<f64> = m.sites().iter().filter(|s| (s.coords[1] - y).abs() < 1e-9).map(|s| s.coords[0]).collect();
    let (st, _) = scale_2d(&m, kappa_x, kappa_h, [0.0; 3]).unwrap();
    let rep = pauli_rep();
    let loc = Localizer::new(&st.tuple, &rep).unwrap();
    let xs: Vec<f64> = (0..=400).map(|k| -10.0 + 0.05 * k as f64).collect();
    let gaps = xs.iter().map(|&x| loc.gap(&st.probe(&[x, y, 0.0]).unwrap()).unwrap()).collect();
    (xs, gaps, row)
}

/// Local minima below a tenth of the profile maximum.
fn deep_minima(xs: &[f64], gaps: &[f64]) -> Vec<f64> {
    let max = gaps.iter().copied().fold(0.0, f64::max);
    (1..gaps.len() - 1)
        .filter(|&i| gaps[i] < gaps[i - 1] && gaps[i] <= gaps[i + 1] && gaps[i] < 0.1 * max)
        .map(|i| xs[i])
        .collect()
}

fn kappa_figure() -> Outcome {
    let (xs, g, row) = haldane_row_profile(1.0, 0.1);
    let site_dips = deep_minima(&xs, &g);
    let on_sites = site_dips.iter().all(|x| row.iter().any(|s| (s - x).abs() < 0.1));
    let (xs, g, _) = haldane_row_profile(0.05, 1.0);
    let well = deep_minima(&xs, &g);
    let width = row.iter().copied().fold(f64::NEG_INFINITY, f64::max) - row.iter().copied().fold(f64::INFINITY, f64::min);
    let broad = well.len() == 2 && well[1] - well[0] > 0.5 * width;
    Outcome::new(
        site_dips.len() == row.len() && on_sites && broad,
        format!(
            "κ_X=1, κ_H=0.1: {} dips for {} row sites; κ_X=0.05, κ_H=1: gap closes at {well:?} around one well",
            site_dips.len(),
            row.len()
        ),
    )
}

fn main() -> ExitCode {
    let slow = std::env::args().any(|a| a == "--slow" || a == "--include-ignored")
        || std::env::var("LOCALIZER_LAB_SLOW").is_ok_and(|v| v == "1");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 (Pauli closed form)", Box::new(criterion_1)),
        ("2 (even d)", Box::new(criterion_2)),
        ("3 (odd d)", Box::new(criterion_3)),
        ("4 (scaling transition)", Box::new(criterion_4)),
        ("5 (d=2 equivalence)", Box::new(criterion_5)),
        ("6 (representation independence and covariance)", Box::new(criterion_6)),
        ("7 (4D class AI)", Box::new(move || criterion_7(slow))),
        ("8 (4D class A)", Box::new(move || criterion_8(slow))),
        ("9 (commutator norms)", Box::new(criterion_9)),
        ("10 (fuzzy sphere)", Box::new(criterion_10)),
        ("kappa figure (qualitative)", Box::new(kappa_figure)),
    ];
    let mut failed = 0;
    for (label, f) in criteria {
        let o = f();
        report(label, &o);
        failed += !o.pass as usize;
    }
    println!("acceptance: {failed} failing");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
