use faer::Mat;
use localizer_lab::clifford::{orthogonality_defect, sigma_x, sigma_y, sigma_z, Construction, RELATION_TOL};
use localizer_lab::linalg::dense::{frobenius, hermitian_eigenvalues, kron, max_abs};
use localizer_lab::sampling::{random_hermitian, random_orthogonal, random_unitary};
use localizer_lab::{build_rep, c64, gamma5_explicit, pauli_rep, rotate_rep, CliffordRep, Error};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn max_diff(a: &Mat<c64>, b: &Mat<c64>) -> f64 {
    max_abs(&(a - b))
}

#[test]
fn every_recursive_rep_up_to_13_is_valid() {
    for d in 1..=13 {
        let rep = build_rep(d).unwrap();
        let r = rep.validate(RELATION_TOL);
        assert!(r.pass, "d={d}: {r:?}");
        let want = if d == 1 { 2 } else { 1 << (d / 2) };
        assert_eq!(rep.r(), want, "d={d}");
        if d % 2 == 1 && d >= 3 {
            assert_eq!(rep.orientation(), Some(1));
        }
    }
}

#[test]
fn doubling_tensors_with_sigma_x() {
    let sx = sigma_x();
    for d in (3..=11).step_by(2) {
        let small = build_rep(d).unwrap();
        let big = build_rep(d + 2).unwrap();
        for j in 0..d {
            let want = kron(small.gamma(j), &sx);
            assert_eq!(max_diff(big.gamma(j), &want), 0.0, "d={d} j={j}");
        }
        let id = Mat::<c64>::identity(small.r(), small.r());
        assert_eq!(max_diff(big.gamma(d), &kron(&id, &sigma_y())), 0.0);
        assert_eq!(max_diff(big.gamma(d + 1), &kron(&id, &sigma_z())), 0.0);
    }
}

#[test]
fn even_reps_are_truncations() {
    for d in (2..=10).step_by(2) {
        let even = build_rep(d).unwrap();
        let odd = build_rep(d + 1).unwrap();
        for j in 0..d {
            assert_eq!(max_diff(even.gamma(j), odd.gamma(j)), 0.0);
        }
    }
}

#[test]
fn pauli_matches_the_printed_matrices() {
    let p = pauli_rep();
    assert_eq!(p.construction(), Construction::RecursivePauli);
    assert_eq!(p.gamma(2)[(0, 0)], c64::new(1.0, 0.0));
    assert_eq!(p.gamma(2)[(1, 1)], c64::new(-1.0, 0.0));
    assert_eq!(p.gamma(1)[(0, 1)], c64::new(0.0, -1.0));
    // γ₃ = iγ₂γ₁
    let prod = (p.gamma(1) * p.gamma(0)) * faer::Scale(c64::new(0.0, 1.0));
    assert_eq!(max_diff(&prod, p.gamma(2)), 0.0);
}

#[test]
fn gamma5_is_as_printed() {
    let g = gamma5_explicit();
    assert!(g.validate(RELATION_TOL).pass);
    let want = [1.0, 1.0, -1.0, -1.0];
    for i in 0..4 {
        for j in 0..4 {
            let w = if i == j { want[i] } else { 0.0 };
            assert_eq!(g.gamma(4)[(i, j)], c64::new(w, 0.0));
        }
    }
    // Independently: ε₅ = -1 and Γ₅ = ±ε₅Γ₄Γ₃Γ₂Γ₁ fixes the orientation.
    let prod = g.gamma(3) * g.gamma(2) * g.gamma(1) * g.gamma(0) * faer::Scale(c64::new(-1.0, 0.0));
    let sign = if max_diff(&prod, g.gamma(4)) < 1e-12 {
        1
    } else {
        assert!(max_diff(&(prod * faer::Scale(c64::new(-1.0, 0.0))), g.gamma(4)) < 1e-12);
        -1
    };
    assert_eq!(g.orientation(), Some(sign));
}

#[test]
fn perturbed_generator_fails_validation_with_measured_defect() {
    let p = pauli_rep();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = random_hermitian(2, &mut rng);
    let scale = 1e-6 / frobenius(&noise);
    let mut gammas: Vec<Mat<c64>> = p.gammas().to_vec();
    gammas[0] = &gammas[0] + &noise * faer::Scale(c64::new(scale, 0.0));
    let perturbed = CliffordRep::from_matrices(gammas).unwrap();
    let r = perturbed.validate(RELATION_TOL);
    assert!(!r.pass);
    let worst = r.square.max(r.anticommutator);
    assert!(worst > 1e-7 && worst < 1e-5, "{r:?}");
}

#[test]
fn negation_flips_orientation_and_is_detected() {
    for d in [3, 5, 7] {
        let rep = build_rep(d).unwrap();
        let neg = rep.negated();
        assert_eq!(neg.orientation(), Some(-1));
        assert!(neg.validate(RELATION_TOL).pass);
        // Keeping the old label must be caught by the orientation check.
        let mislabeled = rep.negated_keeping_label();
        let r = mislabeled.validate(RELATION_TOL);
        assert!(!r.pass && r.orientation.unwrap() > 1.0, "d={d}: {r:?}");
    }
}

#[test]
fn rotate_by_identity_is_identity() {
    let p = pauli_rep();
    let r = rotate_rep(&p, &Mat::<f64>::identity(3, 3)).unwrap();
    for j in 0..3 {
        assert_eq!(max_diff(r.gamma(j), p.gamma(j)), 0.0);
    }
}

#[test]
fn axis_swap_rotation_is_unitarily_equivalent() {
    // Swap axes 1 and 2 and negate axis 3: det = +1.
    let mut u = Mat::<f64>::zeros(3, 3);
    u[(0, 1)] = 1.0;
    u[(1, 0)] = 1.0;
    u[(2, 2)] = -1.0;
    let p = pauli_rep();
    let r = rotate_rep(&p, &u).unwrap();
    assert!(r.validate(RELATION_TOL).pass);
    // (σ_y, σ_x, -σ_z) = W (σ_x, σ_y, σ_z) Wᴴ with W = (σ_x + σ_y)/√2.
    let s = 1.0 / 2f64.sqrt();
    let w = (sigma_x() + sigma_y()) * faer::Scale(c64::new(s, 0.0));
    for j in 0..3 {
        let conj = &w * p.gamma(j) * w.adjoint();
        assert!(max_diff(&conj, r.gamma(j)) < 1e-15, "j={j}");
    }
}

#[test]
fn non_orthogonal_rotation_is_rejected() {
    let mut u = Mat::<f64>::identity(3, 3);
    u[(0, 1)] = 1e-3;
    match rotate_rep(&pauli_rep(), &u) {
        Err(Error::NotOrthogonal { defect }) => assert!((defect - orthogonality_defect(&u)).abs() < 1e-15 && defect > 1e-4),
        other => panic!("expected NotOrthogonal, got {other:?}"),
    }
}

#[test]
fn rotated_five_generators_stay_valid() {
    let g = build_rep(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let u = random_orthogonal(5, true, &mut rng);
        let r = rotate_rep(&g, &u).unwrap();
        assert!(r.validate(1e-12).pass);
        assert_eq!(r.construction(), Construction::Rotated);
    }
}

#[test]
fn conjugation_preserves_relations_and_spectra() {
    let g = build_rep(7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let q = random_unitary(g.r(), &mut rng);
    let c = g.conjugate(&q).unwrap();
    assert!(c.validate(1e-12).pass);
    for j in 0..7 {
        let mut e = hermitian_eigenvalues(c.gamma(j)).unwrap();
        e.sort_by(f64::total_cmp);
        assert!((e[0] + 1.0).abs() < 1e-12 && (e[e.len() - 1] - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn rotation_composes(seed in any::<u64>(), d in 2usize..8) {
        let rep = build_rep(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u1 = random_orthogonal(d, false, &mut rng);
        let u2 = random_orthogonal(d, false, &mut rng);
        let once = rotate_rep(&rep, &(&u1 * &u2)).unwrap();
        let twice = rotate_rep(&rotate_rep(&rep, &u2).unwrap(), &u1).unwrap();
        for j in 0..d {
            prop_assert!(max_diff(once.gamma(j), twice.gamma(j)) <= 1e-12);
        }
    }

    #[test]
    fn random_rotations_keep_relations(seed in any::<u64>(), d in 2usize..10) {
        let rep = build_rep(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_orthogonal(d, true, &mut rng);
        prop_assert!(orthogonality_defect(&u) < 1e-13);
        prop_assert!(rotate_rep(&rep, &u).unwrap().validate(1e-12).pass);
    }
}
