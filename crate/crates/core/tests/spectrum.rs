use localizer_lab::models::{example_abc, lattice4d, Lattice4dParams};
use localizer_lab::sampling::{random_in_box, random_unit_vector};
use localizer_lab::spectrum::{
    component_count, index_regions, point_cloud, ray_crossings, scan, scan_streaming, spectral_flow, zero_set,
    ScanGrid,
};
use localizer_lab::{build_rep, gamma5_explicit, pauli_rep, Error, HermitianTuple, Localizer, ProbePoint};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pauli() -> (HermitianTuple, localizer_lab::CliffordRep) {
    let rep = pauli_rep();
    (HermitianTuple::from_rep(&rep), rep)
}

#[test]
fn pauli_line_scan_is_closed_form() {
    let (t, rep) = pauli();
    let loc = Localizer::new(&t, &rep).unwrap();
    let grid = ScanGrid::parse(3, "x1=-2:2:401", "x2=0,x3=0").unwrap();
    let r = scan(&loc, &grid, true, None).unwrap();
    assert_eq!(r.gap.len(), 401);
    for p in 0..grid.len() {
        let x = grid.point(p).coords()[0];
        assert!((r.gap[p] - (x.abs() - 1.0).abs()).abs() < 1e-12);
        if let Some(i) = r.index.as_ref().unwrap()[p] {
            assert_eq!(i, if x.abs() < 1.0 { 1 } else { 0 });
        }
    }
    assert!(r.failures.is_empty());
}

#[test]
fn zero_tuple_scan_is_distance_to_origin() {
    let t = HermitianTuple::zeros(3, 2);
    let rep = pauli_rep();
    let loc = Localizer::new(&t, &rep).unwrap();
    let grid = ScanGrid::parse(3, "x1=-1:1:9,x3=-1:1:9", "x2=0.5").unwrap();
    let r = scan(&loc, &grid, false, None).unwrap();
    for p in 0..grid.len() {
        assert!((r.gap[p] - grid.point(p).norm()).abs() < 1e-13);
    }
}

#[test]
fn pauli_shell_zero_set() {
    let (t, rep) = pauli();
    let loc = Localizer::new(&t, &rep).unwrap();
    let grid = ScanGrid::parse(3, "x1=-2:2:81,x2=-2:2:81,x3=-2:2:81", "").unwrap();
    let r = scan(&loc, &grid, false, None).unwrap();
    let zs = zero_set(&r, 0.06);
    assert!(!zs.is_empty());
    for &p in &zs {
        let n = grid.point(p).norm();
        assert!((0.94 - 1e-12..=1.06 + 1e-12).contains(&n), "{n}");
    }
    let cloud = point_cloud(&r, &zs);
    assert_eq!(component_count(&cloud, grid.default_radius()).unwrap().count, 1);
}

#[test]
fn even_gamma_zero_set_is_near_origin() {
    let rep = build_rep(4).unwrap();
    let t = HermitianTuple::from_rep(&rep);
    let loc = Localizer::new(&t, &rep).unwrap();
    let grid = ScanGrid::parse(4, "x1=-1:1:21,x2=-1:1:21", "x3=0,x4=0").unwrap();
    let r = scan(&loc, &grid, false, None).unwrap();
    let eps = grid.default_eps();
    // Along any direction the gap near the origin is sqrt(1 + |λ|²) - 1.
    let bound = ((1.0 + eps) * (1.0 + eps) - 1.0f64).sqrt();
    let zs = zero_set(&r, eps);
    assert!(!zs.is_empty());
    for p in zs {
        let n = grid.point(p).norm();
        assert!(n <= bound + 1e-12, "{n} > {bound}");
        assert!((r.gap[p] - ((1.0 + n * n).sqrt() - 1.0)).abs() < 1e-12);
    }
}

#[test]
fn components_of_separated_balls() {
    let mut pts = Vec::new();
    for c in [0.0, 10.0] {
        for i in -2..=2 {
            for j in -2..=2 {
                pts.push(vec![c + 0.1 * i as f64, 0.1 * j as f64]);
            }
        }
    }
    let comps = component_count(&pts, 0.1).unwrap();
    assert_eq!(comps.count, 2);
    assert_eq!(comps.sizes, vec![25, 25]);
    assert_eq!(component_count(&[], 1.0).unwrap().count, 0);
    assert!(component_count(&pts, 0.0).is_err());
}

#[test]
fn abc_gap_is_axially_symmetric() {
    let rep = pauli_rep();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for t in [1.0 / 7.0, 0.3, 1.0] {
        let tuple = example_abc(t);
        let loc = Localizer::new(&tuple, &rep).unwrap();
        for _ in 0..10 {
            let l1: f64 = random_in_box(1, -1.5, 1.5, &mut rng)[0];
            let r = random_in_box(1, 0.0, 1.5, &mut rng)[0];
            let base = loc.gap(&ProbePoint::new(vec![l1, r, 0.0])).unwrap();
            for k in 1..8 {
                let th = k as f64 * 0.8;
                let g = loc.gap(&ProbePoint::new(vec![l1, r * th.cos(), r * th.sin()])).unwrap();
                assert!((g - base).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn abc_transition_sides() {
    // Coarser than the acceptance grid; the counts agree on both sides.
    let rep = pauli_rep();
    for (t, want) in [(1.0 / 7.0, 3), (1.0, 1)] {
        let tuple = example_abc(t);
        let loc = Localizer::new(&tuple, &rep).unwrap();
        let grid = ScanGrid::parse(3, "x1=-2:2:81,x2=-2:2:81", "x3=0").unwrap();
        let r = scan(&loc, &grid, false, None).unwrap();
        let cloud = point_cloud(&r, &zero_set(&r, grid.default_eps()));
        assert_eq!(component_count(&cloud, grid.default_radius()).unwrap().count, want, "t={t}");
    }
}

#[test]
fn index_constant_on_resolvent_regions() {
    let (t, rep) = pauli();
    let loc = Localizer::new(&t, &rep).unwrap();
    let grid = ScanGrid::parse(3, "x1=-2:2:41,x2=-2:2:41", "x3=0.2").unwrap();
    let r = scan(&loc, &grid, true, None).unwrap();
    let (regions, constant) = index_regions(&r, grid.default_eps());
    assert_eq!(regions, 2);
    assert!(constant);
    // A deliberately corrupted entry inside one region is detected.
    let mut bad = r.clone();
    let centre = grid.flat_index(&[20, 20]);
    bad.index.as_mut().unwrap()[centre] = Some(5);
    assert!(!index_regions(&bad, grid.default_eps()).1);
}

#[test]
fn scan_is_independent_of_thread_count() {
    let rep = pauli_rep();
    let tuple = example_abc(0.5);
    let loc = Localizer::new(&tuple, &rep).unwrap();
    let grid = ScanGrid::parse(3, "x1=-2:2:23,x2=-2:2:19", "x3=0.1").unwrap();
    let a = scan(&loc, &grid, true, Some(1)).unwrap();
    let b = scan(&loc, &grid, true, Some(3)).unwrap();
    assert_eq!(a.gap.iter().map(|g| g.to_bits()).collect::<Vec<_>>(), b.gap.iter().map(|g| g.to_bits()).collect::<Vec<_>>());
    assert_eq!(a.index, b.index);
    let mut ca = Vec::new();
    let mut cb = Vec::new();
    a.write_csv(&mut ca, false).unwrap();
    b.write_csv(&mut cb, false).unwrap();
    assert_eq!(ca, cb);
}

#[test]
fn streaming_scan_matches_in_memory_scan() {
    let (t, rep) = pauli();
    let loc = Localizer::new(&t, &rep).unwrap();
    let grid = ScanGrid::parse(3, "x1=-1:1:5,x2=-1:1:4,x3=-1:1:3", "").unwrap();
    let whole = scan(&loc, &grid, true, None).unwrap();
    let mut streamed = Vec::new();
    let failures = scan_streaming(&loc, &grid, true, None, |pts| {
        streamed.extend(pts.iter().map(|p| (p.flat, p.gap, p.index)));
        Ok(())
    })
    .unwrap();
    assert_eq!(failures, 0);
    assert_eq!(streamed.len(), grid.len());
    for (k, (flat, g, i)) in streamed.into_iter().enumerate() {
        assert_eq!(flat, k);
        assert_eq!(g, whole.gap[k]);
        assert_eq!(i, whole.index.as_ref().unwrap()[k]);
    }
}

#[test]
fn grid_errors() {
    assert!(ScanGrid::parse(3, "x1=bad", "").is_err());
    assert!(ScanGrid::parse(3, "x1=0:1:1", "").is_err());
    assert!(ScanGrid::parse(3, "x4=0:1:3", "").is_err());
    assert!(ScanGrid::parse(3, "x1=1:0:3", "").is_err());
    assert!(ScanGrid::parse(3, "x1=0:1:3", "x1=0").is_err());
}

#[test]
fn rays_through_pauli_sphere_cross_once() {
    let (t, rep) = pauli();
    let loc = Localizer::new(&t, &rep).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let u = random_unit_vector(3, &mut rng);
        let r = ray_crossings(&loc, &ProbePoint::origin(3), &u, 3.0, 0.01, 0.015).unwrap();
        assert_eq!(r.crossings, 1);
        assert!((r.run_starts[0] - 1.0).abs() < 0.03);
        assert!(r.evaluations < 150);
    }
}

#[test]
fn even_gamma_rays_avoiding_origin_never_cross() {
    let rep = build_rep(4).unwrap();
    let t = HermitianTuple::from_rep(&rep);
    let loc = Localizer::new(&t, &rep).unwrap();
    let origin = ProbePoint::new(vec![0.0, 0.5, 0.0, 0.0]);
    let r = ray_crossings(&loc, &origin, &[1.0, 0.0, 0.0, 0.0], 3.0, 0.01, 0.015).unwrap();
    assert_eq!(r.crossings, 0);
    let start = ray_crossings(&loc, &ProbePoint::origin(4), &[1.0, 0.0, 0.0, 0.0], 3.0, 0.01, 0.015);
    assert!(matches!(start, Err(Error::RayStartsOnSpectrum { .. })));
}

#[test]
fn pauli_flow_follows_closed_form_branches() {
    let (t, rep) = pauli();
    let loc = Localizer::new(&t, &rep).unwrap();
    let flow = spectral_flow(&loc, &ProbePoint::origin(3), &ProbePoint::new(vec![2.0, 0.0, 0.0]), 21, 4, None).unwrap();
    for s in &flow {
        let x = s.lambda[0];
        let mut want = vec![1.0 + x, 1.0 - x, -1.0 + (x * x + 4.0).sqrt(), -1.0 - (x * x + 4.0).sqrt()];
        want.sort_by(f64::total_cmp);
        for (a, b) in s.eigs.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12, "x={x}");
        }
    }
}

#[test]
fn zero_tuple_flow_is_plus_minus_norm() {
    let t = HermitianTuple::zeros(3, 1);
    let rep = pauli_rep();
    let loc = Localizer::new(&t, &rep).unwrap();
    let flow = spectral_flow(&loc, &ProbePoint::new(vec![1.0, 0.0, 0.0]), &ProbePoint::new(vec![0.0, 2.0, 0.0]), 5, 2, None).unwrap();
    for s in &flow {
        let n = ProbePoint::new(s.lambda.clone()).norm();
        assert!((s.eigs[0] + n).abs() < 1e-13 && (s.eigs[1] - n).abs() < 1e-13);
    }
}

#[test]
fn index_change_equals_half_the_net_eigenvalue_crossings() {
    let model = lattice4d(&Lattice4dParams::class_a(2));
    let st = model.scaled_tuple(&[0.8, 0.8, 0.8, 0.8, 1.0]).unwrap();
    let rep = gamma5_explicit();
    let loc = Localizer::new(&st.tuple, &rep).unwrap();
    let start = ProbePoint::origin(5);
    let end = ProbePoint::new(vec![0.0, 0.0, 0.0, 0.0, 4.0]);
    let dim = loc.dim();
    let flow = spectral_flow(&loc, &start, &end, 201, dim, None).unwrap();
    let positives = |e: &[f64]| e.iter().filter(|&&x| x > 0.0).count() as i64;
    let sig = |e: &[f64]| 2 * positives(e) - e.len() as i64;
    let net: i64 = flow.windows(2).map(|w| sig(&w[1].eigs) - sig(&w[0].eigs)).sum();
    let i0 = loc.index(&start).unwrap();
    let i1 = loc.index(&end).unwrap();
    assert_eq!(i1 - i0, net / 2);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn zero_set_is_monotone_in_eps(t in 0.05f64..1.0, e1 in 0.0f64..0.3, de in 0.0f64..0.3) {
        let rep = pauli_rep();
        let tuple = example_abc(t);
        let loc = Localizer::new(&tuple, &rep).unwrap();
        let grid = ScanGrid::parse(3, "x1=-2:2:15,x2=-2:2:15", "x3=0").unwrap();
        let r = scan(&loc, &grid, false, Some(1)).unwrap();
        let small: std::collections::HashSet<usize> = zero_set(&r, e1).into_iter().collect();
        let big: std::collections::HashSet<usize> = zero_set(&r, e1 + de).into_iter().collect();
        prop_assert!(small.is_subset(&big));
    }

    #[test]
    fn ray_count_is_stable_under_step_halving(seed in any::<u64>()) {
        let rep = pauli_rep();
        let tuple = example_abc(0.5);
        let loc = Localizer::new(&tuple, &rep).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let origin = ProbePoint::new(vec![0.5, 0.0, 0.0]);
        let u = random_unit_vector(3, &mut rng);
        let eps = 0.02;
        let step = 0.4 * eps;
        let a = ray_crossings(&loc, &origin, &u, 3.0, step, eps);
        let b = ray_crossings(&loc, &origin, &u, 3.0, step / 2.0, eps);
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(a.crossings, b.crossings);
        }
    }
}
