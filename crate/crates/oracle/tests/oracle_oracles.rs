use ncmetric_linalg::*;
use ncmetric_oracle::*;
use ncmetric_triple::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn herm(n: usize, v: &[f64]) -> HermitianMatrix {
    HermitianMatrix::from_real_symmetric(n, v).unwrap()
}

fn commutative(n: usize, couplings: &[(usize, usize, f64)]) -> SpectralTriple {
    let mut v = vec![0.0; n * n];
    for &(i, j, k) in couplings {
        v[i * n + j] = k;
        v[j * n + i] = k;
    }
    SpectralTriple::commutative(herm(n, &v)).unwrap()
}

fn points(n: usize) -> Vec<PureState> {
    (0..n).map(PureState::canonical).collect()
}

fn opts() -> OracleOptions {
    OracleOptions::default()
}

#[test]
fn two_point() {
    for &k in &[0.1, 1.0, -3.7, 10.0] {
        let t = commutative(2, &[(0, 1, k)]);
        let d = distance_numeric(&t, &PureState::canonical(0), &PureState::canonical(1), &opts()).unwrap();
        assert!((d.value - 1.0 / k.abs()).abs() <= 1e-6 / k.abs(), "{k}: {}", d.value);
    }
}

#[test]
fn same_state_is_zero() {
    let t = commutative(3, &[(0, 1, 1.0), (1, 2, 2.0)]);
    let d = distance_numeric(&t, &PureState::canonical(1), &PureState::canonical(1), &opts()).unwrap();
    assert_eq!(d.value, 0.0);
    let m = distance_matrix(&t, &[PureState::canonical(2), PureState::canonical(2)], &opts()).unwrap();
    assert_eq!(m[0][1].value, 0.0);
    assert_eq!(m[0][0].value, 0.0);
}

#[test]
fn regular_three_point() {
    let t = commutative(3, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]);
    let m = distance_matrix(&t, &points(3), &opts()).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 0.0 } else { (2.0f64 / 3.0).sqrt() };
            assert!((m[i][j].value - want).abs() < 1e-6);
        }
    }
}

#[test]
fn sphere_equator_pair() {
    let t = SpectralTriple::matrix_geometry(herm(2, &[0.0, 0.0, 0.0, 1.0])).unwrap();
    let xi = PureState::normalized(0, vec![re(1.0), re(1.0)]).unwrap();
    let zeta = PureState::normalized(0, vec![re(1.0), re(-1.0)]).unwrap();
    let r = distance_report(&t, &xi, &zeta, &opts()).unwrap();
    assert!((r.distance.value - 2.0).abs() < 1e-6, "{}", r.distance.value);
    assert_eq!(r.method, Method::Barrier);
}

#[test]
fn infinite_via_kernel() {
    let t = commutative(3, &[(0, 1, 1.0)]);
    let r = distance_report(&t, &PureState::canonical(0), &PureState::canonical(2), &opts()).unwrap();
    assert!(r.distance.is_infinite());
    assert_eq!(r.method, Method::KernelTest);
    assert!(r.distance.witness.is_none());
}

#[test]
fn dimension_cap() {
    let t = commutative(3, &[(0, 1, 1.0)]);
    let o = OracleOptions { dim_cap: 2, ..opts() };
    assert_eq!(
        distance_numeric(&t, &PureState::canonical(0), &PureState::canonical(1), &o),
        Err(OracleError::DimensionOverflow { dim: 3, cap: 2 })
    );
}

#[test]
fn parallel_matches_serial() {
    let t = commutative(4, &[(0, 1, 1.0), (1, 2, 0.5), (2, 3, 2.0), (0, 3, 1.5), (0, 2, 0.3)]);
    let a = distance_matrix(&t, &points(4), &opts()).unwrap();
    let b = distance_matrix_with(&t, &points(4), &opts(), 3).unwrap();
    assert_eq!(a, b);
}

#[test]
fn ascent_and_grid_agree_with_barrier() {
    let t = commutative(3, &[(0, 1, 1.3), (0, 2, 0.4), (1, 2, 0.9)]);
    let (a, b) = (PureState::canonical(0), PureState::canonical(1));
    let d = distance_numeric(&t, &a, &b, &opts()).unwrap().value;
    let asc = ascent_lower_bound(&t, &a, &b, &opts()).unwrap();
    let grid = grid_lower_bound(&t, &a, &b, &opts()).unwrap().unwrap();
    assert!(asc <= d * (1.0 + 1e-6) && grid <= d * (1.0 + 1e-6));
    assert!((asc - d).abs() < 1e-4 * d, "{asc} vs {d}");
    assert!((grid - d).abs() < 1e-4 * d, "{grid} vs {d}");
}

fn random_commutative(n: usize, rng: &mut ChaCha8Rng, p_edge: f64) -> SpectralTriple {
    let mut cs = vec![];
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p_edge) {
                cs.push((i, j, rng.gen_range(0.2..2.0)));
            }
        }
    }
    commutative(n, &cs)
}

fn witness_ok(t: &SpectralTriple, s1: &PureState, s2: &PureState, d: &DistanceValue) -> bool {
    match &d.witness {
        None => true,
        Some(w) => {
            let nrm = t.commutator_norm(w).unwrap();
            let val = (evaluate_state(s1, w) - evaluate_state(s2, w)).re;
            (nrm - 1.0).abs() <= 1e-8 && (val - d.value).abs() <= 1e-6 * d.value.max(1.0)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn triangle_and_symmetry(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..6);
        let t = random_commutative(n, &mut rng, 0.7);
        let m = distance_matrix(&t, &points(n), &opts()).unwrap();
        for i in 0..n {
            prop_assert_eq!(m[i][i].value, 0.0);
            for j in 0..n {
                prop_assert_eq!(&m[i][j], &m[j][i]);
                for k in 0..n {
                    let (a, b, c) = (m[i][k].value, m[i][j].value, m[j][k].value);
                    if a.is_finite() && b.is_finite() && c.is_finite() {
                        prop_assert!(a <= b + c + 1e-6 * (b + c).max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn scale_covariance(seed in any::<u64>(), lambda in 0.2f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..5);
        let t = random_commutative(n, &mut rng, 0.8);
        let scaled = t.with_dirac(t.dirac.scale(lambda)).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (PureState::canonical(i), PureState::canonical(j));
                let d1 = distance_numeric(&t, &a, &b, &opts()).unwrap().value;
                let d2 = distance_numeric(&scaled, &a, &b, &opts()).unwrap().value;
                if d1.is_finite() {
                    prop_assert!((d2 * lambda - d1).abs() <= 1e-6 * d1.max(1e-12));
                } else {
                    prop_assert!(d2.is_infinite());
                }
            }
        }
    }

    #[test]
    fn witness_feasible(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = ComplexMatrix::from_fn(3, 3, |_, _| c(gauss(&mut rng), gauss(&mut rng))).unwrap();
        let d = HermitianMatrix::new(m.add(&m.adjoint()).unwrap()).unwrap();
        let t = SpectralTriple::matrix_geometry(d).unwrap();
        let s1 = PureState::vector(0, random_unit_vector(3, &mut rng)).unwrap();
        let s2 = PureState::vector(0, random_unit_vector(3, &mut rng)).unwrap();
        let dv = distance_numeric(&t, &s1, &s2, &opts()).unwrap();
        prop_assert!(witness_ok(&t, &s1, &s2, &dv));
        let t = random_commutative(4, &mut rng, 0.9);
        let (a, b) = (PureState::canonical(0), PureState::canonical(3));
        let dv = distance_numeric(&t, &a, &b, &opts()).unwrap();
        prop_assert!(witness_ok(&t, &a, &b, &dv));
    }

    #[test]
    fn projection_invariance(seed in any::<u64>()) {
        // D = D_top ⊕ D_bottom on ℂ³ ⊕ ℂ²: the projector onto the first three points commutes with D.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let top = random_commutative(3, &mut rng, 0.9);
        let bottom = random_commutative(2, &mut rng, 1.0);
        let full_d = block_diagonal(&[top.dirac.to_complex(), bottom.dirac.to_complex()]);
        let full = SpectralTriple::commutative(HermitianMatrix::new(full_d).unwrap()).unwrap();
        for i in 0..3 {
            for j in i + 1..3 {
                let (a, b) = (PureState::canonical(i), PureState::canonical(j));
                let d_full = distance_numeric(&full, &a, &b, &opts()).unwrap().value;
                let d_proj = distance_numeric(&top, &a, &b, &opts()).unwrap().value;
                if d_proj.is_finite() {
                    prop_assert!((d_full - d_proj).abs() <= 1e-6 * d_proj.max(1.0));
                } else {
                    prop_assert!(d_full.is_infinite());
                }
            }
        }
    }
}
