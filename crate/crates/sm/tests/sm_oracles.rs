use ncmetric_linalg::{c, operator_norm, random_unitary, ComplexMatrix};
use ncmetric_oracle::{distance_numeric, OracleOptions};
use ncmetric_product::reduce_pair;
use ncmetric_sm::*;
use ncmetric_triple::KernelVerdict;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Symbolic ordering with the top quark heaviest.
fn ordered(rng: &mut ChaCha8Rng, ckm: ComplexMatrix) -> FermionMasses {
    let up = vec![rng.gen_range(0.01..0.1), rng.gen_range(0.1..1.0), rng.gen_range(5.0..10.0)];
    let down = vec![rng.gen_range(0.01..0.1), rng.gen_range(0.1..0.5), rng.gen_range(0.5..2.0)];
    let lepton = vec![rng.gen_range(0.001..0.01), rng.gen_range(0.05..0.2), rng.gen_range(1.0..3.0)];
    FermionMasses::new(up, down, lepton, ckm).unwrap()
}

fn random_h(rng: &mut ChaCha8Rng) -> HiggsDoublet {
    HiggsDoublet::new(c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).unwrap()
}

#[test]
fn unit_mass_matrix_pattern() {
    let m = build_mass_matrix(&FermionMasses::diagonal(vec![1.0], vec![1.0], vec![1.0]).unwrap());
    assert_eq!((m.rows(), m.cols()), (8, 7));
    for i in 0..8 {
        for j in 0..7 {
            let want = if (i < 6 && i == j) || (i, j) == (7, 6) { 1.0 } else { 0.0 };
            assert_eq!(m.get(i, j), c(want, 0.0), "entry ({i},{j})");
        }
    }
}

#[test]
fn mass_matrix_shape_and_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let masses = ordered(&mut rng, ComplexMatrix::identity(3));
    let m = build_mass_matrix(&masses);
    assert_eq!((m.rows(), m.cols()), (24, 21));
    assert!((operator_norm(&m) - masses.up[2].max(masses.lepton[2])).abs() < 1e-12);
    let heavy_tau = FermionMasses::diagonal(vec![1.0, 2.0, 3.0], vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 5.0]).unwrap();
    assert!((operator_norm(&build_mass_matrix(&heavy_tau)) - 5.0).abs() < 1e-12);
}

#[test]
fn gtt_examples() {
    let masses = FermionMasses::diagonal(vec![0.1, 0.5, 2.0], vec![0.1, 0.2, 0.3], vec![0.01, 0.1, 1.0]).unwrap();
    let g = sm_gtt(&HiggsDoublet::zero(), &masses);
    assert_eq!(g.method, GttMethod::ClosedForm);
    assert_eq!(g.value, 4.0);
    let dead = HiggsDoublet::new(c(-1.0, 0.0), c(0.0, 0.0)).unwrap();
    assert_eq!(sm_gtt(&dead, &masses).value, 0.0);
    assert!(sm_fiber_distance(&dead, &masses).is_infinite());
    assert_eq!(sm_fiber_distance(&HiggsDoublet::zero(), &masses).value, 0.5);
    let scaled = masses.scaled(4.0).unwrap();
    assert!((sm_fiber_distance(&HiggsDoublet::zero(), &scaled).value - 0.125).abs() < 1e-15);
}

#[test]
fn closed_form_matches_direct_norm_with_random_ckm() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let u = random_unitary(3, &mut rng);
    let masses = ordered(&mut rng, u);
        let h = random_h(&mut rng);
        let g = sm_gtt(&h, &masses);
        let direct = direct_gtt(&h, &masses);
        assert_eq!(g.method, GttMethod::ClosedForm);
        assert!((g.value - direct).abs() <= 1e-10 * direct, "{} vs {direct}", g.value);
    }
}

#[test]
fn gtt_is_ckm_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let base = ordered(&mut rng, ComplexMatrix::identity(3));
        let mixed = FermionMasses::new(base.up.clone(), base.down.clone(), base.lepton.clone(), random_unitary(3, &mut rng)).unwrap();
        let h = random_h(&mut rng);
        let (a, b) = (direct_gtt(&h, &base), direct_gtt(&h, &mixed));
        assert!((a - b).abs() <= 1e-10 * a);
    }
}

#[test]
fn heavy_tau_falls_back_to_direct_norm() {
    let masses = FermionMasses::diagonal(vec![0.1, 0.5, 1.0], vec![0.1, 0.2, 0.3], vec![0.01, 0.1, 3.0]).unwrap();
    let h = HiggsDoublet::new(c(0.5, 0.1), c(-0.3, 0.2)).unwrap();
    let g = sm_gtt(&h, &masses);
    assert_eq!(g.method, GttMethod::DirectNorm);
    assert!(g.diagnostic.is_some());
    assert!((g.value - h.weight() * 9.0).abs() < 1e-10 * g.value);
}

#[test]
fn validation_errors() {
    assert!(matches!(FermionMasses::diagonal(vec![1.0], vec![1.0, 2.0], vec![1.0]), Err(SmError::Generations(..))));
    assert!(matches!(FermionMasses::diagonal(vec![1.0], vec![-1.0], vec![1.0]), Err(SmError::NonPositiveMass(..))));
    let bad = ComplexMatrix::from_real(2, 2, &[1.0, 0.1, 0.0, 1.0]).unwrap();
    assert!(matches!(FermionMasses::new(vec![1.0; 2], vec![1.0; 2], vec![1.0; 2], bad), Err(SmError::NotUnitary(_))));
}

#[test]
fn full_triple_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let u = random_unitary(3, &mut rng);
    let masses = ordered(&mut rng, u);
    let sm = sm_triple(&masses, &random_h(&mut rng)).unwrap();
    assert_eq!(sm.triple.dim(), 90);
    assert!(sm.triple.grading.is_some());
}

#[test]
fn infinite_sector() {
    let masses = FermionMasses::diagonal(vec![2.0], vec![1.0], vec![0.5]).unwrap();
    let r = sm_infinite_sector_check(&masses).unwrap();
    assert!(r.color_pairs_infinite);
    assert!(r.two_sheet_finite);
    assert!(r.pairs.iter().any(|p| p.first == "omega_h" && p.second == "color e1" && p.verdict == KernelVerdict::Infinite));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u = random_unitary(3, &mut rng);
    let r = sm_infinite_sector_check(&ordered(&mut rng, u)).unwrap();
    assert!(r.color_pairs_infinite && r.two_sheet_finite);
}

#[test]
fn fiber_distance_matches_reduction_and_oracle() {
    let opts = OracleOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..4 {
        let masses = FermionMasses::diagonal(
            vec![rng.gen_range(1.0..3.0)],
            vec![rng.gen_range(0.1..0.9)],
            vec![rng.gen_range(0.1..0.9)],
        )
        .unwrap();
        let h = if k == 0 { HiggsDoublet::zero() } else { random_h(&mut rng) };
        let sm = sm_triple(&masses, &h).unwrap();
        let want = sm_fiber_distance(&h, &masses).value;
        let red = reduce_pair(&sm.triple, &sm.omega_h(), &sm.omega_c()).unwrap();
        assert!((red.distance.value - want).abs() <= 1e-10 * want);
        let o = distance_numeric(&sm.triple, &sm.omega_h(), &sm.omega_c(), &opts).unwrap();
        assert!((o.value - want).abs() <= 1e-4 * want.max(1.0), "oracle {} vs {want}", o.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fiber_distance_decreases_with_higgs_weight(a in -3.0f64..3.0, b in -3.0f64..3.0, s in 1.0f64..3.0) {
        let masses = FermionMasses::diagonal(vec![0.2, 1.0], vec![0.1, 0.3], vec![0.05, 0.4]).unwrap();
        let h = HiggsDoublet::new(c(a, 0.0), c(b, 0.0)).unwrap();
        // scale 1+h by s ≥ 1, which multiplies the weight by s²
        let g = HiggsDoublet::new(c(s * (1.0 + a) - 1.0, 0.0), c(s * b, 0.0)).unwrap();
        let (d1, d2) = (sm_fiber_distance(&h, &masses), sm_fiber_distance(&g, &masses));
        prop_assert!(g.weight() >= h.weight() * (1.0 - 1e-12));
        prop_assert!(d2.is_infinite() == d1.is_infinite());
        if !d1.is_infinite() {
            prop_assert!(d2.value <= d1.value * (1.0 + 1e-12));
        }
    }
}
