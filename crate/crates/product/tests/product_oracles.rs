use ncmetric_linalg::{c, random_unit_vector, ComplexMatrix, HermitianMatrix};
use ncmetric_oracle::{distance_numeric, OracleOptions};
use ncmetric_product::*;
use ncmetric_triple::{AlgebraBlock, FiniteAlgebra, Mode, PureState, RepresentationSlot, SpectralTriple};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn two_point(k: f64) -> SpectralTriple {
    SpectralTriple::commutative(HermitianMatrix::from_real_symmetric(2, &[0.0, k, k, 0.0]).unwrap()).unwrap()
}

fn graded_two_point(k: f64) -> SpectralTriple {
    let t = two_point(k);
    SpectralTriple::new(t.algebra, t.slots, t.dirac, Some(vec![1.0, -1.0])).unwrap()
}

fn m2(d: [f64; 4]) -> SpectralTriple {
    let h = HermitianMatrix::new(ComplexMatrix::new(2, 2, vec![c(d[0], 0.0), c(d[2], -d[3]), c(d[2], d[3]), c(d[1], 0.0)]).unwrap())
        .unwrap();
    SpectralTriple::matrix_geometry(h).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn two_point_product_assembly() {
    let (k, mu) = (0.7, 1.9);
    let p = tensor_product_triple(&graded_two_point(k), &two_point(mu)).unwrap();
    assert_eq!(p.assembled.dim(), 4);
    assert_eq!(p.permutation, vec![0, 1, 2, 3]);
    let want = [[0.0, mu, k, 0.0], [mu, 0.0, 0.0, k], [k, 0.0, 0.0, -mu], [0.0, k, -mu, 0.0]];
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(p.assembled.dirac.get(i, j), c(want[i][j], 0.0));
        }
    }
}

#[test]
fn zero_internal_dirac_gives_external_tensor_identity() {
    let p = tensor_product_triple(&graded_two_point(1.3), &two_point(0.0)).unwrap();
    let want = graded_two_point(1.3).dirac.to_complex().kron(&ComplexMatrix::identity(2));
    assert_eq!(p.assembled.dirac.to_complex().max_diff(&want), 0.0);
}

#[test]
fn grading_is_required_and_checked() {
    assert_eq!(tensor_product_triple(&two_point(1.0), &two_point(1.0)).unwrap_err(), ProductError::MissingGrading);
    let t = two_point(1.0);
    assert!(SpectralTriple::new(t.algebra.clone(), t.slots.clone(), t.dirac.clone(), Some(vec![1.0, 1.0])).is_err());
    let flat = two_point(0.0);
    let ok = SpectralTriple::new(flat.algebra, flat.slots, flat.dirac, Some(vec![1.0, 1.0])).unwrap();
    assert!(tensor_product_triple(&ok, &two_point(1.0)).is_ok());
}

#[test]
fn matrix_internal_layout_matches_kron() {
    let p = tensor_product_triple(&graded_two_point(0.9), &m2([1.0, -0.5, 0.3, 0.2])).unwrap();
    assert_eq!(p.assembled.algebra.blocks, vec![AlgebraBlock::matrix(2); 2]);
    let de = graded_two_point(0.9).dirac.to_complex();
    let di = m2([1.0, -0.5, 0.3, 0.2]).dirac.to_complex();
    let g = ComplexMatrix::real_diagonal(&[1.0, -1.0]);
    let kron = de.kron(&ComplexMatrix::identity(2)).add(&g.kron(&di)).unwrap();
    assert!(p.assembled.dirac.to_complex().max_diff(&kron) < 1e-15);
}

#[test]
fn matrix_times_matrix_and_quaternions() {
    let ext = SpectralTriple::new(
        FiniteAlgebra::new(vec![AlgebraBlock::matrix(2)]).unwrap(),
        vec![RepresentationSlot::new(0, Mode::Fundamental, 1)],
        HermitianMatrix::zeros(2),
        Some(vec![1.0, 1.0]),
    )
    .unwrap();
    let p = tensor_product_triple(&ext, &m2([1.0, 2.0, 0.0, 0.0])).unwrap();
    assert_eq!(p.assembled.algebra.blocks, vec![AlgebraBlock::matrix(4)]);
    let quat = SpectralTriple::new(
        FiniteAlgebra::new(vec![AlgebraBlock::quaternions()]).unwrap(),
        vec![RepresentationSlot::new(0, Mode::Quaternion2x2, 1)],
        HermitianMatrix::zeros(2),
        None,
    )
    .unwrap();
    let p = tensor_product_triple(&graded_two_point(1.0), &quat).unwrap();
    assert_eq!(p.assembled.algebra.blocks, vec![AlgebraBlock::matrix(2); 2]);
    assert!(matches!(tensor_product_triple(&ext, &quat), Err(ProductError::Unsupported(..))));
}

#[test]
fn factor_distances_two_point_internal() {
    let opts = OracleOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let (k, mu) = (rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0));
        let p = tensor_product_triple(&graded_two_point(k), &two_point(mu)).unwrap();
        let pairs = [(PureState::canonical(0), PureState::canonical(1))];
        for e in 0..2 {
            let r = factor_distance_check(&p, FactorDirection::Internal, &PureState::canonical(e), &pairs, &opts).unwrap();
            assert!(r.max_deviation <= 1e-4, "{r:?}");
            assert!(close(r.entries[0].assembled.value, 1.0 / mu, 1e-4));
            let r = factor_distance_check(&p, FactorDirection::External, &PureState::canonical(e), &pairs, &opts).unwrap();
            assert!(r.max_deviation <= 1e-4, "{r:?}");
            assert!(close(r.entries[0].assembled.value, 1.0 / k, 1e-4));
        }
        let same = [(PureState::canonical(1), PureState::canonical(1))];
        let r = factor_distance_check(&p, FactorDirection::Internal, &PureState::canonical(0), &same, &opts).unwrap();
        assert_eq!(r.entries[0].assembled.value, 0.0);
    }
}

#[test]
fn factor_distances_matrix_internal() {
    let opts = OracleOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let internal = m2([1.0, -1.0, 0.0, 0.0]);
    let p = tensor_product_triple(&graded_two_point(0.8), &internal).unwrap();
    // equal-altitude pairs (finite) and one unequal pair (infinite in both triples)
    let mut pairs = vec![];
    for _ in 0..3 {
        let a: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let (ph1, ph2) = (rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3));
        let v = |ph: f64| vec![c((a / 2.0).cos(), 0.0), c((a / 2.0).sin() * f64::cos(ph), (a / 2.0).sin() * f64::sin(ph))];
        pairs.push((PureState::vector(0, v(ph1)).unwrap(), PureState::vector(0, v(ph2)).unwrap()));
    }
    pairs.push((PureState::vector(0, random_unit_vector(2, &mut rng)).unwrap(), PureState::vector(0, vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap()));
    for e in 0..2 {
        let r = factor_distance_check(&p, FactorDirection::Internal, &PureState::canonical(e), &pairs, &opts).unwrap();
        assert!(r.max_deviation <= 1e-4, "{r:?}");
        assert!(r.entries.last().unwrap().assembled.is_infinite());
    }
    let xi = PureState::vector(0, random_unit_vector(2, &mut rng)).unwrap();
    let ext = [(PureState::canonical(0), PureState::canonical(1))];
    let r = factor_distance_check(&p, FactorDirection::External, &xi, &ext, &opts).unwrap();
    assert!(r.max_deviation <= 1e-4, "{r:?}");
    assert!(close(r.entries[0].factor.value, 1.0 / 0.8, 1e-4));
}

#[test]
fn reduction_examples() {
    let r = reduce_pair(&two_point(2.5), &PureState::canonical(0), &PureState::canonical(1)).unwrap();
    assert!((r.coupling_norm - 2.5).abs() < 1e-12);
    assert!((r.distance.value - 0.4).abs() < 1e-12);
    let r = reduce_pair(&two_point(0.0), &PureState::canonical(0), &PureState::canonical(1)).unwrap();
    assert!(r.distance.is_infinite());
    let d = HermitianMatrix::from_real_symmetric(3, &[0., 1., 0., 1., 0., 1., 0., 1., 0.]).unwrap();
    let t = SpectralTriple::commutative(d).unwrap();
    match reduce_pair(&t, &PureState::canonical(0), &PureState::canonical(1)) {
        Err(ProductError::Commutation(res)) => assert!(res > 0.5),
        other => panic!("{other:?}"),
    }
    assert_eq!(
        reduce_pair(&m2([0.0; 4]), &PureState::vector(0, vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), &PureState::vector(0, vec![c(0.6, 0.0), c(0.8, 0.0)]).unwrap())
            .unwrap_err(),
        ProductError::Overlap
    );
}

#[test]
fn reduction_matches_oracle_on_block_couplings() {
    // Mₙ ⊕ ℂ with the coupling vector along e₁: the pair (ω_{e₁}, ω_c) reduces to ℂ².
    let opts = OracleOptions::default();
    for (n, m) in [(2usize, 1.7), (3, 0.6)] {
        let dim = n + 1;
        let mut d = vec![c(0.0, 0.0); dim * dim];
        d[n] = c(m, 0.0);
        d[n * dim] = c(m, 0.0);
        let dirac = HermitianMatrix::new(ComplexMatrix::new(dim, dim, d).unwrap()).unwrap();
        let t = SpectralTriple::new(
            FiniteAlgebra::new(vec![AlgebraBlock::matrix(n), AlgebraBlock::complex()]).unwrap(),
            vec![RepresentationSlot::new(0, Mode::Fundamental, 1), RepresentationSlot::new(1, Mode::Scalar, 1)],
            dirac,
            None,
        )
        .unwrap();
        let mut e1 = vec![c(0.0, 0.0); n];
        e1[0] = c(1.0, 0.0);
        let s1 = PureState::vector(0, e1).unwrap();
        let s2 = PureState::canonical(1);
        let r = reduce_pair(&t, &s1, &s2).unwrap();
        let o = distance_numeric(&t, &s1, &s2, &opts).unwrap();
        assert!(close(r.distance.value, o.value, 1e-4), "{} vs {}", r.distance.value, o.value);
        assert!((r.coupling_norm - m).abs() < 1e-12);
    }
}

#[test]
fn pythagoras_examples() {
    assert_eq!(pythagoras_cross(3.0, 4.0), 5.0);
    assert_eq!(pythagoras_cross(2.5, 0.0), 2.5);
    assert_eq!(pythagoras_cross(0.0, 1.0 / 3.0), 1.0 / 3.0);
}

#[test]
fn pythagoras_on_finite_products_is_reported() {
    let opts = OracleOptions::default();
    for (k, mu) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.7)] {
        let p = tensor_product_triple(&graded_two_point(k), &two_point(mu)).unwrap();
        let r = pythagoras_check(&p, (&PureState::canonical(0), &PureState::canonical(1)), (&PureState::canonical(0), &PureState::canonical(1)), &opts)
            .unwrap();
        println!(
            "k={k} mu={mu}: cross {:.6} vs pythagoras {:.6} (deviation {:+.3e})",
            r.cross.value,
            pythagoras_cross(r.external.value, r.internal.value),
            r.deviation
        );
        assert!(r.cross.value <= r.external.value + r.internal.value + 1e-6);
        assert!(r.cross.value + 1e-6 >= r.external.value.max(r.internal.value));
    }
}

fn coupling(k: f64) -> HermitianMatrix {
    HermitianMatrix::from_real_symmetric(2, &[0.0, k, k, 0.0]).unwrap()
}

#[test]
fn fluctuation_examples() {
    let opts = OracleOptions::default();
    let t = two_point(1.2);
    let same = fluctuate(&t, &HermitianMatrix::zeros(2)).unwrap();
    assert_eq!(same.dirac, t.dirac);
    let f = fluctuate(&t, &coupling(0.3)).unwrap();
    let d = distance_numeric(&f, &PureState::canonical(0), &PureState::canonical(1), &opts).unwrap();
    assert!(close(d.value, 1.0 / 1.5, 1e-6));
    assert_eq!(fluctuate(&t, &HermitianMatrix::zeros(3)).unwrap_err(), ProductError::Dimension(3, 2));
}

#[test]
fn per_point_fluctuations() {
    let opts = OracleOptions::default();
    let t = two_point(1.0);
    let xs = [0.0, 0.25, 0.5, 0.75, 1.0];
    let field = ScalarFluctuation::new(xs.iter().map(|&x| (x, coupling(x * x))).collect()).unwrap();
    assert!(field.certify(&t).unwrap() <= ONE_FORM_TOL);
    let d = field.fiber_distances(&t, &PureState::canonical(0), &PureState::canonical(1), &opts, 2).unwrap();
    for (x, v) in d {
        assert!(close(v.value, 1.0 / (1.0 + x * x), 1e-6), "x={x}");
    }
    let diag = HermitianMatrix::from_real_symmetric(2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
    let bad = ScalarFluctuation::new(vec![(0.0, diag)]).unwrap();
    assert!(matches!(bad.certify(&t), Err(ProductError::NotOneForm(_))));
    let flat = two_point(0.0);
    assert!(one_form_residual(&flat, &coupling(1.0).to_complex()).unwrap() > 0.5);
}

#[test]
fn one_forms_of_matrix_geometry() {
    let t = m2([1.0, -1.0, 0.0, 0.0]);
    let off = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.3, -0.2), c(0.3, 0.2), c(0.0, 0.0)]).unwrap();
    assert!(one_form_residual(&t, &off).unwrap() < 1e-10);
    let diag = ComplexMatrix::real_diagonal(&[1.0, 2.0]);
    assert!(one_form_residual(&t, &diag).unwrap() < 1e-10);
}

#[test]
fn warp_constant() {
    for (w, x, y) in [(2.0, 0.3, 1.7), (0.5, 1.0, 0.0), (1.0, 0.2, 0.2)] {
        let g = vec![w * w; 11];
        let l = warped_geodesic(&g, 2.0, x, y).unwrap();
        let want = pythagoras_cross(x - y, 1.0 / w);
        assert!((l - want).abs() <= 1e-9 * want, "{l} vs {want}");
    }
}

#[test]
fn warp_fiber_hop_at_the_widest_point() {
    let g: Vec<f64> = (0..21).map(|k| 1.0 + (k as f64 * 0.15).sin().abs() * 3.0).collect();
    let (k, gmax) = g.iter().enumerate().fold((0, 0.0), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    let x = k as f64 * 0.1;
    let l = warped_geodesic(&g, 2.0, x, x).unwrap();
    assert!((l - 1.0 / gmax.sqrt()).abs() <= 1e-12);
    // Elsewhere a detour towards the wide part can beat the straight hop.
    let x = 0.0;
    let l = warped_geodesic(&g, 2.0, x, x).unwrap();
    assert!(l < 1.0 / g[0].sqrt());
}

fn step(n: usize, split: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|k| if k <= split { lo } else { hi }).collect()
}

#[test]
fn warp_step_matches_grid() {
    let g = step(41, 20, 1.0, 4.0);
    let opts = GridOptions::default();
    for (x, y) in [(0.25, 1.75), (0.9, 0.9), (0.8, 0.5), (0.0, 2.0), (1.5, 1.25), (0.125, 0.125)] {
        let exact = warped_geodesic_path(&g, 2.0, x, y).unwrap();
        let grid = warped_geodesic_grid(&g, 2.0, x, y, opts).unwrap();
        println!("({x}, {y}): exact {:.6} grid {:.6} hub {:?}", exact.length, grid, exact.hub);
        assert!((exact.length - grid).abs() <= 1e-3 * exact.length, "{exact:?} vs {grid}");
        assert!(exact.length <= grid * (1.0 + 1e-9));
    }
}

#[test]
fn warp_domain_errors() {
    assert_eq!(warped_geodesic(&[1.0, 0.0, 1.0], 1.0, 0.0, 0.5).unwrap_err(), ProductError::NonPositiveWarp(1));
    assert!(warped_geodesic(&[1.0, 1.0], 1.0, 0.0, 1.5).is_err());
    assert!(warped_geodesic(&[1.0], 1.0, 0.0, 0.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn warp_monotone_in_gtt(
        g in prop::collection::vec(0.2f64..5.0, 9),
        bump in prop::collection::vec(0.0f64..3.0, 9),
        x in 0.0f64..1.0,
        y in 0.0f64..1.0,
    ) {
        let g2: Vec<f64> = g.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let l1 = warped_geodesic(&g, 1.0, x, y).unwrap();
        let l2 = warped_geodesic(&g2, 1.0, x, y).unwrap();
        prop_assert!(l2 <= l1 * (1.0 + 1e-12), "{} > {}", l2, l1);
    }

    #[test]
    fn warp_bounded_by_simple_paths(g in prop::collection::vec(0.2f64..5.0, 9), x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let l = warped_geodesic(&g, 1.0, x, y).unwrap();
        let cmax = g.iter().map(|v| 1.0 / v.sqrt()).fold(0.0, f64::max);
        let cmin = g.iter().map(|v| 1.0 / v.sqrt()).fold(f64::INFINITY, f64::min);
        prop_assert!(l >= pythagoras_cross(x - y, cmin) * (1.0 - 1e-12));
        prop_assert!(l <= pythagoras_cross(x - y, cmax) * (1.0 + 1e-12));
    }
}
