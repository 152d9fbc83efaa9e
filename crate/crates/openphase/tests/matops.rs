use nalgebra::DMatrix;
use openphase::matops::{
    apply_gauge, biorthonormalize, default_cluster_tol, frobenius_norm, jordan_form, jordan_form_with_bound,
    max_weight_assignment, spectral_decompose, CMatrix, CVector, MatError, C64,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Well-conditioned random transform: identity plus a small random part.
fn random_transform(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        let base = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
        base + random_complex(rng) * 0.3
    })
}

/// Eigenvalues at least `separation` apart.
fn separated_values(rng: &mut ChaCha8Rng, count: usize, separation: f64) -> Vec<C64> {
    let mut values: Vec<C64> = Vec::new();
    while values.len() < count {
        let z = random_complex(rng) * 4.0;
        if values.iter().all(|v| (v - z).norm() > separation) {
            values.push(z);
        }
    }
    values
}

fn jordan_matrix(blocks: &[(C64, usize)]) -> CMatrix {
    let n = blocks.iter().map(|b| b.1).sum();
    let mut j = CMatrix::zeros(n, n);
    let mut offset = 0;
    for &(lambda, size) in blocks {
        for i in 0..size {
            j[(offset + i, offset + i)] = lambda;
            if i + 1 < size {
                j[(offset + i, offset + i + 1)] = C64::new(1.0, 0.0);
            }
        }
        offset += size;
    }
    j
}

fn sorted_sizes(mut sizes: Vec<usize>) -> Vec<usize> {
    sizes.sort_unstable();
    sizes
}

#[test]
fn random_diagonalizable_six_by_six_has_unit_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let values = separated_values(&mut rng, 6, 0.5);
        let blocks: Vec<(C64, usize)> = values.iter().map(|&v| (v, 1)).collect();
        let s = random_transform(&mut rng, 6);
        let m = &s * jordan_matrix(&blocks) * s.clone().try_inverse().unwrap();
        let ctol = default_cluster_tol(&m);
        let form = jordan_form(&m, ctol, 1e-9).unwrap();
        assert_eq!(form.blocks.len(), 6);
        assert!(form.blocks.iter().all(|b| b.size == 1));
        assert!(form.residual < 1e-8);
        let sys = spectral_decompose(&m, 1e-9).unwrap();
        for b in &form.blocks {
            assert!(sys.eigenvalues.iter().any(|v| (v - b.eigenvalue).norm() < ctol));
        }
    }
}

#[test]
fn constructed_defective_matrices_recover_their_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..60 {
        let mut sizes = Vec::new();
        let mut total = 0;
        let dim = rng.gen_range(2..=9);
        while total < dim {
            let size = rng.gen_range(1..=4usize).min(dim - total);
            sizes.push(size);
            total += size;
        }
        let values = separated_values(&mut rng, sizes.len(), 1.0);
        let blocks: Vec<(C64, usize)> = values.iter().copied().zip(sizes.iter().copied()).collect();
        let s = random_transform(&mut rng, dim);
        let m = &s * jordan_matrix(&blocks) * s.clone().try_inverse().unwrap();
        let form = jordan_form(&m, 1e-3 * frobenius_norm(&m), 1e-9)
            .unwrap_or_else(|e| panic!("trial {trial}: {e} for sizes {sizes:?}"));
        assert!(form.residual <= 1e-8, "trial {trial}: residual {}", form.residual);
        assert_eq!(sorted_sizes(form.blocks.iter().map(|b| b.size).collect()), sorted_sizes(sizes.clone()));
    }
}

#[test]
fn cluster_tolerance_inside_the_defect_ring_clashes() {
    // A 3-block splits into a ring of radius ~ε^(1/3) ≈ 6e-6; a tolerance just
    // below the ring yields distinct clusters closer than ten times the tolerance.
    let blocks = [(C64::new(1.0, 0.0), 3)];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = random_transform(&mut rng, 3);
    let m = &s * jordan_matrix(&blocks) * s.clone().try_inverse().unwrap();
    let err = jordan_form(&m, 2e-6, 1e-9).unwrap_err();
    assert!(matches!(err, MatError::TolClash { .. }), "{err:?}");
}

#[test]
fn condition_bound_is_enforced() {
    let m = CMatrix::from_fn(2, 2, |i, j| {
        C64::new(
            if i == j {
                1.0 + i as f64
            } else if i == 0 {
                1e7
            } else {
                0.0
            },
            0.0,
        )
    });
    let err = jordan_form_with_bound(&m, 1e-9, 1e-12, 10.0).unwrap_err();
    assert!(matches!(err, MatError::IllConditionedTransform { .. }), "{err:?}");
}

#[test]
fn near_degenerate_pairs_are_reported() {
    let m = CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0 + 1e-10, 0.0)]));
    let sys = spectral_decompose(&m, 1e-9).unwrap();
    let err = biorthonormalize(&sys, 1e-7).unwrap_err();
    assert!(matches!(err, MatError::NearDegenerate { .. }));
}

#[test]
fn non_square_and_non_finite_inputs_fail() {
    let rect = CMatrix::zeros(2, 3);
    assert!(matches!(spectral_decompose(&rect, 1e-9), Err(MatError::NotSquare { .. })));
    let mut bad = CMatrix::identity(2, 2);
    bad[(0, 1)] = C64::new(f64::NAN, 0.0);
    assert!(matches!(spectral_decompose(&bad, 1e-9), Err(MatError::NonFinite)));
}

fn matrix_strategy(n: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| CMatrix::from_iterator(n, n, v.into_iter().map(|(a, b)| C64::new(a, b))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_matrices_decompose_biorthonormally(m in matrix_strategy(6)) {
        let sys = spectral_decompose(&m, 1e-8).unwrap();
        prop_assert!(sys.max_residual(&m) < 1e-8);
        if let Ok(normalized) = biorthonormalize(&sys, default_cluster_tol(&m)) {
            prop_assert!(normalized.biorthonormality_error() < 1e-7);
            for d in &normalized.rights {
                prop_assert!((d.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn conjugation_closure_for_real_matrices(v in proptest::collection::vec(-1.0f64..1.0, 49)) {
        let real = DMatrix::from_vec(7, 7, v);
        let m = real.map(|x| C64::new(x, 0.0));
        let sys = spectral_decompose(&m, 1e-8).unwrap();
        for lam in &sys.eigenvalues {
            prop_assert!(sys.eigenvalues.iter().any(|mu| (mu - lam.conj()).norm() < 1e-7));
        }
    }

    #[test]
    fn gauge_is_idempotent(v in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5)) {
        let mut d = CVector::from_iterator(5, v.into_iter().map(|(a, b)| C64::new(a, b)));
        prop_assume!(d.norm() > 1e-6);
        apply_gauge(&mut d);
        let once = d.clone();
        let factor = apply_gauge(&mut d);
        prop_assert!((factor - C64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!((d - once).norm() < 1e-12);
    }

    #[test]
    fn assignment_is_a_permutation(w in proptest::collection::vec(0.0f64..1.0, 25)) {
        let perm = max_weight_assignment(&w, 5);
        let mut seen = perm.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, vec![0, 1, 2, 3, 4]);
    }
}

#[test]
fn nearly_closed_liouvillian_decomposes() {
    // Plain Schur iteration stalls on this matrix (zero diagonal, near-degenerate spectrum).
    use openphase::lindblad::{generic_superoperator, DecayRates};
    use openphase::matops::to_complex;
    let g: f64 = 15.0;
    let theta: f64 = 7.218897676846722e-6;
    let rates = DecayRates::new(3.9e-7, 1.95e-7, 0.0, 0.0).unwrap();
    let m = to_complex(&generic_superoperator(g * theta.sin(), g * theta.cos(), &rates));
    let sys = spectral_decompose(&m, 1e-9 * frobenius_norm(&m)).unwrap();
    assert!(sys.max_residual(&m) <= 1e-9 * frobenius_norm(&m));
    let form = jordan_form(&m, default_cluster_tol(&m), 1e-9);
    assert!(!matches!(form, Err(MatError::NoConvergence)));
}
