use svd_mpe_oracle::suite::{
    banded_residual_identity, determinant_equivalence, finite_termination, kernel_suite, krylov_characterization, residual_identity,
};

#[test]
fn finite_termination_on_random_diagonalizable_problems() {
    let stats = finite_termination(11, 50);
    println!("{stats:?}");
    assert_eq!(stats.instances, 50);
    assert!(stats.worst <= 1e-10, "{stats:?}");
}

#[test]
fn residual_estimate_matches_explicit_residual() {
    let stats = residual_identity(12, 50);
    println!("{stats:?}");
    assert!(stats.relative.worst <= 1e-10, "{stats:?}");
    assert!(stats.product.worst <= 1e-12, "{stats:?}");
    assert_eq!(stats.zero_level_mismatches, 0);
    assert_eq!(stats.relative.instances + stats.zero_level, 100);
}

#[test]
fn banded_residual_identity_stays_within_rounding_budget() {
    for p in banded_residual_identity(100, 5, 30) {
        println!("{p:?}");
        if p.n <= 5 {
            assert!(p.relative <= 1e-10, "{p:?}");
        }
        assert!(p.relative <= p.rounding_budget, "{p:?}");
    }
}

#[test]
fn determinant_routes_agree_with_fast_path() {
    let stats = determinant_equivalence(13, 25);
    println!("{stats:?}");
    assert_eq!(stats.shifted_gram.instances, 25);
    assert!(stats.shifted_gram.worst <= 1e-8, "{stats:?}");
    assert!(stats.left_vectors.worst <= 1e-8, "{stats:?}");
    assert!(stats.left_vector_routes.worst <= 1e-12, "{stats:?}");
    assert!(stats.mpe.worst <= 1e-8, "{stats:?}");
}

#[test]
fn extrapolant_lies_in_krylov_space() {
    let stats = krylov_characterization(14, 25);
    println!("{stats:?}");
    assert!(stats.right.worst <= 1e-10, "{stats:?}");
    assert!(stats.left.worst <= 1e-10, "{stats:?}");
}

#[test]
fn kernels_meet_invariants() {
    let stats = kernel_suite(15, 40);
    println!("{stats:?}");
    assert!(stats.qr_orthogonality.worst <= 1e-10, "{stats:?}");
    assert!(stats.qr_reconstruction.worst <= 1e-12, "{stats:?}");
    assert!(stats.svd_vs_oracle.worst <= 1e-10, "{stats:?}");
    assert!(stats.svd_orthogonality.worst <= 1e-12, "{stats:?}");
    assert!(stats.svd_reconstruction.worst <= 1e-12, "{stats:?}");
    assert_eq!(stats.svd_ordering_violations, 0);
}

mod hand_examples {
    use svd_mpe::extrapolation::factorize;
    use svd_mpe::linalg::SmallMatrix;
    use svd_mpe::problems::DenseLinearProblem;
    use svd_mpe::{svd_mpe, DenseVector, FixedPointProblem, IterateWindow, ToleranceConfig};
    use svd_mpe_oracle::{
        det_representation, det_representation_scalar, mpe_weights, svd_mpe_weights_shifted_gram,
        svd_mpe_weights_left_vectors, svd_mpe_weights_left_vectors_via_r, OracleError,
    };

    fn v(x: &[f64]) -> DenseVector {
        DenseVector::new(x.to_vec()).unwrap()
    }

    fn orthogonal_window() -> IterateWindow {
        IterateWindow::from_iterates(0, vec![v(&[0.0, 0.0]), v(&[2.0, 0.0]), v(&[2.0, 1.0])]).unwrap()
    }

    #[test]
    fn two_by_two_ratio() {
        let w = SmallMatrix::from_rows(&[vec![1.0, -1.0]]).unwrap();
        assert_eq!(det_representation_scalar(&[3.0, 5.0], &w).unwrap(), 4.0);
        assert_eq!(det_representation_scalar(&[1.0, 1.0], &w).unwrap(), 1.0);
    }

    #[test]
    fn ones_in_first_row_give_one() {
        let w = SmallMatrix::from_rows(&[vec![2.0, -1.0, 0.5], vec![0.3, 4.0, 1.0]]).unwrap();
        let r = det_representation_scalar(&[1.0, 1.0, 1.0], &w).unwrap();
        assert!((r - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn orthogonal_columns_weights() {
        let w = orthogonal_window();
        let cfg = ToleranceConfig::default();
        let f = factorize(&w, &cfg).unwrap();
        assert_eq!(f.svd.sigma_min(), 1.0);

        let w_gram = svd_mpe_weights_shifted_gram(&w, 1.0).unwrap();
        assert_eq!(w_gram.row(0), &[3.0, 0.0]);
        let w_left = svd_mpe_weights_left_vectors(&w, &f.qr, &f.svd);
        assert_eq!(w_left.row(0).iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![2.0, 0.0]);
        assert_eq!(w_left, svd_mpe_weights_left_vectors_via_r(&f.qr, &f.svd));

        let s = svd_mpe(&w, &cfg).unwrap().s;
        let first = &w.iterates()[..2];
        assert_eq!(det_representation(first, &w_gram).unwrap(), s.as_slice());
        assert_eq!(det_representation(first, &w_left).unwrap(), s.as_slice());
        assert_eq!(det_representation(first, &mpe_weights(&w)).unwrap(), vec![2.0, 0.0]);
    }

    #[test]
    fn gap_violation_is_reported() {
        let w = orthogonal_window();
        // smallest singular value of U_0 = [u_0] is 2
        assert!(matches!(
            svd_mpe_weights_shifted_gram(&w, 2.0),
            Err(OracleError::GapViolated { .. })
        ));
    }

    #[test]
    fn diagonal_problem_k2() {
        let t = SmallMatrix::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.25]]).unwrap();
        let p = DenseLinearProblem::with_solution(t, vec![1.0, 1.0]).unwrap();
        let mut xs = vec![v(&[0.0, 0.0])];
        for _ in 0..3 {
            let next = p.apply(xs.last().unwrap());
            xs.push(DenseVector::new(next).unwrap());
        }
        let w = IterateWindow::from_iterates(0, xs).unwrap();
        let cfg = ToleranceConfig::default();
        let f = factorize(&w, &cfg).unwrap();
        let s = svd_mpe(&w, &cfg).unwrap().s;
        let w_left = svd_mpe_weights_left_vectors(&w, &f.qr, &f.svd);
        let d = det_representation(&w.iterates()[..3], &w_left).unwrap();
        for (a, b) in d.iter().zip(s.iter()) {
            assert!((a - b).abs() <= 1e-8);
        }
        let m = det_representation(&w.iterates()[..3], &mpe_weights(&w)).unwrap();
        for x in m {
            assert!((x - 1.0).abs() <= 1e-10);
        }
    }
}

#[test]
fn mpe_matches_determinant_oracle_on_random_8_dim_problem() {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use svd_mpe::{mpe, DenseVector, FixedPointProblem, IterateWindow, ToleranceConfig};
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let inst = svd_mpe_oracle::random_linear(&mut rng, 8, 0.9);
    let mut xs = vec![inst.x0.clone()];
    for _ in 0..4 {
        xs.push(DenseVector::new(inst.problem.apply(xs.last().unwrap())).unwrap());
    }
    let w = IterateWindow::from_iterates(0, xs).unwrap();
    assert_eq!(w.k(), 3);
    let m = mpe(&w, &ToleranceConfig::default()).unwrap();
    let d = svd_mpe_oracle::det_representation(&w.iterates()[..4], &svd_mpe_oracle::mpe_weights(&w)).unwrap();
    let err: f64 = d.iter().zip(m.s.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    assert!(err <= 1e-8 * m.s.norm());
}
