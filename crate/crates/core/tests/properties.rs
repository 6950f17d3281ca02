use fisher_core::{
    center_scores, concat_real_imag, gram, residual, solve_cg, solve_chol, solve_chol_hermitian,
    solve_naive, solve_rvb, solve_svd_from_factors, thin_svd_direct, thin_svd_eigh, CgOptions,
    CholWorkspace, Complex64, DampedSystem, Mat, RawScores, ScoreMatrix, Variant,
    DEFAULT_SIGMA_FLOOR,
};
use proptest::prelude::*;

fn rel_err<T: fisher_core::Scalar>(x: &[T], y: &[T]) -> f64 {
    let d: Vec<T> = x.iter().zip(y).map(|(a, b)| *a - *b).collect();
    fisher_core::norm2(&d) / fisher_core::norm2(y).max(f64::MIN_POSITIVE)
}

/// Shape, entries of S and v, and lambda.
fn real_system() -> impl Strategy<Value = DampedSystem<f64>> {
    // The eigh route needs n <= m, the regime the solvers target.
    (1usize..=6)
        .prop_flat_map(|n| (Just(n), n..=24, prop::sample::select(vec![1e-6, 1e-3, 1.0, 10.0])))
        .prop_flat_map(|(n, m, lambda)| {
            (
                prop::collection::vec(-2.0f64..2.0, n * m),
                prop::collection::vec(-2.0f64..2.0, m),
                Just((n, m, lambda)),
            )
        })
        .prop_map(|(s, v, (n, m, lambda))| {
            DampedSystem::new(ScoreMatrix::from_vec(n, m, s).unwrap(), lambda, v).unwrap()
        })
}

fn complex_scores(max_n: usize, max_m: usize) -> impl Strategy<Value = ScoreMatrix<Complex64>> {
    (1..=max_n, 1..=max_m).prop_flat_map(|(n, m)| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * m).prop_map(move |z| {
            let data = z.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
            ScoreMatrix::from_vec(n, m, data).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chol_and_svd_routes_agree_with_dense(system in real_system()) {
        let oracle = solve_naive(&system).unwrap();
        // Relative error is bounded by cond(A) * eps; lambda = 1e-6 with
        // entries up to 2 keeps cond(A) below about 1e8.
        let tol = if system.lambda() < 1e-3 { 1e-6 } else { 1e-9 };
        let chol = solve_chol(&system).unwrap();
        prop_assert!(rel_err(&chol.x, &oracle.x) <= tol);
        let eigh = solve_svd_from_factors(
            &thin_svd_eigh(system.scores(), DEFAULT_SIGMA_FLOOR).unwrap(),
            system.lambda(),
            system.rhs(),
        ).unwrap();
        prop_assert!(rel_err(&eigh.x, &oracle.x) <= tol);
        let direct = solve_svd_from_factors(
            &thin_svd_direct(system.scores()).unwrap(),
            system.lambda(),
            system.rhs(),
        ).unwrap();
        prop_assert!(rel_err(&direct.x, &oracle.x) <= tol);
    }

    #[test]
    fn cg_matches_chol_when_well_conditioned(system in real_system()) {
        prop_assume!(system.lambda() >= 1.0);
        let chol = solve_chol(&system).unwrap();
        let cg = solve_cg(&system, CgOptions { tol: 1e-12, max_iter: 1000 }).unwrap();
        prop_assert!(cg.converged);
        prop_assert!(rel_err(&cg.x, &chol.x) <= 1e-9);
    }

    #[test]
    fn structured_rhs_solvers_coincide(
        system in real_system(),
        f in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let (s, lambda, _) = system.into_parts();
        let f = &f[..s.n()];
        let v = s.adjoint_apply(f).unwrap();
        let chol = solve_chol(&DampedSystem::new(s.clone(), lambda, v).unwrap()).unwrap();
        let rvb = solve_rvb(&s, lambda, f).unwrap();
        let scale = fisher_core::norm2(&chol.x).max(1.0);
        let d: Vec<f64> = rvb.x.iter().zip(&chol.x).map(|(a, b)| a - b).collect();
        prop_assert!(fisher_core::norm2(&d) <= 1e-8 * scale);
    }

    #[test]
    fn hermitian_chol_matches_dense(
        s in complex_scores(5, 16),
        seed_v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        lambda in 1e-2f64..10.0,
    ) {
        let v = seed_v[..s.m()].iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let system = DampedSystem::new(s, lambda, v).unwrap();
        let chol = solve_chol_hermitian(&system).unwrap();
        let dense = solve_naive(&system).unwrap();
        prop_assert!(rel_err(&chol.x, &dense.x) <= 1e-10);
    }

    #[test]
    fn stacked_gram_is_real_part_of_hermitian_gram(s in complex_scores(6, 12)) {
        let c = concat_real_imag(&s).unwrap();
        let ctc = c.as_mat().adjoint().matmul(c.as_mat()).unwrap();
        let shs = s.as_mat().adjoint().matmul(s.as_mat()).unwrap();
        let m = s.m();
        for i in 0..m {
            for j in 0..m {
                prop_assert!((ctc[(i, j)] - shs[(i, j)].re).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn huge_damping_returns_scaled_rhs(system in real_system()) {
        let (s, _, v) = system.into_parts();
        let lambda = 1e9;
        let x = solve_chol(&DampedSystem::new(s, lambda, v.clone()).unwrap()).unwrap().x;
        let want: Vec<f64> = v.iter().map(|vi| vi / lambda).collect();
        prop_assert!(rel_err(&x, &want) <= 1e-6 || fisher_core::norm2(&v) == 0.0);
    }

    #[test]
    fn damped_gram_always_factors(system in real_system()) {
        let w = gram(system.scores(), system.lambda()).unwrap();
        prop_assert!(CholWorkspace::from_gram(w).is_ok());
    }

    #[test]
    fn residual_is_pure(system in real_system()) {
        let x = solve_chol(&system).unwrap().x;
        let a = residual(&system, &x, Variant::Plain).unwrap();
        let b = residual(&system, &x, Variant::Plain).unwrap();
        prop_assert_eq!(a.abs.to_bits(), b.abs.to_bits());
        prop_assert_eq!(a.rel.to_bits(), b.rel.to_bits());
    }

    #[test]
    fn centering_is_shift_invariant_and_scale_covariant(
        (n, m, data) in (1usize..8, 1usize..10)
            .prop_flat_map(|(n, m)| (Just(n), Just(m), prop::collection::vec(-5.0f64..5.0, n * m))),
        shift in -100.0f64..100.0,
        alpha in 0.1f64..10.0,
    ) {
        let base = center_scores(&RawScores::new(Mat::from_vec(n, m, data.clone()).unwrap()).unwrap());
        let shifted: Vec<f64> = data.iter().map(|x| x + shift).collect();
        let shifted = center_scores(&RawScores::new(Mat::from_vec(n, m, shifted).unwrap()).unwrap());
        prop_assert!(shifted.as_mat().max_abs_diff(base.as_mat()) <= 1e-12 * (1.0 + shift.abs()));
        let scaled: Vec<f64> = data.iter().map(|x| x * alpha).collect();
        let scaled = center_scores(&RawScores::new(Mat::from_vec(n, m, scaled).unwrap()).unwrap());
        for (a, b) in scaled.as_mat().as_slice().iter().zip(base.as_mat().as_slice()) {
            prop_assert!((a - alpha * b).abs() <= 1e-12 * alpha * 10.0);
        }
        for j in 0..m {
            let mean: f64 = (0..n).map(|i| base.as_mat()[(i, j)]).sum::<f64>() / n as f64;
            prop_assert!(mean.abs() <= 1e-14);
        }
    }
}

#[test]
fn zero_rhs_gives_zero_for_every_solver() {
    let s = ScoreMatrix::from_rows(&[[1.0, -2.0, 0.5], [0.0, 3.0, 1.0]]).unwrap();
    let system = DampedSystem::new(s, 0.1, vec![0.0; 3]).unwrap();
    for method in fisher_core::Method::ALL {
        let f = [0.0, 0.0];
        let sol = fisher_core::solve(method, &system, Some(&f), &Default::default()).unwrap();
        assert!(sol.x.iter().all(|&x| x == 0.0), "{method}: {:?}", sol.x);
    }
}
