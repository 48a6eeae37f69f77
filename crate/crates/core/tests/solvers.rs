use fraclim::energy::{gagliardo_full, stiffness_matrix};
use fraclim::grid::{lp_norm, DiscreteFunction, FracParams, Grid1D, IntervalDomain};
use fraclim::linalg::{Cholesky, DenseMatrix, SymmetricEigen};
use fraclim::solve::*;
use fraclim::{FracError, SeminormConfig, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// pi_p = 2 pi / (p sin(pi / p)); the m-th Dirichlet eigenvalue of the
// one-dimensional p-Laplacian on (0, 1) is (p - 1) (m pi_p)^p.
fn local_exact(p: f64, m: usize) -> f64 {
    let pi_p = 2.0 * std::f64::consts::PI / (p * (std::f64::consts::PI / p).sin());
    (p - 1.0) * (m as f64 * pi_p).powf(p)
}

#[test]
fn first_mode_matches_dense() {
    let g = Grid1D::unit(256);
    let fp = FracParams::one_d(0.5, 2.0).unwrap();
    let cfg = SolverConfig::default();
    let pg = first_eigen_fractional(&g, fp, &cfg).unwrap();
    let dense = dense_eigen_p2(&g, fp, 3, cfg.seminorm).unwrap();
    assert!(rel(pg.lambda, dense[0].lambda) < 1e-8);
    assert!(dense[0].lambda > 0.0);
    assert!(dense[0].lambda <= dense[1].lambda && dense[1].lambda <= dense[2].lambda);
    assert!((lp_norm(&pg.eigenfunction, 2.0).unwrap() - 1.0).abs() < 1e-10);
    assert!(pg.residual <= cfg.tol);
    assert!(pg.eigenfunction.values.iter().all(|&v| v > 0.0));
}

#[test]
fn second_mode_matches_dense() {
    let g = Grid1D::unit(256);
    let fp = FracParams::one_d(0.6, 2.0).unwrap();
    let cfg = SolverConfig::default();
    let u1 = first_eigen_fractional(&g, fp, &cfg).unwrap();
    let u2 = second_eigen_fractional(&g, fp, &u1, &cfg).unwrap();
    let dense = dense_eigen_p2(&g, fp, 2, cfg.seminorm).unwrap();
    assert!(rel(u2.lambda, dense[1].lambda) < 1e-4, "{} {}", u2.lambda, dense[1].lambda);
    let v = &u2.eigenfunction.values;
    assert!(v.iter().any(|&x| x > 0.0) && v.iter().any(|&x| x < 0.0));
}

#[test]
fn rayleigh_quotient_never_increases() {
    let g = Grid1D::unit(64);
    let cfg = SolverConfig::default();
    for (s, p) in [(0.5, 2.0), (0.7, 3.0), (0.8, 1.5)] {
        let fp = FracParams::one_d(s, p).unwrap();
        let r = first_eigen_fractional(&g, fp, &cfg).unwrap();
        for w in r.history.windows(2) {
            assert!(w[1] <= w[0], "p={p}: {} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn second_exceeds_first_for_nonlinear_p() {
    let g = Grid1D::unit(48);
    let cfg = SolverConfig::default();
    for (s, p) in [(0.7f64, 3.0f64), (0.8, 1.5)] {
        let fp = FracParams::one_d(s, p).unwrap();
        let u1 = first_eigen_fractional(&g, fp, &cfg).unwrap();
        let u2 = second_eigen_fractional(&g, fp, &u1, &cfg).unwrap();
        assert!(u2.lambda > u1.lambda);
        assert!((lp_norm(&u2.eigenfunction, p).unwrap() - 1.0).abs() < 1e-10);
        let v = &u2.eigenfunction.values;
        assert!(v.iter().any(|&x| x > 0.0) && v.iter().any(|&x| x < 0.0));
    }
}

#[test]
fn negated_start_gives_same_value() {
    let g = Grid1D::unit(64);
    let fp = FracParams::one_d(0.6, 3.0).unwrap();
    let cfg = SolverConfig::default();
    let a = first_eigen_fractional(&g, fp, &cfg).unwrap();
    let neg: Vec<f64> = DiscreteFunction::hat(g).values.iter().map(|v| -v).collect();
    let b = first_eigen_fractional_from(&g, fp, &neg, &cfg).unwrap();
    assert!(rel(a.lambda, b.lambda) < 1e-8);
}

#[test]
fn dilation_scales_eigenvalue() {
    let fp = FracParams::one_d(0.5, 2.0).unwrap();
    let cfg = SolverConfig::default();
    let g1 = Grid1D::unit(128);
    let g2 = Grid1D::new(IntervalDomain::new(0.0, 2.0).unwrap(), 128);
    let l1 = first_eigen_fractional(&g1, fp, &cfg).unwrap().lambda;
    let l2 = first_eigen_fractional(&g2, fp, &cfg).unwrap().lambda;
    assert!(rel(l2, 2f64.powf(-1.0) * l1) < 1e-6);
}

#[test]
fn quadratic_form_matches_energy() {
    let g = Grid1D::unit(64);
    let fp = FracParams::one_d(0.4, 2.0).unwrap();
    let cfg = SeminormConfig::default();
    let a = stiffness_matrix(&g, fp, cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let v: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let e = gagliardo_full(&DiscreteFunction::new(g, v.clone()).unwrap(), fp, cfg).unwrap();
        assert!(rel(a.quadratic_form(&v), e) < 1e-8);
    }
}

#[test]
fn dense_rejects_bad_input() {
    let g = Grid1D::unit(8);
    let cfg = SeminormConfig::default();
    let fp = FracParams::one_d(0.5, 2.0).unwrap();
    assert!(matches!(dense_eigen_p2(&g, fp, 9, cfg), Err(FracError::InvalidInput(_))));
    let fp3 = FracParams::one_d(0.5, 3.0).unwrap();
    assert!(dense_eigen_p2(&g, fp3, 1, cfg).is_err());
}

#[test]
fn local_eigenvalues_match_closed_form() {
    let g = Grid1D::unit(512);
    let cfg = SolverConfig::default();
    for p in [2.0, 3.0] {
        for m in [1, 2] {
            let r = local_eigen(&g, p, m, &cfg).unwrap();
            assert!(rel(r.lambda, local_exact(p, m)) < 1e-3, "p={p} m={m}: {}", r.lambda);
        }
    }
    let pi2 = std::f64::consts::PI.powi(2);
    assert!(rel(local_exact(2.0, 1), pi2) < 1e-15);
}

#[test]
fn local_p3_self_converges() {
    let cfg = SolverConfig::default();
    let a = local_eigen(&Grid1D::unit(255), 3.0, 1, &cfg).unwrap().lambda;
    let b = local_eigen(&Grid1D::unit(511), 3.0, 1, &cfg).unwrap().lambda;
    assert!(rel(a, b) < 1e-3);
}

#[test]
fn cell_problem_is_odd_and_below_linear_profile() {
    let cfg = SolverConfig::default();
    let (s, p) = (0.8, 2.0);
    let fp = FracParams::one_d(s, p).unwrap();
    let (e_plus, v_plus) = cell_problem(fp, 64, 1, &cfg).unwrap();
    let (e_minus, v_minus) = cell_problem(fp, 64, -1, &cfg).unwrap();
    assert!(rel(e_plus, e_minus) < 1e-10);
    let n = v_plus.values.len();
    for i in 0..n {
        assert!((v_minus.values[i] + v_plus.values[i]).abs() < 1e-8);
        assert!((v_minus.values[i] - v_plus.values[n - 1 - i]).abs() < 1e-8);
    }
    let linear = (1.0 - s) * 2.0 / ((p - s * p) * (p + 1.0 - s * p));
    assert!(e_plus <= linear + 1e-12);
    assert!(e_plus > 0.0);
}

#[test]
fn cell_problem_needs_sp_above_one() {
    let fp = FracParams::one_d(0.4, 2.0).unwrap();
    assert!(matches!(
        cell_problem(fp, 16, 1, &SolverConfig::default()),
        Err(FracError::Regime(_))
    ));
}

#[test]
fn local_dual_norm_of_constant() {
    let cfg = SolverConfig::default();
    let f = DiscreteFunction::from_fn(Grid1D::unit(256), |_| 1.0);
    let d = dual_norm_local(&f, 2.0, &cfg).unwrap();
    assert!(rel(d, (1.0f64 / 12.0).sqrt()) < 1e-4);
    let d2 = dual_norm_local(&f.scaled(2.0), 2.0, &cfg).unwrap();
    assert!(rel(d2, 2.0 * d) < 1e-8);
    let zero = DiscreteFunction::zeros(Grid1D::unit(16));
    assert_eq!(dual_norm_local(&zero, 2.0, &cfg).unwrap(), 0.0);
}

#[test]
fn fractional_dual_norm_matches_linear_solve() {
    let cfg = SolverConfig::default();
    let g = Grid1D::unit(96);
    let s = 0.7;
    let fp = FracParams::one_d(s, 2.0).unwrap();
    let f = DiscreteFunction::from_fn(g, |x| 1.0 + x * x);
    let d = dual_norm_fractional(&f, fp, &cfg).unwrap();

    // b = M f with the piecewise-linear Gramian
    let h = g.h;
    let n = g.n;
    let b: Vec<f64> = (0..n)
        .map(|i| {
            let l = if i > 0 { f.values[i - 1] } else { 0.0 };
            let r = if i + 1 < n { f.values[i + 1] } else { 0.0 };
            h / 6.0 * (l + 4.0 * f.values[i] + r)
        })
        .collect();
    let a = stiffness_matrix(&g, fp, cfg.seminorm).unwrap();
    let x = Cholesky::new(&a).unwrap().solve(&b);
    let btx: f64 = b.iter().zip(&x).map(|(p, q)| p * q).sum();
    let oracle = (btx / (1.0 - s)).sqrt();
    assert!(rel(d, oracle) < 1e-6, "{d} {oracle}");
    assert_eq!(dual_norm_fractional(&DiscreteFunction::zeros(g), fp, &cfg).unwrap(), 0.0);
}

#[test]
fn courant_trivial_cases() {
    let q = DenseMatrix::<f64>::from_diagonal(&[1.0, 2.0, 3.0]);
    assert!((courant_minimax(&q, 2, 8, 1).unwrap() - 2.0).abs() < 1e-6);
    assert!((courant_minimax(&q, 1, 8, 1).unwrap() - 1.0).abs() < 1e-6);
    assert!((courant_minimax(&q, 3, 1, 1).unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn courant_matches_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let d = 5;
    let b: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let mut q = DenseMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            q[(i, j)] = (0..d).map(|k| b[i][k] * b[j][k]).sum::<f64>();
        }
        q[(i, i)] += 0.1;
    }
    let eig = SymmetricEigen::new(&q).unwrap();
    let v = courant_minimax(&q, 3, 8, 5).unwrap();
    assert!((v - eig.values[2]).abs() < 1e-6, "{v} {}", eig.values[2]);
}

#[test]
fn courant_rejects_bad_matrices() {
    let asym = DenseMatrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]);
    assert!(matches!(courant_minimax(&asym, 1, 1, 0), Err(FracError::InvalidInput(_))));
    let indef = DenseMatrix::from_diagonal(&[1.0, -1.0]);
    assert!(matches!(courant_minimax(&indef, 1, 1, 0), Err(FracError::InvalidInput(_))));
    let big = DenseMatrix::<f64>::identity(9);
    assert!(courant_minimax(&big, 1, 1, 0).is_err());
}

#[test]
fn record_round_trip() {
    let g = Grid1D::unit(16);
    let fp = FracParams::one_d(0.5, 2.0).unwrap();
    let r = first_eigen_fractional(&g, fp, &SolverConfig::default()).unwrap();
    let json = r.to_json();
    let back: EigenRecord = serde_json::from_str(&json).unwrap();
    let r2 = back.into_result().unwrap();
    assert_eq!(r2.lambda, r.lambda);
    assert_eq!(r2.eigenfunction.values, r.eigenfunction.values);
    assert_eq!(r2.to_json(), json);
}

#[test]
fn solver_config_validation() {
    let mut cfg = SolverConfig::default();
    cfg.path_points = 8;
    assert!(cfg.validate().is_err());
    cfg.path_points = 33;
    cfg.tol = 0.0;
    assert!(cfg.validate().is_err());
}

#[test]
fn single_precision_first_mode() {
    let g = Grid1D::<f32>::unit(32);
    let fp = FracParams::<f32>::one_d(0.5, 2.0).unwrap();
    let mut cfg = SolverConfig::default();
    cfg.tol = 1e-5;
    let r = first_eigen_fractional(&g, fp, &cfg).unwrap();
    let d = dense_eigen_p2(&Grid1D::unit(32), FracParams::one_d(0.5, 2.0).unwrap(), 1, cfg.seminorm)
        .unwrap();
    assert!(((r.lambda as f64) - d[0].lambda).abs() / d[0].lambda < 1e-4);
}
