mod common;

use magnomech::dynamics::{build_drift, is_stable, lyapunov_residual, solve_lyapunov, CovarianceMatrix};
use magnomech::entanglement::{log_negativity, residual_contangle, symplectic_eigenvalues, EntanglementReport, Mode, Partition};
use magnomech::meanfield::solve_steady_state;
use magnomech::params::thermal_occupation;
use magnomech::{evaluate, PhysicalParams, PumpMode};
use nalgebra::{DMatrix, Matrix6, Vector6};
use proptest::prelude::*;
use rand::Rng;

fn rotation_block(v: &CovarianceMatrix, mode: usize, angle: f64) -> CovarianceMatrix {
    let mut r = Matrix6::identity();
    let (s, c) = angle.sin_cos();
    let k = 2 * mode;
    r[(k, k)] = c;
    r[(k, k + 1)] = -s;
    r[(k + 1, k)] = s;
    r[(k + 1, k + 1)] = c;
    CovarianceMatrix(r * v.0 * r.transpose())
}

fn permute_modes(v: &CovarianceMatrix, perm: [usize; 3]) -> CovarianceMatrix {
    let mut p = Matrix6::zeros();
    for (new, &old) in perm.iter().enumerate() {
        p[(2 * new, 2 * old)] = 1.0;
        p[(2 * new + 1, 2 * old + 1)] = 1.0;
    }
    CovarianceMatrix(p * v.0 * p.transpose())
}

fn report(v: &CovarianceMatrix) -> EntanglementReport {
    EntanglementReport::compute(v, true).unwrap()
}

/// Nonlinear classical flow in quadrature coordinates (X, Y, x, y, q, p),
/// with a = (X + iY)/√2 and m = (x + iy)/√2.
fn flow(p: &PhysicalParams, delta_m: f64, u: &Vector6<f64>) -> Vector6<f64> {
    use nalgebra::Complex;
    let s2 = std::f64::consts::SQRT_2;
    let a = Complex::new(u[0], u[1]) / s2;
    let m = Complex::new(u[2], u[3]) / s2;
    let (q, pm) = (u[4], u[5]);
    let i = Complex::i();
    let ea = Complex::from_polar(p.epsilon_a().unwrap(), -p.theta_a);
    let em = Complex::from_polar(p.epsilon_m().unwrap(), -p.theta_m);
    let da = -(i * p.delta_a + p.kappa_a) * a - i * p.g_ma * m + ea;
    let dm = -(i * delta_m + p.kappa_m) * m - i * p.g_ma * a - i * p.g_mb * m * q + em;
    let dq = p.omega_b * pm;
    let dp = -p.omega_b * q - p.gamma_b * pm - p.g_mb * m.norm_sqr();
    Vector6::new(s2 * da.re, s2 * da.im, s2 * dm.re, s2 * dm.im, dq, dp)
}

#[test]
fn drift_equals_finite_difference_jacobian() {
    let mut rng = common::rng(2024);
    let s2 = std::f64::consts::SQRT_2;
    for _ in 0..100 {
        let p = common::random_params(&mut rng);
        let s = solve_steady_state(&p).unwrap();
        let a = build_drift(&p, &s);
        let u0 = Vector6::new(
            s2 * s.alpha_s.re,
            s2 * s.alpha_s.im,
            s2 * s.m_s.re,
            s2 * s.m_s.im,
            s.q_s,
            s.p_s,
        );
        let h = 1e-3 * u0.norm().max(1.0);
        let amax = a.abs().max();
        for j in 0..6 {
            let mut e = Vector6::zeros();
            e[j] = h;
            let col = (flow(&p, s.delta_m, &(u0 + e)) - flow(&p, s.delta_m, &(u0 - e))) / (2.0 * h);
            for i in 0..6 {
                let tol = 1e-6 * a[(i, j)].abs() + 1e-9 * amax;
                assert!((col[i] - a[(i, j)]).abs() <= tol, "({i},{j}): fd {} vs {}", col[i], a[(i, j)]);
            }
        }
    }
}

#[test]
fn lyapunov_residual_on_random_stable_systems() {
    let mut rng = common::rng(500);
    for _ in 0..500 {
        let r = Matrix6::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let a = r - Matrix6::identity() * 6.0;
        let d = Matrix6::from_diagonal(&Vector6::from_fn(|_, _| rng.random_range(0.0..1.0)));
        assert!(is_stable(&a, 1e-9).unwrap().stable);
        let v = solve_lyapunov(&a, &d).unwrap();
        assert!(lyapunov_residual(&a, &d, &v) < 1e-10);
        assert!(v.asymmetry() < 1e-12);
    }
}

#[test]
fn random_states_satisfy_uncertainty_and_monogamy() {
    let mut rng = common::rng(7);
    for _ in 0..1000 {
        let v = common::random_physical_state(&mut rng);
        let full = DMatrix::from_iterator(6, 6, v.0.iter().copied());
        let nus = symplectic_eigenvalues(&full).unwrap();
        assert!(nus.iter().all(|&x| x >= 0.5 - 1e-10), "{nus:?}");
        let r = report(&v);
        assert!(r.residuals.iter().all(|&x| x >= -1e-10), "{:?}", r.residuals);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn occupation_monotone(w in 1e6..1e11f64, t in 1e-3..1.0f64, f in 1.001..10.0f64) {
        let n = thermal_occupation(w, t).unwrap();
        prop_assert!(n >= 0.0);
        prop_assert!(thermal_occupation(w * f, t).unwrap() <= n);
        prop_assert!(thermal_occupation(w, t * f).unwrap() >= n);
    }

    #[test]
    fn local_rotations_leave_entanglement_unchanged(
        seed in any::<u64>(),
        mode in 0usize..3,
        angle in -7.0..7.0f64,
    ) {
        let v = common::random_physical_state(&mut common::rng(seed));
        let (r0, r1) = (report(&v), report(&rotation_block(&v, mode, angle)));
        for (x, y) in r0.en_pairs.iter().chain(&r0.en_splits).chain(&r0.residuals)
            .zip(r1.en_pairs.iter().chain(&r1.en_splits).chain(&r1.residuals))
        {
            prop_assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn relabeling_modes_keeps_min_residual(seed in any::<u64>(), which in 0usize..6) {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let v = common::random_physical_state(&mut common::rng(seed));
        let w = permute_modes(&v, perms[which]);
        prop_assert!((report(&v).r_min - report(&w).r_min).abs() < 1e-9);
    }

    #[test]
    fn appended_vacuum_keeps_pair_negativity(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let s = common::random_symplectic(&mut rng, 2, 1.5);
        let nu: [f64; 2] = [0.5 + rng.random_range(0.0..1.0), 0.5 + rng.random_range(0.0..1.0)];
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![nu[0], nu[0], nu[1], nu[1]]));
        let v2 = &s * d * s.transpose();
        let mut flipped = v2.clone();
        for k in 0..4 {
            flipped[(1, k)] = -flipped[(1, k)];
            flipped[(k, 1)] = -flipped[(k, 1)];
        }
        let direct = (-(2.0 * symplectic_eigenvalues(&flipped).unwrap()[0]).ln()).max(0.0);
        let v = common::embed_pair(&v2, (0, 2));
        let en = log_negativity(&v, &Partition::new(Mode::A, &[Mode::B]).unwrap()).unwrap();
        prop_assert!((en - direct).abs() < 1e-9);
        prop_assert!(log_negativity(&v, &Partition::new(Mode::A, &[Mode::M]).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn log_negativity_is_lipschitz_away_from_kink(seed in any::<u64>(), pivot in 0usize..3) {
        let mut rng = common::rng(seed);
        let v = common::random_physical_state(&mut rng);
        let r = Mode::ALL[pivot];
        let part = Partition::one_vs_rest(r);
        let e0 = log_negativity(&v, &part).unwrap();
        prop_assume!(e0 > 0.01);
        let h = Matrix6::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let h = (h + h.transpose()) / (h + h.transpose()).norm();
        let de = |eps: f64| log_negativity(&CovarianceMatrix(v.0 + h * eps), &part).unwrap() - e0;
        let (d1, d2) = (de(1e-6), de(1e-7));
        // O(ε): shrinking ε tenfold shrinks the change tenfold; the floor covers rounding in 10·d2
        prop_assert!((d1 - 10.0 * d2).abs() <= 1e-3 * d1.abs() + 1e-10, "{d1} {d2}");
        let _ = residual_contangle(&v, r).unwrap();
    }

    #[test]
    fn common_phase_keeps_symplectic_spectra(phi in -7.0..7.0f64, da in -0.8..0.0f64, dth in 0.0..std::f64::consts::TAU) {
        let mut p = PhysicalParams::reference().with_delta_theta(dth);
        p.delta_a = da * p.omega_b;
        let e0 = evaluate(&p, PumpMode::Both).unwrap();
        let Some(v0) = e0.covariance else { return Ok(()); };
        let mut q = p;
        q.theta_a += phi;
        q.theta_m += phi;
        let v1 = evaluate(&q, PumpMode::Both).unwrap().covariance.expect("same stability");
        let f0 = DMatrix::from_iterator(6, 6, v0.0.iter().copied());
        let f1 = DMatrix::from_iterator(6, 6, v1.0.iter().copied());
        for mode in Mode::ALL {
            let t0 = magnomech::entanglement::partial_transpose(&f0, &Mode::ALL, mode).unwrap();
            let t1 = magnomech::entanglement::partial_transpose(&f1, &Mode::ALL, mode).unwrap();
            let (s0, s1) = (symplectic_eigenvalues(&t0).unwrap(), symplectic_eigenvalues(&t1).unwrap());
            for (x, y) in s0.iter().zip(&s1) {
                prop_assert!((x - y).abs() < 1e-10 * x.max(1.0), "{x} vs {y}");
            }
        }
    }
}
