#![allow(dead_code)]

use magnomech::dynamics::CovarianceMatrix;
use magnomech::PhysicalParams;
use nalgebra::{Complex, DMatrix, Matrix6};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Haar-random n×n unitary from the QR decomposition of a complex Ginibre matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> DMatrix<Complex<f64>> {
    let z = DMatrix::from_fn(n, n, |_, _| {
        Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex::new(1.0, 0.0) };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Real orthogonal symplectic matrix of a passive transformation, in
/// interleaved (x₁, p₁, x₂, p₂, …) ordering.
pub fn passive_symplectic(u: &DMatrix<Complex<f64>>) -> DMatrix<f64> {
    let n = u.nrows();
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = u[(i, j)];
            s[(2 * i, 2 * j)] = z.re;
            s[(2 * i, 2 * j + 1)] = -z.im;
            s[(2 * i + 1, 2 * j)] = z.im;
            s[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    s
}

pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut om = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        om[(2 * k, 2 * k + 1)] = 1.0;
        om[(2 * k + 1, 2 * k)] = -1.0;
    }
    om
}

/// Random symplectic matrix: passive · single-mode squeezers · passive.
pub fn random_symplectic(rng: &mut impl Rng, n: usize, max_squeeze: f64) -> DMatrix<f64> {
    let o1 = passive_symplectic(&random_unitary(rng, n));
    let o2 = passive_symplectic(&random_unitary(rng, n));
    let mut z = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        let r = rng.random_range(0.0..max_squeeze);
        z[(2 * k, 2 * k)] = r.exp();
        z[(2 * k + 1, 2 * k + 1)] = (-r).exp();
    }
    o1 * z * o2
}

/// Random physical three-mode covariance matrix S diag(ν) Sᵀ with ν ≥ 1/2.
pub fn random_physical_state(rng: &mut impl Rng) -> CovarianceMatrix {
    let s = random_symplectic(rng, 3, 1.5);
    let mut d = DMatrix::zeros(6, 6);
    for k in 0..3 {
        let nu = 0.5 + rng.random_range(0.0..2.0f64).powi(2);
        d[(2 * k, 2 * k)] = nu;
        d[(2 * k + 1, 2 * k + 1)] = nu;
    }
    let v = &s * d * s.transpose();
    CovarianceMatrix::symmetrized(Matrix6::from_iterator(v.iter().copied()))
}

/// Two-mode squeezed vacuum with squeezing r in (x₁, p₁, x₂, p₂) ordering.
pub fn tmsv(r: f64) -> DMatrix<f64> {
    let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
    DMatrix::from_row_slice(4, 4, &[
        c, 0.0, s, 0.0, //
        0.0, c, 0.0, -s, //
        s, 0.0, c, 0.0, //
        0.0, -s, 0.0, c,
    ])
}

/// Embeds a 4×4 two-mode matrix on the given pair of modes of a 3-mode
/// matrix; the third mode is vacuum.
pub fn embed_pair(v2: &DMatrix<f64>, modes: (usize, usize)) -> CovarianceMatrix {
    let mut v = Matrix6::identity() * 0.5;
    let idx = [2 * modes.0, 2 * modes.0 + 1, 2 * modes.1, 2 * modes.1 + 1];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            v[(i, j)] = v2[(a, b)];
        }
    }
    CovarianceMatrix(v)
}

/// Random parameter draw around the reference device, kept valid.
pub fn random_params(rng: &mut impl Rng) -> PhysicalParams {
    let mut p = PhysicalParams::reference();
    let wb = p.omega_b;
    p.delta_a = rng.random_range(-2.0..2.0) * wb;
    p.delta_m_tilde_target = rng.random_range(0.3..1.5) * wb;
    p.p_a = rng.random_range(0.0..0.5);
    p.p_m = rng.random_range(0.0..1.0);
    p.theta_a = rng.random_range(0.0..std::f64::consts::TAU);
    p.theta_m = rng.random_range(0.0..std::f64::consts::TAU);
    p.temperature = rng.random_range(0.0..0.5);
    p
}
