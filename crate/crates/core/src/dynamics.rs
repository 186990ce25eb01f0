//! Linearized fluctuation dynamics, stability and steady-state covariance.
//!
//! Quadratures are ordered (δX, δY, δx, δy, δq, δp): cavity, magnon and
//! mechanical position/momentum pairs.

use nalgebra::{Complex, DMatrix, DVector, Matrix6, Schur};

use crate::error::{Error, Result};
use crate::meanfield::MeanFieldState;
use crate::params::PhysicalParams;

/// Real symmetric 6×6 steady-state covariance matrix, vacuum = I/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(pub Matrix6<f64>);

impl CovarianceMatrix {
    pub fn vacuum() -> Self {
        Self(Matrix6::identity() * 0.5)
    }

    /// Wraps `m` after symmetrizing it as (M + Mᵀ)/2.
    pub fn symmetrized(m: Matrix6<f64>) -> Self {
        Self((m + m.transpose()) * 0.5)
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    pub fn asymmetry(&self) -> f64 {
        (self.0 - self.0.transpose()).abs().max()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearModel {
    pub drift: Matrix6<f64>,
    pub diffusion: Matrix6<f64>,
    /// Effective magnomechanical coupling i√2 g_mb m_s.
    pub g_mb_eff: Complex<f64>,
}

impl LinearModel {
    pub fn new(params: &PhysicalParams, state: &MeanFieldState) -> Result<Self> {
        Ok(Self {
            drift: build_drift(params, state),
            diffusion: build_diffusion(params)?,
            g_mb_eff: Complex::new(0.0, std::f64::consts::SQRT_2 * params.g_mb) * state.m_s,
        })
    }
}

/// Drift matrix of the linearized fluctuations around `state`.
///
/// For a general complex m_s = m_r + i m_i the magnomechanical entries are
/// ±√2 g_mb m_{r,i}; when m_s is purely imaginary this is the usual real
/// pattern with G_mb = i√2 g_mb m_s in entries (3,5) and (6,4).
pub fn build_drift(params: &PhysicalParams, state: &MeanFieldState) -> Matrix6<f64> {
    let p = params;
    let s = std::f64::consts::SQRT_2 * p.g_mb;
    let (mr, mi) = (state.m_s.re, state.m_s.im);
    let dm = state.delta_m_tilde;
    #[rustfmt::skip]
    let a = Matrix6::new(
        -p.kappa_a, p.delta_a,  0.0,        p.g_ma,     0.0,        0.0,
        -p.delta_a, -p.kappa_a, -p.g_ma,    0.0,        0.0,        0.0,
        0.0,        p.g_ma,     -p.kappa_m, dm,         s * mi,     0.0,
        -p.g_ma,    0.0,        -dm,        -p.kappa_m, -s * mr,    0.0,
        0.0,        0.0,        0.0,        0.0,        0.0,        p.omega_b,
        0.0,        0.0,        -s * mr,    -s * mi,    -p.omega_b, -p.gamma_b,
    );
    a
}

/// Diagonal diffusion matrix
/// Diag[κ_a(2N_a+1), κ_a(2N_a+1), κ_m(2N_m+1), κ_m(2N_m+1), 0, γ_b(2N_b+1)].
///
/// The magnon bath occupation uses the magnon detuning input of `params`.
pub fn build_diffusion(params: &PhysicalParams) -> Result<Matrix6<f64>> {
    let n = params.occupations(params.delta_m_tilde_target)?;
    let da = params.kappa_a * (2.0 * n.n_a + 1.0);
    let dm = params.kappa_m * (2.0 * n.n_m + 1.0);
    let db = params.gamma_b * (2.0 * n.n_b + 1.0);
    Ok(Matrix6::from_diagonal(&nalgebra::Vector6::new(da, da, dm, dm, 0.0, db)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    pub stable: bool,
    /// Largest real part of the drift spectrum.
    pub margin: f64,
}

/// Stability slack used by the pipeline: 1e-9 ω_b.
pub fn stability_tolerance(params: &PhysicalParams) -> f64 {
    1e-9 * params.omega_b
}

/// Eigenvalues of a real 6×6 matrix from its real Schur form.
pub fn eigenvalues(a: &Matrix6<f64>) -> Result<Vec<Complex<f64>>> {
    let schur = Schur::try_new(*a, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Stable iff every eigenvalue of `a` has real part below `-tolerance`.
pub fn is_stable(a: &Matrix6<f64>, tolerance: f64) -> Result<Stability> {
    let margin = eigenvalues(a)?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if !margin.is_finite() {
        return Err(Error::Numerical("non-finite drift spectrum".into()));
    }
    Ok(Stability { stable: margin < -tolerance, margin })
}

/// Characteristic polynomial coefficients and Hurwitz minors of a drift matrix.
#[derive(Debug, Clone)]
pub struct HurwitzTest {
    /// c₀ … c₆ of det(λI − A/s) = Σ c_k λ^{6−k} with c₀ = 1, for the scale s
    /// stored alongside.
    pub coefficients: [f64; 7],
    pub scale: f64,
    /// Leading principal minors Δ₁ … Δ₆ of the Hurwitz matrix.
    pub minors: [f64; 6],
    pub stable: bool,
}

/// Routh-Hurwitz stability test on the characteristic polynomial of `a`.
///
/// The polynomial comes from the Faddeev-LeVerrier recursion on A scaled to
/// unit max-norm, so no eigenvalues are computed.
pub fn routh_hurwitz(a: &Matrix6<f64>) -> HurwitzTest {
    let scale = a.abs().max();
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let b = a / scale;
    let mut c = [0.0; 7];
    c[0] = 1.0;
    let mut m = Matrix6::<f64>::zeros();
    for k in 1..=6 {
        m = b * m + Matrix6::identity() * c[k - 1];
        c[k] = -(b * m).trace() / k as f64;
    }
    let n = 6;
    let coeff = |i: isize| -> f64 {
        if i < 0 || i > n as isize {
            0.0
        } else {
            c[i as usize]
        }
    };
    let mut h = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = coeff(2 * j as isize - i as isize + 1);
        }
    }
    let mut minors = [0.0; 6];
    for k in 1..=n {
        minors[k - 1] = h.view((0, 0), (k, k)).into_owned().determinant();
    }
    let stable = c.iter().skip(1).all(|&x| x > 0.0) && minors.iter().all(|&d| d > 0.0);
    HurwitzTest { coefficients: c, scale, minors, stable }
}

/// Solves A V + V Aᵀ = −D for stable `a` by a dense 36×36 solve of
/// (I⊗A + A⊗I) vec V = −vec D.
pub fn solve_lyapunov(a: &Matrix6<f64>, d: &Matrix6<f64>) -> Result<CovarianceMatrix> {
    let scale = a.abs().max();
    let st = is_stable(a, 1e-14 * scale)?;
    if !st.stable {
        return Err(Error::NoSteadyState(format!(
            "drift matrix is not Hurwitz (max Re eig = {:e})",
            st.margin
        )));
    }
    let n = 6;
    let eye = DMatrix::<f64>::identity(n, n);
    let ad = DMatrix::from_iterator(n, n, a.iter().copied());
    let sys = eye.kronecker(&ad) + ad.kronecker(&eye);
    let rhs = DVector::from_iterator(n * n, d.iter().map(|x| -x));
    let lu = sys.clone().lu();
    let x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Lyapunov operator".into()))?;
    let to_cm = |x: &DVector<f64>| CovarianceMatrix::symmetrized(Matrix6::from_iterator(x.iter().copied()));
    let mut best = (lyapunov_residual(a, d, &to_cm(&x)), x);
    // iterative refinement, kept only while it lowers the residual
    for _ in 0..4 {
        let Some(dx) = lu.solve(&(&rhs - &sys * &best.1)) else { break };
        let x = &best.1 + dx;
        let res = lyapunov_residual(a, d, &to_cm(&x));
        if !(res < best.0) {
            break;
        }
        best = (res, x);
    }
    let (res, x) = best;
    let v = to_cm(&x);
    // Near the stability boundary ‖V‖ grows without bound and no double
    // precision V can push the residual below ε‖A‖‖V‖/‖D‖.
    let floor = 64.0 * f64::EPSILON * 2.0 * a.norm() * v.0.norm() / d.norm().max(f64::MIN_POSITIVE);
    if !(res < 1e-10 || res <= floor) {
        return Err(Error::Numerical(format!(
            "Lyapunov residual {res:e} above 1e-10 and above the rounding floor {floor:e}"
        )));
    }
    Ok(v)
}

/// ‖A V + V Aᵀ + D‖_F / ‖D‖_F (absolute norm when D = 0).
pub fn lyapunov_residual(a: &Matrix6<f64>, d: &Matrix6<f64>, v: &CovarianceMatrix) -> f64 {
    let r = a * v.0 + v.0 * a.transpose() + d;
    let dn = d.norm();
    if dn > 0.0 {
        r.norm() / dn
    } else {
        r.norm()
    }
}

/// Default integration step 0.01 / max |Re λ(A)|.
pub fn default_step(a: &Matrix6<f64>) -> Result<f64> {
    let rate = eigenvalues(a)?.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    if rate > 0.0 {
        Ok(0.01 / rate)
    } else {
        Err(Error::Argument("drift spectrum has no decay rate to set a step".into()))
    }
}

/// Integrates V̇ = A V + V Aᵀ + D from `v0` over `t_final` with classical RK4.
///
/// The step is shrunk so an integer number of steps lands on `t_final`; V is
/// symmetrized after every step.
pub fn integrate_covariance(
    a: &Matrix6<f64>,
    d: &Matrix6<f64>,
    v0: &CovarianceMatrix,
    t_final: f64,
    dt: f64,
) -> Result<CovarianceMatrix> {
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::Argument(format!("need dt > 0 and t_final >= 0, got {dt}, {t_final}")));
    }
    if t_final == 0.0 {
        return Ok(*v0);
    }
    let steps = (t_final / dt).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let at = a.transpose();
    let flow = |v: &Matrix6<f64>| a * v + v * at + d;
    let limit = 1e12 * v0.0.norm().max(1.0);
    let mut v = v0.0;
    for k in 0..steps {
        let k1 = flow(&v);
        let k2 = flow(&(v + k1 * (h / 2.0)));
        let k3 = flow(&(v + k2 * (h / 2.0)));
        let k4 = flow(&(v + k3 * h));
        v += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        v = (v + v.transpose()) * 0.5;
        let norm = v.norm();
        if !(norm <= limit) {
            return Err(Error::Integration { t: (k + 1) as f64 * h, norm });
        }
    }
    Ok(CovarianceMatrix(v))
}
