//! Classical steady state of the driven three-mode system.
//!
//! With the effective magnon detuning Δ̃_m held fixed the magnon amplitude is
//! a closed-form expression and the bare detuning follows as
//! Δ_m = Δ̃_m − g_mb q_s. When the bare detuning is the input instead, the
//! magnon population u = |m_s|² solves a real cubic which is tracked from the
//! uncoupled solution by continuation in g_mb.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::params::{DetuningMode, PhysicalParams};

type C64 = Complex<f64>;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Continuation steps used in bare-detuning mode.
pub const HOMOTOPY_STEPS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldState {
    pub alpha_s: C64,
    pub m_s: C64,
    pub q_s: f64,
    pub p_s: f64,
    /// Bare magnon detuning actually used [rad/s].
    pub delta_m: f64,
    /// Effective magnon detuning Δ_m + g_mb q_s [rad/s].
    pub delta_m_tilde: f64,
    /// Number of admissible (real, non-negative) roots of the self-consistency
    /// cubic. Always 1 in effective-detuning mode.
    pub root_count: usize,
}

impl MeanFieldState {
    pub fn magnon_population(&self) -> f64 {
        self.m_s.norm_sqr()
    }

    fn zero(delta: f64) -> Self {
        Self {
            alpha_s: C64::new(0.0, 0.0),
            m_s: C64::new(0.0, 0.0),
            q_s: 0.0,
            p_s: 0.0,
            delta_m: delta,
            delta_m_tilde: delta,
            root_count: 1,
        }
    }
}

struct Drives {
    /// ε_a e^{−iθ_a}
    a: C64,
    /// ε_m e^{−iθ_m}
    m: C64,
    scale: f64,
}

fn drives(p: &PhysicalParams) -> Result<Drives> {
    let ea = p.epsilon_a()?;
    let em = p.epsilon_m()?;
    Ok(Drives {
        a: C64::from_polar(ea, -p.theta_a),
        m: C64::from_polar(em, -p.theta_m),
        scale: ea.max(em),
    })
}

/// Numerator of the magnon amplitude, −i g_ma ε_a e^{−iθ_a} + (iΔ_a + κ_a) ε_m e^{−iθ_m}.
fn magnon_numerator(p: &PhysicalParams, d: &Drives) -> C64 {
    let c = C64::new(p.kappa_a, p.delta_a);
    -I * p.g_ma * d.a + c * d.m
}

/// (iΔ̃_m + κ_m)(iΔ_a + κ_a) + g_ma²
fn magnon_denominator(p: &PhysicalParams, delta_m_tilde: f64) -> C64 {
    let c = C64::new(p.kappa_a, p.delta_a);
    C64::new(p.kappa_m, delta_m_tilde) * c + p.g_ma * p.g_ma
}

fn cavity_amplitude(p: &PhysicalParams, d: &Drives, m_s: C64) -> C64 {
    let c = C64::new(p.kappa_a, p.delta_a);
    -(I * p.g_ma * m_s - d.a) / c
}

/// Solves the classical steady state for `params`.
///
/// In [`DetuningMode::Effective`] the returned state has
/// `delta_m_tilde == params.delta_m_tilde_target`.
pub fn solve_steady_state(params: &PhysicalParams) -> Result<MeanFieldState> {
    match params.detuning_mode {
        DetuningMode::Effective => solve_effective(params),
        DetuningMode::Bare => solve_bare(params),
    }
}

fn solve_effective(p: &PhysicalParams) -> Result<MeanFieldState> {
    let d = drives(p)?;
    let target = p.delta_m_tilde_target;
    if d.scale == 0.0 {
        return Ok(MeanFieldState::zero(target));
    }
    let den = magnon_denominator(p, target);
    if den.norm() == 0.0 {
        return Err(Error::NoSteadyState("vanishing magnon response denominator".into()));
    }
    let m_s = magnon_numerator(p, &d) / den;
    let q_s = -p.g_mb * m_s.norm_sqr() / p.omega_b;
    Ok(MeanFieldState {
        alpha_s: cavity_amplitude(p, &d, m_s),
        m_s,
        q_s,
        p_s: 0.0,
        delta_m: target - p.g_mb * q_s,
        delta_m_tilde: target,
        root_count: 1,
    })
}

/// Coefficients of the self-consistency cubic in the normalized population
/// w = u / u₀, where u₀ is the uncoupled (g_mb = 0) population:
/// `c3 w³ + c2 w² + w − 1 = 0`.
#[derive(Debug, Clone, Copy)]
struct NormalizedCubic {
    c3: f64,
    c2: f64,
}

impl NormalizedCubic {
    fn eval(&self, w: f64) -> f64 {
        ((self.c3 * w + self.c2) * w + 1.0) * w - 1.0
    }

    fn deriv(&self, w: f64) -> f64 {
        (3.0 * self.c3 * w + 2.0 * self.c2) * w + 1.0
    }

    fn polish(&self, mut w: f64) -> f64 {
        for _ in 0..8 {
            let d = self.deriv(w);
            if d == 0.0 {
                break;
            }
            let step = self.eval(w) / d;
            w -= step;
            if step.abs() <= 1e-14 * w.abs().max(1e-300) {
                break;
            }
        }
        w
    }

    /// Real roots, ascending, each polished.
    fn real_roots(&self) -> Vec<f64> {
        let mut roots = if self.c3 == 0.0 {
            if self.c2 == 0.0 {
                vec![1.0]
            } else {
                quadratic_roots(self.c2, 1.0, -1.0)
            }
        } else {
            cubic_roots(self.c2 / self.c3, 1.0 / self.c3, -1.0 / self.c3)
        };
        for r in roots.iter_mut() {
            *r = self.polish(*r);
        }
        roots.sort_by(|a, b| a.total_cmp(b));
        roots
    }
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut r = vec![q / a];
    if q != 0.0 {
        r.push(c / q);
    }
    r
}

/// Real roots of the monic cubic x³ + b x² + c x + d via the discriminant.
fn cubic_roots(b: f64, c: f64, d: f64) -> Vec<f64> {
    let shift = b / 3.0;
    let p = c - b * shift;
    let q = 2.0 * shift * shift * shift - c * shift + d;
    let disc = -(4.0 * p * p * p + 27.0 * q * q);
    if disc > 0.0 {
        // three distinct real roots, trigonometric form
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift)
            .collect()
    } else {
        let s = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
        let t = (-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt();
        vec![t - shift]
    }
}

fn bare_cubic(p: &PhysicalParams, g_mb: f64, u0: f64) -> NormalizedCubic {
    let c = C64::new(p.kappa_a, p.delta_a);
    let d0 = p.kappa_m * c + p.g_ma * p.g_ma;
    let beta = g_mb * g_mb / p.omega_b;
    let a1 = magnon_denominator(p, p.delta_m_tilde_target).norm_sqr();
    let cross = (d0 * c.conj()).im;
    let a3 = c.norm_sqr() * beta * beta;
    let a2 = -2.0 * beta * (c.norm_sqr() * p.delta_m_tilde_target + cross);
    NormalizedCubic { c3: a3 * u0 * u0 / a1, c2: a2 * u0 / a1 }
}

fn solve_bare(p: &PhysicalParams) -> Result<MeanFieldState> {
    let d = drives(p)?;
    let delta_m = p.delta_m_tilde_target;
    if d.scale == 0.0 {
        return Ok(MeanFieldState::zero(delta_m));
    }
    let num = magnon_numerator(p, &d);
    let den0 = magnon_denominator(p, delta_m);
    let u0 = num.norm_sqr() / den0.norm_sqr();
    if u0 == 0.0 || p.g_mb == 0.0 {
        return solve_effective(p);
    }

    let mut tracked = 1.0;
    let mut roots = Vec::new();
    for k in 1..=HOMOTOPY_STEPS {
        let g = p.g_mb * k as f64 / HOMOTOPY_STEPS as f64;
        let cubic = bare_cubic(p, g, u0);
        roots = cubic.real_roots().into_iter().filter(|w| *w >= 0.0).collect();
        if roots.is_empty() {
            return Err(Error::NoSteadyState("no admissible root of the self-consistency cubic".into()));
        }
        tracked = nearest(&roots, tracked);
    }

    let u = tracked * u0;
    let q_s = -p.g_mb * u / p.omega_b;
    let delta_m_tilde = delta_m + p.g_mb * q_s;
    let m_s = num / magnon_denominator(p, delta_m_tilde);
    Ok(MeanFieldState {
        alpha_s: cavity_amplitude(p, &d, m_s),
        m_s,
        q_s,
        p_s: 0.0,
        delta_m,
        delta_m_tilde,
        root_count: roots.len(),
    })
}

/// Root closest to `target`; exact ties go to the smaller root.
fn nearest(roots: &[f64], target: f64) -> f64 {
    let mut best = roots[0];
    for &r in &roots[1..] {
        if (r - target).abs() < (best - target).abs() {
            best = r;
        }
    }
    best
}

/// Large-detuning approximation of the magnon amplitude,
/// (−i g_ma ε_a e^{−iθ_a} + iΔ_a ε_m e^{−iθ_m}) / (g_ma² − Δ̃_m Δ_a).
pub fn magnon_amplitude_approx(params: &PhysicalParams, delta_m_tilde: f64) -> Result<C64> {
    let d = drives(params)?;
    let num = -I * params.g_ma * d.a + I * params.delta_a * d.m;
    let g2 = params.g_ma * params.g_ma;
    let den = g2 - delta_m_tilde * params.delta_a;
    if den.abs() <= 1e-15 * (g2 + (delta_m_tilde * params.delta_a).abs()) {
        return Err(Error::Singular(format!(
            "g_ma^2 = delta_m_tilde * delta_a ({g2:e})"
        )));
    }
    Ok(num / den)
}

/// Norm of the mean-field time derivatives at `state`, divided by the larger
/// drive amplitude. Zero exactly at a fixed point.
pub fn steady_state_residual(params: &PhysicalParams, state: &MeanFieldState) -> f64 {
    let Ok(d) = drives(params) else {
        return f64::NAN;
    };
    let p = params;
    let (a, m, q, pm) = (state.alpha_s, state.m_s, state.q_s, state.p_s);
    let da = -C64::new(p.kappa_a, p.delta_a) * a - I * p.g_ma * m + d.a;
    let dm = -C64::new(p.kappa_m, state.delta_m) * m - I * p.g_ma * a - I * p.g_mb * m * q + d.m;
    let dq = p.omega_b * pm;
    let dp = -p.omega_b * q - p.g_mb * m.norm_sqr() - p.gamma_b * pm;
    let norm = (da.norm_sqr() + dm.norm_sqr() + dq * dq + dp * dp).sqrt();
    norm / if d.scale > 0.0 { d.scale } else { 1.0 }
}
