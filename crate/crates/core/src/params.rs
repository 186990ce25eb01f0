//! Physical parameter model.
//!
//! Every rate and frequency is stored as an angular frequency in rad/s, powers
//! in W, phases in rad and temperature in K. Conversion from the ordinary
//! frequencies used in config files happens once, in [`crate::config`].

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::error::{Error, Result, Violation};

/// Reduced Planck constant, CODATA 2018 [J s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, CODATA 2018 (exact) [J/K].
pub const K_B: f64 = 1.380_649e-23;

/// How the magnon detuning input is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetuningMode {
    /// The input is the effective detuning including the magnomechanical
    /// frequency pull; the bare detuning is back-solved.
    #[default]
    Effective,
    /// The input is the bare magnon-drive detuning; the effective detuning
    /// follows from the self-consistent cubic.
    Bare,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Cavity angular frequency.
    pub omega_a: f64,
    /// Mechanical angular frequency.
    pub omega_b: f64,
    pub kappa_a: f64,
    pub kappa_m: f64,
    pub gamma_b: f64,
    /// Magnon-photon coupling.
    pub g_ma: f64,
    /// Single-magnon magnomechanical coupling.
    pub g_mb: f64,
    pub p_a: f64,
    pub p_m: f64,
    pub theta_a: f64,
    pub theta_m: f64,
    /// Cavity-drive detuning.
    pub delta_a: f64,
    /// Magnon detuning input. Effective detuning in [`DetuningMode::Effective`]
    /// (the default), bare detuning in [`DetuningMode::Bare`].
    pub delta_m_tilde_target: f64,
    pub detuning_mode: DetuningMode,
    pub temperature: f64,
}

/// Mean thermal excitation numbers of the three baths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseOccupations {
    pub n_a: f64,
    pub n_m: f64,
    pub n_b: f64,
}

impl PhysicalParams {
    /// The reference operating point used throughout the test suite and the
    /// shipped configs: 10 GHz cavity, 10 MHz mechanics, 1 MHz cavity and
    /// magnon linewidths, 100 Hz mechanical damping, 1 MHz magnon-photon
    /// coupling, 0.3 Hz single-magnon magnomechanical coupling, 9 mW on the
    /// cavity, 0.9 W on the magnon, 10 mK, with cavity detuning 1.35 ω_b,
    /// effective magnon detuning 0.9 ω_b and phase difference π/2.
    pub fn reference() -> Self {
        let omega_b = TAU * 10e6;
        Self {
            omega_a: TAU * 10e9,
            omega_b,
            kappa_a: TAU * 1e6,
            kappa_m: TAU * 1e6,
            gamma_b: TAU * 100.0,
            g_ma: TAU * 1e6,
            g_mb: TAU * 0.3,
            p_a: 9e-3,
            p_m: 0.9,
            theta_a: FRAC_PI_2,
            theta_m: 0.0,
            delta_a: 1.35 * omega_b,
            delta_m_tilde_target: 0.9 * omega_b,
            detuning_mode: DetuningMode::Effective,
            temperature: 0.01,
        }
    }

    /// Drive angular frequency ω_d = ω_a − Δ_a.
    pub fn omega_drive(&self) -> f64 {
        self.omega_a - self.delta_a
    }

    /// Phase difference θ_a − θ_m.
    pub fn delta_theta(&self) -> f64 {
        self.theta_a - self.theta_m
    }

    /// Sets θ_a so that θ_a − θ_m equals `delta_theta`, keeping θ_m.
    pub fn with_delta_theta(mut self, delta_theta: f64) -> Self {
        self.theta_a = self.theta_m + delta_theta;
        self
    }

    pub fn epsilon_a(&self) -> Result<f64> {
        drive_amplitude(self.kappa_a, self.p_a, self.omega_drive())
    }

    pub fn epsilon_m(&self) -> Result<f64> {
        drive_amplitude(self.kappa_m, self.p_m, self.omega_drive())
    }

    /// Thermal occupations of the cavity, magnon and mechanical baths.
    ///
    /// The magnon bath is evaluated at ω_m = Δ̃_m + ω_d. At millikelvin
    /// temperatures and GHz frequencies both microwave occupations vanish, so
    /// the exact choice only matters well above 50 mK.
    pub fn occupations(&self, delta_m_tilde: f64) -> Result<NoiseOccupations> {
        Ok(NoiseOccupations {
            n_a: thermal_occupation(self.omega_a, self.temperature)?,
            n_m: thermal_occupation(delta_m_tilde + self.omega_drive(), self.temperature)?,
            n_b: thermal_occupation(self.omega_b, self.temperature)?,
        })
    }

    /// Checks every invariant and returns all violations at once.
    pub fn validate(self) -> Result<Self> {
        let mut v = Vec::new();
        let mut check = |field: &'static str, value: f64, ok: bool, requirement: &'static str| {
            if !ok {
                v.push(Violation { field, value, requirement });
            }
        };
        let pos = "finite and > 0";
        let nonneg = "finite and >= 0";
        let fin = "finite";
        check("omega_a", self.omega_a, self.omega_a.is_finite() && self.omega_a > 0.0, pos);
        check("omega_b", self.omega_b, self.omega_b.is_finite() && self.omega_b > 0.0, pos);
        check("kappa_a", self.kappa_a, self.kappa_a.is_finite() && self.kappa_a > 0.0, pos);
        check("kappa_m", self.kappa_m, self.kappa_m.is_finite() && self.kappa_m > 0.0, pos);
        check("gamma_b", self.gamma_b, self.gamma_b.is_finite() && self.gamma_b > 0.0, pos);
        check("g_ma", self.g_ma, self.g_ma.is_finite() && self.g_ma >= 0.0, nonneg);
        check("g_mb", self.g_mb, self.g_mb.is_finite() && self.g_mb >= 0.0, nonneg);
        check("P_a", self.p_a, self.p_a.is_finite() && self.p_a >= 0.0, nonneg);
        check("P_m", self.p_m, self.p_m.is_finite() && self.p_m >= 0.0, nonneg);
        check("T", self.temperature, self.temperature.is_finite() && self.temperature >= 0.0, nonneg);
        check("theta_a", self.theta_a, self.theta_a.is_finite(), fin);
        check("theta_m", self.theta_m, self.theta_m.is_finite(), fin);
        check("delta_a", self.delta_a, self.delta_a.is_finite(), fin);
        check(
            "delta_m_tilde_target",
            self.delta_m_tilde_target,
            self.delta_m_tilde_target.is_finite(),
            fin,
        );
        if v.is_empty() && self.omega_drive() <= 0.0 {
            v.push(Violation {
                field: "delta_a",
                value: self.delta_a,
                requirement: "smaller than omega_a (positive drive frequency)",
            });
        }
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(v))
        }
    }
}

/// Bose-Einstein occupation `1 / (exp(ħω / k_B T) − 1)`; exactly 0 at T = 0.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("angular frequency must be > 0, got {omega}")));
    }
    if !(temperature >= 0.0) {
        return Err(Error::Domain(format!("temperature must be >= 0, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (K_B * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Drive amplitude `sqrt(2 κ P / ħ ω_d)` in s⁻¹.
pub fn drive_amplitude(kappa: f64, power: f64, omega_d: f64) -> Result<f64> {
    if !(omega_d > 0.0) {
        return Err(Error::Domain(format!("drive frequency must be > 0, got {omega_d}")));
    }
    if !(kappa > 0.0) || !(power >= 0.0) {
        return Err(Error::Domain(format!(
            "need kappa > 0 and P >= 0, got kappa = {kappa}, P = {power}"
        )));
    }
    Ok((2.0 * kappa * power / (HBAR * omega_d)).sqrt())
}
