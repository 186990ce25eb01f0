//! Flat `key = value` configuration files.
//!
//! Frequencies are given as ordinary frequencies in Hz and converted to
//! angular frequencies here; detunings are given in units of ω_b.
//!
//! ```text
//! # reference operating point
//! omega_a_hz = 10e9
//! omega_b_hz = 10e6
//! ...
//! sweep.delta_a = -2:2:101
//! ```

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;

use crate::params::{DetuningMode, PhysicalParams};
use crate::sweep::{Axis, AxisSpec, PumpMode, SweepSpec};

const REQUIRED: [&str; 12] = [
    "omega_a_hz",
    "omega_b_hz",
    "kappa_a_hz",
    "kappa_m_hz",
    "gamma_b_hz",
    "g_ma_hz",
    "g_mb_hz",
    "P_a_w",
    "P_m_w",
    "T_k",
    "delta_a_over_omega_b",
    "delta_m_tilde_over_omega_b",
];

const OPTIONAL: [&str; 4] = ["theta_a_rad", "theta_m_rad", "pump_mode", "detuning_mode"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// All problems found in one config document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub Vec<Diagnostic>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

fn parse_number(s: &str) -> Option<f64> {
    let ok = !s.is_empty()
        && s.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'));
    if !ok {
        return None;
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn parse_range(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err(format!("malformed range `{s}` (expected start:stop:count)"));
    };
    let start = parse_number(start).ok_or_else(|| format!("malformed range start `{start}`"))?;
    let stop = parse_number(stop).ok_or_else(|| format!("malformed range stop `{stop}`"))?;
    let count: usize = count
        .parse()
        .ok()
        .filter(|&c| c >= 1)
        .ok_or_else(|| format!("malformed range count `{count}` (expected integer >= 1)"))?;
    if start > stop {
        return Err(format!("range start {start} exceeds stop {stop}"));
    }
    Ok((start, stop, count))
}

/// Parses a config document into the base parameters and the sweep spec.
pub fn parse_config(text: &str) -> Result<(PhysicalParams, SweepSpec), ConfigError> {
    let mut errors = Vec::new();
    let mut values: HashMap<&str, (usize, &str)> = HashMap::new();
    let mut axes: Vec<(usize, AxisSpec)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut err = |message: String| errors.push(Diagnostic { line: Some(line_no), message });
        let Some((key, value)) = line.split_once('=') else {
            err(format!("expected `key = value`, got `{line}`"));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());

        if let Some(axis_name) = key.strip_prefix("sweep.") {
            let Some(axis) = Axis::from_name(axis_name) else {
                err(format!("unknown sweep axis `{axis_name}`"));
                continue;
            };
            if axes.iter().any(|(_, a)| a.axis == axis) {
                err(format!("duplicate sweep axis `{axis_name}`"));
                continue;
            }
            match parse_range(value) {
                Ok((start, stop, count)) => axes.push((line_no, AxisSpec::new(axis, start, stop, count))),
                Err(m) => err(m),
            }
            continue;
        }
        if !REQUIRED.contains(&key) && !OPTIONAL.contains(&key) {
            err(format!("unknown key `{key}`"));
            continue;
        }
        if let Some((prev, _)) = values.get(key) {
            err(format!("duplicate key `{key}` (first set on line {prev})"));
            continue;
        }
        values.insert(key, (line_no, value));
    }

    let missing: Vec<&str> = REQUIRED.iter().copied().filter(|k| !values.contains_key(k)).collect();
    if !missing.is_empty() {
        errors.push(Diagnostic {
            line: None,
            message: format!("missing required keys: {}", missing.join(", ")),
        });
    }
    if axes.len() > 2 {
        errors.push(Diagnostic {
            line: Some(axes[2].0),
            message: "at most 2 sweep axes are supported".into(),
        });
    }

    let mut number = |key: &str, default: Option<f64>| -> f64 {
        match values.get(key) {
            Some(&(line, v)) => parse_number(v).unwrap_or_else(|| {
                errors.push(Diagnostic { line: Some(line), message: format!("malformed number `{v}` for `{key}`") });
                f64::NAN
            }),
            None => default.unwrap_or(f64::NAN),
        }
    };

    let omega_b = TAU * number("omega_b_hz", None);
    let mut p = PhysicalParams {
        omega_a: TAU * number("omega_a_hz", None),
        omega_b,
        kappa_a: TAU * number("kappa_a_hz", None),
        kappa_m: TAU * number("kappa_m_hz", None),
        gamma_b: TAU * number("gamma_b_hz", None),
        g_ma: TAU * number("g_ma_hz", None),
        g_mb: TAU * number("g_mb_hz", None),
        p_a: number("P_a_w", None),
        p_m: number("P_m_w", None),
        theta_a: number("theta_a_rad", Some(0.0)),
        theta_m: number("theta_m_rad", Some(0.0)),
        delta_a: number("delta_a_over_omega_b", None) * omega_b,
        delta_m_tilde_target: number("delta_m_tilde_over_omega_b", None) * omega_b,
        detuning_mode: DetuningMode::Effective,
        temperature: number("T_k", None),
    };

    let mut pump_mode = PumpMode::Both;
    if let Some(&(line, v)) = values.get("pump_mode") {
        match v.parse() {
            Ok(m) => pump_mode = m,
            Err(m) => errors.push(Diagnostic { line: Some(line), message: m }),
        }
    }
    if let Some(&(line, v)) = values.get("detuning_mode") {
        match v {
            "effective" => p.detuning_mode = DetuningMode::Effective,
            "bare" => p.detuning_mode = DetuningMode::Bare,
            _ => errors.push(Diagnostic {
                line: Some(line),
                message: format!("unknown detuning mode `{v}` (expected effective or bare)"),
            }),
        }
    }

    if errors.is_empty() {
        if let Err(crate::error::Error::InvalidParams(violations)) = p.validate() {
            for v in violations {
                errors.push(Diagnostic { line: None, message: format!("invalid parameter: {v}") });
            }
        }
    }
    if !errors.is_empty() {
        errors.sort_by_key(|d| d.line.unwrap_or(usize::MAX));
        return Err(ConfigError(errors));
    }
    let spec = SweepSpec { base: p, axes: axes.into_iter().map(|(_, a)| a).collect(), pump_mode };
    Ok((p, spec))
}
