//! Subcommand bodies and output formatting for the `magnomech` binary.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::config::{parse_config, ConfigError};
use crate::error::Error;
use crate::params::PhysicalParams;
use crate::sweep::{self, RowStatus, SweepRow, SweepSpec};

pub const CSV_HEADER: &str =
    "axis1,axis2,stable,margin,R_min,R_a,R_m,R_b,EN_am,EN_ab,EN_mb,EN_a_mb,EN_m_ab,EN_b_am,abs_ms_sq,q_s";

pub const DEFAULT_PHASE_RESOLUTION: usize = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error:\n{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Runtime(#[from] Error),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::Io { .. } => 1,
        }
    }
}

/// Formats `x` with 9 significant digits in the style of C's `%.9g`.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fmt_complex(z: nalgebra::Complex<f64>) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{} {sign} {}i", fmt_sig(z.re), fmt_sig(z.im.abs()))
}

pub fn csv_row(row: &SweepRow) -> String {
    let fields: Vec<String> = [row.axis_values[0], row.axis_values[1]]
        .into_iter()
        .map(fmt_sig)
        .chain(std::iter::once(row.stable().to_string()))
        .chain(
            [row.margin, row.r_min]
                .into_iter()
                .chain(row.residuals)
                .chain(row.en_pairs)
                .chain(row.en_splits)
                .chain([row.abs_ms_sq, row.q_s])
                .map(fmt_sig),
        )
        .collect();
    fields.join(",")
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&csv_row(row));
        out.push('\n');
    }
    out
}

fn load(config_text: &str) -> Result<(PhysicalParams, SweepSpec), CliError> {
    Ok(parse_config(config_text)?)
}

/// Human-readable report of the full pipeline at the configured point.
pub fn cmd_steady(config_text: &str) -> Result<String, CliError> {
    let (params, spec) = load(config_text)?;
    let ev = sweep::evaluate(&params, spec.pump_mode)?;
    let p = &ev.params;
    let s = &ev.state;
    let wb = p.omega_b;

    let mut out = String::new();
    let mut line = |k: &str, v: String| writeln!(out, "{k:<22} {v}").expect("write to string");
    line("pump_mode", spec.pump_mode.to_string());
    line("delta_a/omega_b", fmt_sig(p.delta_a / wb));
    line("delta_theta", fmt_sig(p.delta_theta()));
    line("T", fmt_sig(p.temperature));
    line("alpha_s", fmt_complex(s.alpha_s));
    line("m_s", fmt_complex(s.m_s));
    line("abs_ms_sq", fmt_sig(s.magnon_population()));
    line("q_s", fmt_sig(s.q_s));
    line("p_s", fmt_sig(s.p_s));
    line("delta_m/omega_b", fmt_sig(s.delta_m / wb));
    line("delta_m_tilde/omega_b", fmt_sig(s.delta_m_tilde / wb));
    line("mean_field_roots", s.root_count.to_string());
    line("abs_G_mb/omega_b", fmt_sig(ev.model.g_mb_eff.norm() / wb));
    line("stable", ev.stability.stable.to_string());
    line("margin", fmt_sig(ev.stability.margin));
    match &ev.report {
        Some(r) => {
            for (name, v) in ["EN_am", "EN_ab", "EN_mb"].iter().zip(r.en_pairs) {
                line(name, fmt_sig(v));
            }
            for (name, v) in ["EN_a_mb", "EN_m_ab", "EN_b_am"].iter().zip(r.en_splits) {
                line(name, fmt_sig(v));
            }
            for (name, v) in ["R_a", "R_m", "R_b"].iter().zip(r.residuals) {
                line(name, fmt_sig(v));
            }
            line("R_min", fmt_sig(r.r_min));
        }
        None => {
            line("R_min", fmt_sig(f64::NAN));
            line(
                "note",
                "drift matrix has an eigenvalue with non-negative real part; \
                 the fluctuations have no steady state, so entanglement is undefined"
                    .into(),
            );
        }
    }
    Ok(out)
}

/// Runs the configured grid and returns the CSV text.
pub fn sweep_csv(config_text: &str, threads: Option<usize>) -> Result<String, CliError> {
    let (_, spec) = load(config_text)?;
    if spec.axes.is_empty() || spec.axes.len() > 2 {
        return Err(ConfigError(vec![crate::config::Diagnostic {
            line: None,
            message: format!("sweep needs 1 or 2 `sweep.<axis>` entries, found {}", spec.axes.len()),
        }])
        .into());
    }
    let rows = match threads {
        Some(n) => sweep::run_sweep_with_threads(&spec, n)?,
        None => sweep::run_sweep(&spec)?,
    };
    Ok(render_csv(&rows))
}

/// Runs the configured grid and writes the CSV to `out_path`.
pub fn cmd_sweep(config_text: &str, out_path: &Path, threads: Option<usize>) -> Result<usize, CliError> {
    let csv = sweep_csv(config_text, threads)?;
    let io_err = |source| CliError::Io { path: out_path.display().to_string(), source };
    let mut f = std::fs::File::create(out_path).map_err(io_err)?;
    f.write_all(csv.as_bytes()).map_err(io_err)?;
    Ok(csv.lines().count() - 1)
}

/// Phase optimization report: Δθ*, R_min* and the Δθ = 0 baseline.
pub fn cmd_phase_opt(config_text: &str, resolution: usize) -> Result<String, CliError> {
    let (params, spec) = load(config_text)?;
    let effective = spec.pump_mode.apply(params);
    let opt = sweep::optimize_phase(&params, spec.pump_mode, resolution)?;
    let baseline = sweep::evaluate_point(&params.with_delta_theta(0.0), spec.pump_mode);

    let mut out = String::new();
    writeln!(out, "{:<22} {}", "pump_mode", spec.pump_mode).expect("write to string");
    writeln!(out, "{:<22} {}", "delta_theta_opt", fmt_sig(opt.delta_theta)).expect("write to string");
    writeln!(out, "{:<22} {}", "R_min_opt", fmt_sig(opt.r_min)).expect("write to string");
    let base = match baseline.status {
        RowStatus::Stable => fmt_sig(baseline.r_min),
        RowStatus::Unstable => "unstable".into(),
        RowStatus::Failed(ref m) => format!("failed ({m})"),
    };
    writeln!(out, "{:<22} {base}", "R_min_at_zero").expect("write to string");
    if effective.p_a == 0.0 || effective.p_m == 0.0 {
        out.push_str("note: with a single drive R_min does not depend on the phase difference\n");
    }
    Ok(out)
}

/// Runs `f` on a pool of `threads` workers, or on the global pool if `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CliError::Runtime(Error::Argument(format!("thread pool: {e}"))))?;
            Ok(pool.install(f))
        }
    }
}

pub fn read_config(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}
