//! Full-pipeline evaluation over parameter grids, plus the phase optimizer.
//!
//! Every grid point is an independent pure evaluation, so rows can be
//! computed on any number of threads and still come out bit-identical and in
//! row-major order.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dynamics::{self, CovarianceMatrix, LinearModel, Stability};
use crate::entanglement::EntanglementReport;
use crate::error::{Error, Result};
use crate::meanfield::{self, MeanFieldState};
use crate::params::PhysicalParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PumpMode {
    #[default]
    Both,
    MagnonOnly,
    CavityOnly,
}

impl PumpMode {
    pub fn apply(self, mut p: PhysicalParams) -> PhysicalParams {
        match self {
            PumpMode::Both => {}
            PumpMode::MagnonOnly => p.p_a = 0.0,
            PumpMode::CavityOnly => p.p_m = 0.0,
        }
        p
    }
}

impl FromStr for PumpMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "both" => Ok(PumpMode::Both),
            "magnon-only" => Ok(PumpMode::MagnonOnly),
            "cavity-only" => Ok(PumpMode::CavityOnly),
            _ => Err(format!("unknown pump mode `{s}` (expected both, magnon-only or cavity-only)")),
        }
    }
}

impl fmt::Display for PumpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PumpMode::Both => "both",
            PumpMode::MagnonOnly => "magnon-only",
            PumpMode::CavityOnly => "cavity-only",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Cavity detuning in units of ω_b.
    DeltaA,
    /// Phase difference θ_a − θ_m [rad].
    DeltaTheta,
    /// Bath temperature [K].
    Temperature,
    /// Cavity drive power [W].
    PowerA,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::DeltaA => "delta_a",
            Axis::DeltaTheta => "delta_theta",
            Axis::Temperature => "T",
            Axis::PowerA => "P_a",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [Axis::DeltaA, Axis::DeltaTheta, Axis::Temperature, Axis::PowerA]
            .into_iter()
            .find(|a| a.name() == s)
    }

    pub fn apply(self, mut p: PhysicalParams, value: f64) -> PhysicalParams {
        match self {
            Axis::DeltaA => p.delta_a = value * p.omega_b,
            Axis::DeltaTheta => p = p.with_delta_theta(value),
            Axis::Temperature => p.temperature = value,
            Axis::PowerA => p.p_a = value,
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(axis: Axis, start: f64, stop: f64, count: usize) -> Self {
        Self { axis, start, stop, count }
    }

    /// Evenly spaced values with both end points included.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + span * k as f64 / last })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: PhysicalParams,
    pub axes: Vec<AxisSpec>,
    pub pump_mode: PumpMode,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.len() > 2 {
            return Err(Error::Argument(format!("at most 2 sweep axes, got {}", self.axes.len())));
        }
        for a in &self.axes {
            if a.count < 1 || !(a.start <= a.stop) {
                return Err(Error::Argument(format!(
                    "axis {} needs count >= 1 and start <= stop",
                    a.axis.name()
                )));
            }
        }
        if self.axes.len() == 2 && self.axes[0].axis == self.axes[1].axis {
            return Err(Error::Argument(format!("duplicate axis {}", self.axes[0].axis.name())));
        }
        self.base.validate()?;
        Ok(())
    }

    /// Parameter sets and axis values in row-major order (first axis outer).
    pub fn grid(&self) -> Vec<([f64; 2], PhysicalParams)> {
        let mut points = vec![([f64::NAN; 2], self.base)];
        for (slot, axis) in self.axes.iter().enumerate() {
            let values = axis.values();
            points = points
                .into_iter()
                .flat_map(|(coords, p)| {
                    values.iter().map(move |&x| {
                        let mut c = coords;
                        c[slot] = x;
                        (c, axis.axis.apply(p, x))
                    })
                })
                .collect();
        }
        points
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Stable,
    Unstable,
    Failed(String),
}

/// One evaluated grid point. Entanglement fields are NaN unless stable.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_values: [f64; 2],
    pub status: RowStatus,
    pub margin: f64,
    pub r_min: f64,
    pub residuals: [f64; 3],
    pub en_pairs: [f64; 3],
    pub en_splits: [f64; 3],
    pub abs_ms_sq: f64,
    pub q_s: f64,
}

impl SweepRow {
    pub fn stable(&self) -> bool {
        self.status == RowStatus::Stable
    }

    fn empty(status: RowStatus) -> Self {
        Self {
            axis_values: [f64::NAN; 2],
            status,
            margin: f64::NAN,
            r_min: f64::NAN,
            residuals: [f64::NAN; 3],
            en_pairs: [f64::NAN; 3],
            en_splits: [f64::NAN; 3],
            abs_ms_sq: f64::NAN,
            q_s: f64::NAN,
        }
    }
}

/// Every intermediate of one pipeline run.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub params: PhysicalParams,
    pub state: MeanFieldState,
    pub model: LinearModel,
    pub stability: Stability,
    pub covariance: Option<CovarianceMatrix>,
    pub report: Option<EntanglementReport>,
}

/// Mean field → drift/diffusion → stability → Lyapunov → entanglement.
pub fn evaluate(params: &PhysicalParams, pump_mode: PumpMode) -> Result<Evaluation> {
    let params = pump_mode.apply(*params).validate()?;
    let state = meanfield::solve_steady_state(&params)?;
    let model = LinearModel::new(&params, &state)?;
    let stability = dynamics::is_stable(&model.drift, dynamics::stability_tolerance(&params))?;
    let (covariance, report) = if stability.stable {
        let v = dynamics::solve_lyapunov(&model.drift, &model.diffusion)?;
        let r = EntanglementReport::compute(&v, true)?;
        (Some(v), Some(r))
    } else {
        (None, None)
    };
    Ok(Evaluation { params, state, model, stability, covariance, report })
}

pub fn evaluate_point(params: &PhysicalParams, pump_mode: PumpMode) -> SweepRow {
    match evaluate(params, pump_mode) {
        Err(e) => SweepRow::empty(RowStatus::Failed(e.to_string())),
        Ok(ev) => {
            let mut row = SweepRow::empty(if ev.stability.stable {
                RowStatus::Stable
            } else {
                RowStatus::Unstable
            });
            row.margin = ev.stability.margin;
            row.abs_ms_sq = ev.state.magnon_population();
            row.q_s = ev.state.q_s;
            if let Some(r) = ev.report {
                row.r_min = r.r_min;
                row.residuals = r.residuals;
                row.en_pairs = r.en_pairs;
                row.en_splits = r.en_splits;
            }
            row
        }
    }
}

/// Evaluates the grid on the ambient rayon pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let grid = spec.grid();
    Ok(grid
        .par_iter()
        .map(|(coords, p)| {
            let mut row = evaluate_point(p, spec.pump_mode);
            row.axis_values = *coords;
            row
        })
        .collect())
}

/// Evaluates the grid on a dedicated pool with `threads` workers.
pub fn run_sweep_with_threads(spec: &SweepSpec, threads: usize) -> Result<Vec<SweepRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
    pool.install(|| run_sweep(spec))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseOptimum {
    pub delta_theta: f64,
    pub r_min: f64,
}

/// Golden-section refinement stops once the bracket is narrower than this [rad].
pub const PHASE_TOLERANCE: f64 = 1e-6;

fn phase_objective(params: &PhysicalParams, pump_mode: PumpMode, delta_theta: f64) -> Option<f64> {
    let row = evaluate_point(&params.with_delta_theta(delta_theta), pump_mode);
    row.stable().then_some(row.r_min)
}

/// Maximizes R_min over Δθ ∈ [0, 2π).
pub fn optimize_phase(params: &PhysicalParams, pump_mode: PumpMode, resolution: usize) -> Result<PhaseOptimum> {
    optimize_phase_from(params, pump_mode, resolution, 0.0)
}

/// Maximizes R_min over Δθ ∈ [start, start + 2π): a coarse grid of
/// `resolution` points, then golden-section search inside the bracket around
/// the best grid point. Exact ties go to the smallest Δθ.
pub fn optimize_phase_from(
    params: &PhysicalParams,
    pump_mode: PumpMode,
    resolution: usize,
    start: f64,
) -> Result<PhaseOptimum> {
    if resolution < 8 {
        return Err(Error::Argument(format!("phase resolution must be >= 8, got {resolution}")));
    }
    let step = TAU / resolution as f64;
    let grid: Vec<f64> = (0..resolution).map(|k| start + step * k as f64).collect();
    let values: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&x| phase_objective(params, pump_mode, x))
        .collect();

    let mut best: Option<(usize, f64)> = None;
    for (k, v) in values.iter().enumerate() {
        if let Some(v) = *v {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((k, v));
            }
        }
    }
    let (k, grid_best) = best.ok_or(Error::NoStablePoint)?;

    let f = |x: f64| phase_objective(params, pump_mode, x).unwrap_or(f64::NEG_INFINITY);
    let (x, fx) = golden_section_max(f, grid[k] - step, grid[k] + step, PHASE_TOLERANCE);
    if fx > grid_best {
        let wrapped = start + (x - start).rem_euclid(TAU);
        Ok(PhaseOptimum { delta_theta: wrapped, r_min: fx })
    } else {
        Ok(PhaseOptimum { delta_theta: grid[k], r_min: grid_best })
    }
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
