//! Strang split-step integration of `i u_t + (1/2) Δu = |u|^p u` and of
//! `i U_t + (1/2) ΔU = t^{-1/2} |U| U`, forward or backward in time.
//!
//! Each step is half a linear step (the multiplier `e^{-i k^2 dt/4}`), the
//! exact nonlinear phase rotation, and another half linear step. The
//! nonlinear flow keeps `|u|` fixed, so its phase is exact:
//! `e^{-i |u|^p dt}` for the autonomous equation and
//! `e^{-2 i |U| (sqrt(t + dt) - sqrt(t))}` for the nonautonomous one.

mod increment;
mod picard;
mod pipeline;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::norms::{energy, mass, pseudo_conformal_p, EnergyRecord, EnergyTrace, HistoryAccumulator, SpaceTimeTrace};
use crate::radial_spectral::{dst::dst1, lebesgue_integral, Interpolation, RadialField, RadialGrid};

pub use increment::{energy_increment_check, IncrementReport, IncrementSample};
pub use picard::{picard_lwp, PicardConfig, PicardOutcome, PicardReport};
pub use pipeline::{
    linear_high_part, run_high_low_pipeline, PipelineFlags, PipelineReport, PipelineRun, PipelineSnapshot, Segment,
    StepScalars,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Splitting {
    #[default]
    Strang,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StepSchedule {
    #[default]
    Uniform,
    /// `|dt| = min(dt, ratio * t)` for the nonautonomous equation.
    Geometric { ratio: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Equation {
    /// `i u_t + (1/2) Δu = |u|^p u`
    Autonomous { p: f64 },
    /// `i U_t + (1/2) ΔU = t^{-1/2} |U| U`
    PseudoConformal,
}

impl Default for Equation {
    fn default() -> Self {
        Equation::Autonomous { p: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub grid: RadialGrid,
    /// Step size magnitude; the sign comes from the integration direction.
    pub dt: f64,
    pub splitting: Splitting,
    pub direction: Direction,
    /// Keep every `stride`-th step in the traces (the last step is always kept).
    pub stride: usize,
    pub boundary_tol: f64,
    pub seed: u64,
    pub schedule: StepSchedule,
    pub interpolation: Interpolation,
    /// Test hook: with `false` the nonlinear substep is skipped.
    #[serde(skip)]
    pub nonlinear: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid: RadialGrid::desk(),
            dt: 1e-3,
            splitting: Splitting::Strang,
            direction: Direction::Forward,
            stride: 1,
            boundary_tol: 1e-6,
            seed: 0,
            schedule: StepSchedule::Uniform,
            interpolation: Interpolation::Cubic,
            nonlinear: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        RadialGrid::new(self.grid.radius(), self.grid.intervals())?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if self.stride == 0 {
            return Err(invalid("stride", "must be at least 1"));
        }
        if let StepSchedule::Geometric { ratio } = self.schedule {
            if !(ratio.is_finite() && ratio > 0.0) {
                return Err(invalid("schedule.ratio", format!("must be positive, got {ratio}")));
            }
        }
        Ok(())
    }
}

/// Applies one Strang step to `g` samples in place.
struct Stepper {
    equation: Equation,
    nonlinear: bool,
    grid: RadialGrid,
    cached_dt: f64,
    half: Vec<Complex64>,
}

impl Stepper {
    fn new(grid: RadialGrid, equation: Equation, nonlinear: bool) -> Self {
        Self {
            equation,
            nonlinear,
            grid,
            cached_dt: f64::NAN,
            half: Vec::new(),
        }
    }

    fn half_linear(&mut self, g: &mut [Complex64], dt: f64) {
        if dt != self.cached_dt {
            self.half = self
                .grid
                .wavenumbers()
                .map(|k| Complex64::from_polar(1.0, -0.25 * k * k * dt))
                .collect();
            self.cached_dt = dt;
        }
        let mut c = dst1(g);
        for (z, m) in c.iter_mut().zip(&self.half) {
            *z *= m;
        }
        g.copy_from_slice(&dst1(&c));
    }

    fn phase_factor(&self, t: f64, dt: f64) -> Result<f64> {
        match self.equation {
            Equation::Autonomous { .. } => Ok(dt),
            Equation::PseudoConformal => {
                let end = t + dt;
                if !(t > 0.0 && end > 0.0) {
                    return Err(Error::StepFailure {
                        t,
                        reason: format!("step to {end} leaves t > 0"),
                    });
                }
                // 2 (sqrt(t + dt) - sqrt(t)) without cancellation
                Ok(2.0 * dt / (end.sqrt() + t.sqrt()))
            }
        }
    }

    fn step(&mut self, g: &mut [Complex64], t: f64, dt: f64) -> Result<()> {
        let theta = self.phase_factor(t, dt)?;
        self.half_linear(g, dt);
        if self.nonlinear {
            let p = match self.equation {
                Equation::Autonomous { p } => p,
                Equation::PseudoConformal => 1.0,
            };
            for (z, r) in g.iter_mut().zip(self.grid.nodes()) {
                let amp = z.norm() / r;
                let amp_p = if p == 1.0 { amp } else { amp.powf(p) };
                *z *= Complex64::from_polar(1.0, -amp_p * theta);
            }
        }
        self.half_linear(g, dt);
        if let Some(i) = g.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::StepFailure {
                t,
                reason: format!("non-finite value at node {}", i + 1),
            });
        }
        Ok(())
    }
}

fn single_step(field: &RadialField, equation: Equation, t: f64, dt: f64, nonlinear: bool) -> Result<RadialField> {
    let mut stepper = Stepper::new(*field.grid(), equation, nonlinear);
    let mut g = field.samples().to_vec();
    stepper.step(&mut g, t, dt)?;
    RadialField::from_samples(*field.grid(), g)
}

/// One Strang step of `i u_t + (1/2) Δu = |u| u` with signed `dt`.
pub fn step_autonomous(field: &RadialField, dt: f64) -> Result<RadialField> {
    single_step(field, Equation::Autonomous { p: 1.0 }, 0.0, dt, true)
}

/// [`step_autonomous`] with the nonlinear substep switchable (test hook).
pub fn step_autonomous_with(field: &RadialField, dt: f64, nonlinear: bool) -> Result<RadialField> {
    single_step(field, Equation::Autonomous { p: 1.0 }, 0.0, dt, nonlinear)
}

/// One Strang step of `i U_t + (1/2) ΔU = t^{-1/2} |U| U` from `t` to `t + dt`.
pub fn step_nonautonomous(field: &RadialField, t: f64, dt: f64) -> Result<RadialField> {
    single_step(field, Equation::PseudoConformal, t, dt, true)
}

/// The sequence of step ends from `from` to `to`, landing exactly on `to`.
fn step_plan(config: &SolverConfig, equation: Equation, from: f64, to: f64) -> Vec<f64> {
    let sign = if to >= from { 1.0 } else { -1.0 };
    let mut ends = Vec::new();
    let mut t = from;
    // tolerance for treating a remaining sliver as the end point
    let eps = 1e-9 * config.dt;
    while (to - t) * sign > eps {
        let mut h = config.dt;
        if let (StepSchedule::Geometric { ratio }, Equation::PseudoConformal) = (config.schedule, equation) {
            h = h.min(ratio * t.abs());
        }
        let next = t + sign * h;
        t = if (to - next) * sign <= eps { to } else { next };
        ends.push(t);
    }
    ends
}

/// A stepped trajectory.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub space_time: SpaceTimeTrace,
    pub energy: EnergyTrace,
    pub final_field: RadialField,
    pub steps: usize,
    /// Largest `|g_{M-1}| / max|g|` seen along the run.
    pub max_boundary_ratio: f64,
}

impl Evolution {
    pub fn boundary_ok(&self, tol: f64) -> bool {
        self.max_boundary_ratio <= tol
    }
}

fn record(equation: Equation, field: &RadialField, t: f64, history: Option<&HistoryAccumulator>) -> Result<EnergyRecord> {
    let p = match equation {
        Equation::Autonomous { p } => p,
        Equation::PseudoConformal => 1.0,
    };
    let pc = match (equation, history) {
        (Equation::Autonomous { p }, Some(h)) => Some(pseudo_conformal_p(field, t, p, h)?),
        _ => None,
    };
    Ok(EnergyRecord {
        t,
        mass: mass(field),
        energy: energy(field, p)?,
        p: pc,
        ..Default::default()
    })
}

fn check_span(config: &SolverConfig, equation: Equation, t_span: (f64, f64)) -> Result<()> {
    config.validate()?;
    let (a, b) = t_span;
    if !(a.is_finite() && b.is_finite()) || a == b {
        return Err(invalid("t_span", format!("needs two distinct finite times, got [{a}, {b}]")));
    }
    let expected = if b > a { Direction::Forward } else { Direction::Backward };
    if config.direction != expected {
        return Err(invalid(
            "direction",
            format!("{:?} does not match the span [{a}, {b}]", config.direction),
        ));
    }
    if equation == Equation::PseudoConformal && (a <= 0.0 || b <= 0.0) {
        return Err(invalid("t_span", "the nonautonomous equation needs a span inside t > 0"));
    }
    Ok(())
}

/// Integrates from `t_span.0` to `t_span.1`, recording mass and energy (and
/// `P` with its history integral for the autonomous equation) at every kept
/// step.
pub fn evolve(config: &SolverConfig, equation: Equation, initial: &RadialField, t_span: (f64, f64)) -> Result<Evolution> {
    check_span(config, equation, t_span)?;
    if initial.grid() != &config.grid {
        return Err(Error::GridMismatch);
    }
    let (t0, t1) = t_span;
    let p = match equation {
        Equation::Autonomous { p } => p,
        Equation::PseudoConformal => 1.0,
    };
    let mut history = match equation {
        Equation::Autonomous { .. } => Some(HistoryAccumulator::new(t0)),
        Equation::PseudoConformal => None,
    };
    let mut stepper = Stepper::new(config.grid, equation, config.nonlinear);
    let mut g = initial.samples().to_vec();
    let mut field = initial.clone();
    let mut energy_trace = EnergyTrace::new();
    let mut snapshots = Vec::new();
    let mut max_boundary_ratio = field.boundary_ratio();

    if let Some(h) = history.as_mut() {
        h.push(t0, t0 * lebesgue_integral(&field, p + 2.0))?;
    }
    energy_trace.push(record(equation, &field, t0, history.as_ref())?)?;
    snapshots.push((t0, field.clone()));

    let plan = step_plan(config, equation, t0, t1);
    let mut t = t0;
    for (i, &next) in plan.iter().enumerate() {
        stepper.step(&mut g, t, next - t)?;
        t = next;
        field = RadialField::from_samples(config.grid, g.clone()).map_err(|e| Error::StepFailure {
            t,
            reason: e.to_string(),
        })?;
        max_boundary_ratio = max_boundary_ratio.max(field.boundary_ratio());
        if let Some(h) = history.as_mut() {
            h.push(t, t * lebesgue_integral(&field, p + 2.0))?;
        }
        if (i + 1) % config.stride == 0 || i + 1 == plan.len() {
            energy_trace.push(record(equation, &field, t, history.as_ref())?)?;
            snapshots.push((t, field.clone()));
        }
    }
    energy_trace.history = history;
    Ok(Evolution {
        space_time: SpaceTimeTrace::new(snapshots, config.stride)?,
        energy: energy_trace,
        final_field: field,
        steps: plan.len(),
        max_boundary_ratio,
    })
}

/// Integrates from `t_start` through `times` (monotone, all on one side of
/// `t_start`), returning the field exactly at each requested time.
pub fn evolve_to(
    config: &SolverConfig,
    equation: Equation,
    initial: &RadialField,
    t_start: f64,
    times: &[f64],
) -> Result<Vec<RadialField>> {
    config.validate()?;
    if initial.grid() != &config.grid {
        return Err(Error::GridMismatch);
    }
    let mut stepper = Stepper::new(config.grid, equation, config.nonlinear);
    let mut g = initial.samples().to_vec();
    let mut t = t_start;
    let mut out = Vec::with_capacity(times.len());
    let mut sign = 0.0;
    for &target in times {
        let s = (target - t).signum();
        if target != t && sign != 0.0 && s != sign {
            return Err(invalid("times", format!("{target} reverses the integration direction")));
        }
        if target != t {
            sign = s;
        }
        for next in step_plan(config, equation, t, target) {
            stepper.step(&mut g, t, next - t)?;
            t = next;
        }
        out.push(RadialField::from_samples(config.grid, g.clone())?);
    }
    Ok(out)
}
