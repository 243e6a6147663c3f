//! Conserved and almost-conserved functionals, Sobolev and weighted norms,
//! space-time norms and inequality audits.

mod audit;
mod spacetime;
mod trace;

use log::warn;

use crate::error::{invalid, Error, Result};
use crate::radial_spectral::{dst_forward, l2_norm_sq, lebesgue_integral, weighted_l2, RadialField};
use crate::transforms::vector_field_norm_sq;

pub use audit::{criticality, inequality_audit, AuditInput, AuditReport, Criticality};
pub use spacetime::{
    local_smoothing_functional, lorentz_time_norm, strichartz_norm, weighted_strichartz_norm, xs_proxy,
    LocalSmoothing, LorentzNorm, SpatialNorm,
};
pub use trace::{EnergyRecord, EnergySummary, EnergyTrace, HistoryAccumulator, SpaceTimeTrace, ColumnSummary};

/// `M(u) = int |u|^2`.
pub fn mass(field: &RadialField) -> f64 {
    l2_norm_sq(field)
}

/// `int |grad u|^2 = 4 pi dr sum k^2 |ghat|^2`.
pub fn gradient_sq(field: &RadialField) -> f64 {
    dst_forward(field).weighted_energy(1.0)
}

fn check_power(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 0.0) {
        return Err(invalid("p", format!("nonlinearity power must be positive, got {p}")));
    }
    Ok(())
}

/// `E(u) = 1/4 int |grad u|^2 + 1/(p+2) int |u|^{p+2}`.
pub fn energy(field: &RadialField, p: f64) -> Result<f64> {
    check_power(p)?;
    Ok(0.25 * gradient_sq(field) + lebesgue_integral(field, p + 2.0) / (p + 2.0))
}

/// `P(u(t)) = ||(x + it grad)u||^2 + 4t^2/(p+2) int |u|^{p+2}
///            + 2(3p - 4)/(p+2) int_{t0}^t s int |u|^{p+2} ds`,
///
/// the form conserved by `i u_t + (1/2) Δu = |u|^p u` (with `Δ` in place of
/// `(1/2) Δ` the constants double). `history` must already hold the sample at `t`.
pub fn pseudo_conformal_p(field: &RadialField, t: f64, p: f64, history: &HistoryAccumulator) -> Result<f64> {
    check_power(p)?;
    let integral = history.integral_to(t)?;
    let potential = lebesgue_integral(field, p + 2.0);
    Ok(vector_field_norm_sq(field, t)
        + 4.0 * t * t / (p + 2.0) * potential
        + 2.0 * (3.0 * p - 4.0) / (p + 2.0) * integral)
}

/// `calE(t) = 1/4 t^{1/2} int |grad W|^2 + 1/3 int |W|^3`.
pub fn modified_energy(w: &RadialField, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("modified energy needs t > 0, got {t}")));
    }
    Ok(0.25 * t.sqrt() * gradient_sq(w) + lebesgue_integral(w, 3.0) / 3.0)
}

fn check_band(s: f64) {
    if !(-1.0..=2.0).contains(&s) {
        warn!("regularity s = {s} outside the resolvable band [-1, 2]");
    }
}

/// `|| |grad|^s f ||_{L^2}`.
pub fn sobolev_norm(field: &RadialField, s: f64) -> f64 {
    check_band(s);
    dst_forward(field).weighted_energy(s).sqrt()
}

/// `|| |x|^s f ||_{L^2}`.
pub fn weighted_norm(field: &RadialField, s: f64) -> f64 {
    check_band(s);
    weighted_l2(field, s)
}

/// Rejects a trace that cannot be evaluated.
pub(crate) fn nonempty<T>(items: &[T]) -> Result<()> {
    if items.is_empty() {
        Err(Error::EmptyWindow)
    } else {
        Ok(())
    }
}
