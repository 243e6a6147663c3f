use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{nonempty, SpaceTimeTrace};
use crate::error::{invalid, Result};
use crate::lp_decomp::{full_band, shell_resolved, CutoffKind};
use crate::radial_spectral::{dst_forward, l2_norm_sq, lebesgue_norm, RadialField, FOUR_PI};

/// Spatial norm evaluated at each time of a trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpatialNorm {
    /// `L^r`, with `r = inf` for the sup norm.
    Lebesgue(f64),
}

impl SpatialNorm {
    fn eval(self, field: &RadialField) -> Result<f64> {
        match self {
            SpatialNorm::Lebesgue(r) => lebesgue_norm(field, r),
        }
    }
}

fn check_exponent(name: &'static str, q: f64) -> Result<()> {
    if q.is_nan() || q < 1.0 {
        return Err(invalid(name, format!("exponent must be >= 1, got {q}")));
    }
    Ok(())
}

/// `(int |h(t)|^q dt)^{1/q}` by the trapezoid rule; `sup |h|` for `q = inf`.
fn time_lq(times: &[f64], values: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        return values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    }
    if times.len() == 1 {
        return 0.0;
    }
    let integral: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].abs().powf(q) + v[1].abs().powf(q)))
        .sum();
    integral.powf(1.0 / q)
}

fn spatial_series(trace: &SpaceTimeTrace, r: f64) -> Result<Vec<f64>> {
    check_exponent("r", r)?;
    nonempty(trace.times())?;
    trace
        .fields()
        .par_iter()
        .map(|f| SpatialNorm::Lebesgue(r).eval(f))
        .collect()
}

/// `||u||_{L_t^q L_x^r}` over the trace window.
pub fn strichartz_norm(trace: &SpaceTimeTrace, q: f64, r: f64) -> Result<f64> {
    weighted_strichartz_norm(trace, q, r, |_| 1.0)
}

/// `||w(t) u||_{L_t^q L_x^r}` for a scalar time weight `w`.
pub fn weighted_strichartz_norm(trace: &SpaceTimeTrace, q: f64, r: f64, weight: impl Fn(f64) -> f64) -> Result<f64> {
    check_exponent("q", q)?;
    let series = spatial_series(trace, r)?;
    let weighted: Vec<f64> = trace.times().iter().zip(&series).map(|(&t, v)| weight(t) * v).collect();
    Ok(time_lq(trace.times(), &weighted, q))
}

/// Lorentz-in-time norm through the dyadic equivalent formula
/// `|| || ||u(t)||_{L^r} chi_j(t - origin) ||_{L_t^q} ||_{l_j^p}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzNorm {
    pub value: f64,
    /// Dyadic decomposition origin, the left endpoint of the window.
    pub origin: f64,
    /// `(j, ||F chi_j||_{L^q})` for every shell touching the window.
    pub shells: Vec<(i32, f64)>,
}

pub fn lorentz_time_norm(trace: &SpaceTimeTrace, q: f64, p: f64, r: f64) -> Result<LorentzNorm> {
    check_exponent("q", q)?;
    check_exponent("p", p)?;
    if q.is_infinite() {
        return Err(invalid("q", "Lorentz time exponent must be finite"));
    }
    let series = spatial_series(trace, r)?;
    let (origin, end) = trace.window()?;
    let times = trace.times();
    let span = end - origin;
    if span <= 0.0 {
        return Ok(LorentzNorm {
            value: 0.0,
            origin,
            shells: Vec::new(),
        });
    }
    let finest = times
        .iter()
        .map(|t| t - origin)
        .filter(|&tau| tau > 0.0)
        .fold(span, f64::min);
    let j_lo = finest.log2().floor() as i32 - 1;
    let j_hi = span.log2().ceil() as i32 + 1;
    let shells: Vec<(i32, f64)> = (j_lo..=j_hi)
        .map(|j| {
            let piece: Vec<f64> = times
                .iter()
                .zip(&series)
                .map(|(&t, v)| v * CutoffKind::Chi.eval(j, t - origin))
                .collect();
            (j, time_lq(times, &piece, q))
        })
        .collect();
    let value = if p.is_infinite() {
        shells.iter().map(|s| s.1).fold(0.0, f64::max)
    } else {
        shells.iter().map(|s| s.1.powf(p)).sum::<f64>().powf(1.0 / p)
    };
    Ok(LorentzNorm { value, origin, shells })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalSmoothing {
    pub value: f64,
    /// Shell attaining the sup.
    pub shell: i32,
    /// `(j, 2^{-j/2} ||chi_j |grad|^sigma u||_{L^2_{t,x}})` over resolved shells.
    pub per_shell: Vec<(i32, f64)>,
}

/// `sup_j 2^{-j/2} ||chi_j |grad|^sigma u||_{L^2_{t,x}}` over the shells the
/// grid resolves.
pub fn local_smoothing_functional(trace: &SpaceTimeTrace, sigma: f64) -> Result<LocalSmoothing> {
    nonempty(trace.times())?;
    let grid = *trace.fields()[0].grid();
    let lifted: Vec<RadialField> = trace
        .fields()
        .par_iter()
        .map(|f| {
            if sigma == 0.0 {
                Ok(f.clone())
            } else {
                f.apply_real_multiplier(|k| k.powf(sigma))
            }
        })
        .collect::<Result<_>>()?;
    let shells: Vec<i32> = (-40..40).filter(|&j| shell_resolved(&grid, j)).collect();
    let per_shell: Vec<(i32, f64)> = shells
        .par_iter()
        .map(|&j| {
            let series: Vec<f64> = lifted
                .iter()
                .map(|f| l2_norm_sq(&f.multiply_by(|r| CutoffKind::Chi.eval(j, r).into())).sqrt())
                .collect();
            (j, 2f64.powf(-0.5 * j as f64) * time_lq(trace.times(), &series, 2.0))
        })
        .collect();
    let (shell, value) = per_shell
        .iter()
        .copied()
        .fold((i32::MIN, 0.0), |acc, s| if s.1 > acc.1 { s } else { acc });
    Ok(LocalSmoothing {
        value,
        shell,
        per_shell,
    })
}

/// Declared proxy for the `X^s` norm: `(sum_N N^{2s} sup_t ||P_N W(t)||^2)^{1/2}`.
/// This is not the atomic `U^2_Delta` norm.
pub fn xs_proxy(trace: &SpaceTimeTrace, s: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&s) {
        return Err(invalid("s", format!("proxy regularity must be in [0, 2], got {s}")));
    }
    nonempty(trace.times())?;
    let grid = *trace.fields()[0].grid();
    let band = full_band(&grid);
    let dr = grid.spacing();
    let per_time: Vec<Vec<f64>> = trace
        .fields()
        .par_iter()
        .map(|f| {
            let c = dst_forward(f);
            band.iter()
                .map(|n| {
                    FOUR_PI
                        * dr
                        * grid
                            .wavenumbers()
                            .zip(c.coeffs())
                            .map(|(k, z)| n.symbol(k).powi(2) * z.norm_sqr())
                            .sum::<f64>()
                })
                .collect()
        })
        .collect();
    let total: f64 = band
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let sup = per_time.iter().map(|v| v[i]).fold(0.0, f64::max);
            n.value().powf(2.0 * s) * sup
        })
        .sum();
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_spectral::{sample_real, RadialGrid};

    fn grid() -> RadialGrid {
        RadialGrid::new(16.0, 256).unwrap()
    }

    #[test]
    fn zero_trace_gives_zero() {
        let z = RadialField::zeros(grid());
        let tr = SpaceTimeTrace::sample(0.0, 1.0, 5, |_| z.clone()).unwrap();
        assert_eq!(strichartz_norm(&tr, 4.0, 3.0).unwrap(), 0.0);
        assert_eq!(lorentz_time_norm(&tr, 4.0, 2.0, 3.0).unwrap().value, 0.0);
        assert_eq!(local_smoothing_functional(&tr, 0.0).unwrap().value, 0.0);
        assert_eq!(xs_proxy(&tr, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn constant_trace_is_spatial_norm() {
        let f = sample_real(grid(), |r| (-r * r).exp()).unwrap();
        let tr = SpaceTimeTrace::sample(0.0, 1.0, 9, |_| f.clone()).unwrap();
        let spatial = lebesgue_norm(&f, 3.0).unwrap();
        assert!((strichartz_norm(&tr, 4.0, 3.0).unwrap() - spatial).abs() < 1e-14);
        assert!((strichartz_norm(&tr, f64::INFINITY, 3.0).unwrap() - spatial).abs() < 1e-15);
    }

    #[test]
    fn exponent_validation() {
        let f = RadialField::zeros(grid());
        let tr = SpaceTimeTrace::sample(0.0, 1.0, 3, |_| f.clone()).unwrap();
        assert!(strichartz_norm(&tr, 0.5, 2.0).is_err());
        assert!(strichartz_norm(&tr, 2.0, 0.0).is_err());
        assert!(xs_proxy(&tr, 3.0).is_err());
    }
}
