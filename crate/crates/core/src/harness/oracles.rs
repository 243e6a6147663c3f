//! Checks computed along code paths separate from the ones they audit.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::radial_spectral::{l2_norm, laplacian, Interpolation, RadialField};
use crate::solver::{evolve_to, Equation, SolverConfig};
use crate::transforms::{free_propagate, pseudo_conformal};

/// The smoothstep cutoff written out from its definition.
fn cutoff(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let x = r - 1.0;
        let x4 = x * x * x * x;
        1.0 - x4 * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x)
    }
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + h * i as f64))
        .sum();
    h / 3.0 * (f(a) + inner + f(b))
}

/// `|| |x|^{1/2} (1 - phi(r/N0)) u ||_{L^2}` for `|u(r)|^2 = density(r)`.
pub fn weighted_tail_oracle(density: &dyn Fn(f64) -> f64, radius: f64, n0: f64) -> f64 {
    let four_pi = 4.0 * std::f64::consts::PI;
    simpson(
        |r| four_pi * r * r * r * (1.0 - cutoff(r / n0)).powi(2) * density(r),
        0.0,
        radius,
        1 << 16,
    )
    .sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdScan {
    /// `(N0, tail)` for every candidate.
    pub tails: Vec<(f64, f64)>,
    /// Smallest candidate whose tail is at most `delta0`.
    pub minimal: Option<f64>,
}

/// Scans every candidate, with no early exit.
pub fn brute_force_threshold(density: &dyn Fn(f64) -> f64, radius: f64, candidates: &[f64], delta0: f64) -> ThresholdScan {
    let tails: Vec<(f64, f64)> = candidates
        .iter()
        .map(|&n| (n, weighted_tail_oracle(density, radius, n)))
        .collect();
    let minimal = tails
        .iter()
        .filter(|(_, tail)| *tail <= delta0)
        .map(|(n, _)| *n)
        .fold(None, |best: Option<f64>, n| Some(best.map_or(n, |b| b.min(n))));
    ThresholdScan { tails, minimal }
}

/// `|u|^2` between grid nodes by linear interpolation, for data without a
/// closed form.
pub fn sampled_density(field: &RadialField) -> impl Fn(f64) -> f64 + '_ {
    let grid = *field.grid();
    let dens: Vec<f64> = field.values().iter().map(|v| v.norm_sqr()).collect();
    move |r: f64| {
        let x = r / grid.spacing() - 1.0;
        if x <= 0.0 {
            return dens[0];
        }
        let i = x.floor() as usize;
        if i + 1 >= dens.len() {
            return 0.0;
        }
        let w = x - i as f64;
        (1.0 - w) * dens[i] + w * dens[i + 1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EquivalenceSample {
    pub t: f64,
    /// `|| i dU/dt + (1/2) ΔU - t^{-1/2}|U|U ||` for `U = T u`.
    pub residual: f64,
    /// `t^{-2} || i du/ds + (1/2) Δu - |u|u ||` at `s = 1/t`, the stepped
    /// solution's own residual carried through the transform.
    pub splitting_floor: f64,
    /// The free-equation residual of `T` applied to an exact free solution.
    pub interpolation_floor: f64,
}

impl EquivalenceSample {
    pub fn ratio(&self) -> f64 {
        let floor = self.splitting_floor + self.interpolation_floor;
        if floor == 0.0 {
            if self.residual == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.residual / floor
        }
    }
}

fn residual(prev: &RadialField, cur: &RadialField, next: &RadialField, h: f64, coeff: f64) -> Result<f64> {
    let dt = next.try_sub(prev)?.scale(Complex64::new(0.0, 0.5 / h));
    let lap = laplacian(cur).scale(Complex64::new(0.5, 0.0));
    let nl = cur.map_nodes(|r, g| g * (coeff * g.norm() / r));
    Ok(l2_norm(&dt.try_add(&lap)?.try_sub(&nl)?))
}

/// Solves `i u_s + (1/2) Δu = |u|u` from `u(0) = u0`, maps the solution
/// through the pseudo-conformal transform, and evaluates the nonautonomous
/// equation's residual at each `t` by centered differences with step `h`.
pub fn equation_equivalence(
    u0: &RadialField,
    config: &SolverConfig,
    times: &[f64],
    h: f64,
    interpolation: Interpolation,
) -> Result<Vec<EquivalenceSample>> {
    // s-times needed: 1/(t +- h), 1/t for U, and 1/t +- h/t^2 for the floor.
    let mut needed: Vec<f64> = times
        .iter()
        .flat_map(|&t| {
            let s = 1.0 / t;
            let hs = h / (t * t);
            [1.0 / (t + h), 1.0 / (t - h), s, s - hs, s + hs]
        })
        .collect();
    needed.sort_by(f64::total_cmp);
    needed.dedup();
    let fields = evolve_to(config, Equation::Autonomous { p: 1.0 }, u0, 0.0, &needed)?;
    let at = |s: f64| -> &RadialField {
        let i = needed.partition_point(|&x| x < s);
        &fields[i]
    };
    let transform = |snap: &RadialField, t: f64| -> Result<RadialField> {
        Ok(pseudo_conformal(snap, t, interpolation)?.field)
    };

    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let s = 1.0 / t;
        let hs = h / (t * t);
        let big = [t - h, t, t + h].map(|tt| transform(at(1.0 / tt), tt));
        let [a, b, c] = big;
        let res = residual(&a?, &b?, &c?, h, t.powf(-0.5))?;
        let floor_u = residual(at(s - hs), at(s), at(s + hs), hs, 1.0)? / (t * t);
        let free = [t - h, t, t + h].map(|tt| transform(&free_propagate(u0, 1.0 / tt), tt));
        let [fa, fb, fc] = free;
        let floor_i = residual(&fa?, &fb?, &fc?, h, 0.0)?;
        out.push(EquivalenceSample {
            t,
            residual: res,
            splitting_floor: floor_u,
            interpolation_floor: floor_i,
        });
    }
    Ok(out)
}
