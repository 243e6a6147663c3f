//! Duhamel fixed-point iteration on `I = [t0 - T, t0 + T]`:
//!
//! `u(t) = S(t - t0) u(t0) - i int_{t0}^t S(t - s) |u|^p u(s) ds`.
//!
//! Iterates are stored in the interaction picture `a(s) = S(t0 - s) u(s)`,
//! where the update reads `a(t) = a(t0) - i int_{t0}^t S(t0 - s) F(s) ds`.
//! The time integral treats the sine coefficients of `F` as piecewise linear
//! between nodes and integrates the propagator phase exactly on each panel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::radial_spectral::{dst::dst1, RadialField, RadialGrid};
use crate::transforms::{vector_field_j, TimeTag};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PicardConfig {
    /// Number of panels on `I`; rounded up to an even count so `t0` is a node.
    pub panels: usize,
    pub max_iterations: usize,
    /// Stop once the difference falls below `tol` times the iterate size.
    pub tol: f64,
    pub p: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            panels: 200,
            max_iterations: 40,
            tol: 1e-13,
            p: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PicardOutcome {
    Converged,
    IterationLimit,
    /// Ratio `>= 1` on three consecutive iterations.
    Diverged,
}

#[derive(Clone, Debug, Serialize)]
pub struct PicardReport {
    pub t0: f64,
    #[serde(rename = "T")]
    pub half_width: f64,
    pub s: f64,
    pub outcome: PicardOutcome,
    /// `sup_t || |J(t)|^s (u^{(k+1)} - u^{(k)})(t) ||` for `k = 0, 1, ...`.
    pub differences: Vec<f64>,
    /// Successive quotients of `differences`.
    pub ratios: Vec<f64>,
    /// `|| |J(t0)|^s u(t0) ||`.
    pub r_initial: f64,
    /// `sup_t || |J(t)|^s u(t) ||` of the last iterate.
    pub r_sup: f64,
    #[serde(skip)]
    pub times: Vec<f64>,
    #[serde(skip)]
    pub iterate: Vec<RadialField>,
}

impl PicardReport {
    /// Every quotient strictly below one.
    pub fn contracting(&self) -> bool {
        !self.ratios.is_empty() && self.ratios.iter().all(|&r| r < 1.0)
    }

    /// Quotients nonincreasing from one iteration to the next.
    pub fn ratios_decreasing(&self) -> bool {
        self.ratios.windows(2).all(|w| w[1] <= w[0])
    }

    /// First quotient `||u2 - u1|| / ||u1 - u0||`.
    pub fn contraction_factor(&self) -> Option<f64> {
        self.ratios.first().copied()
    }
}

/// `int_0^1 e^{i theta y} dy` and `int_0^1 y e^{i theta y} dy`.
fn panel_weights(theta: f64) -> (Complex64, Complex64) {
    let it = Complex64::new(0.0, theta);
    if theta.abs() < 1e-2 {
        let mut e1 = Complex64::new(0.0, 0.0);
        let mut e2 = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for n in 0..8 {
            e1 += pow / (fact * (n + 1) as f64);
            e2 += pow / (fact * (n + 2) as f64);
            pow *= it;
            fact *= (n + 1) as f64;
        }
        (e1, e2)
    } else {
        let e = it.exp();
        let e1 = (e - 1.0) / it;
        let e2 = e / it + (e - 1.0) / (theta * theta);
        (e1, e2)
    }
}

struct Grid1 {
    grid: RadialGrid,
    t0: f64,
    times: Vec<f64>,
    h: f64,
    center: usize,
    omega: Vec<f64>,
}

impl Grid1 {
    fn to_physical(&self, a: &[Complex64], t: f64) -> Vec<Complex64> {
        let c: Vec<Complex64> = a
            .iter()
            .zip(&self.omega)
            .map(|(z, w)| z * Complex64::from_polar(1.0, -w * (t - self.t0)))
            .collect();
        dst1(&c)
    }

    fn field(&self, a: &[Complex64], t: f64) -> RadialField {
        RadialField::from_samples(self.grid, self.to_physical(a, t)).expect("finite iterate")
    }

    /// One application of the Duhamel map.
    fn apply(&self, a0: &[Complex64], iterate: &[Vec<Complex64>], p: f64) -> Vec<Vec<Complex64>> {
        let nodes: Vec<f64> = self.grid.nodes().collect();
        // interaction-picture forcing e^{i w (s - t0)} Fhat(s) at each node
        let forcing: Vec<Vec<Complex64>> = self
            .times
            .iter()
            .zip(iterate)
            .map(|(&t, a)| {
                let g = self.to_physical(a, t);
                let f: Vec<Complex64> = g
                    .iter()
                    .zip(&nodes)
                    .map(|(z, r)| {
                        let amp = z.norm() / r;
                        z * if p == 1.0 { amp } else { amp.powf(p) }
                    })
                    .collect();
                dst1(&f)
            })
            .collect();
        let weights: Vec<(Complex64, Complex64)> = self.omega.iter().map(|w| panel_weights(w * self.h)).collect();
        let n = self.times.len();
        let m = a0.len();
        let mut cumulative = vec![vec![Complex64::new(0.0, 0.0); m]; n];
        for j in 0..n - 1 {
            let (lo, hi) = cumulative.split_at_mut(j + 1);
            let prev = &lo[j];
            let next = &mut hi[0];
            let shift = self.times[j] - self.t0;
            for k in 0..m {
                let (e1, e2) = weights[k];
                let phase = Complex64::from_polar(1.0, self.omega[k] * shift);
                let fj = forcing[j][k];
                let fj1 = forcing[j + 1][k];
                next[k] = prev[k] + phase * self.h * (fj * e1 + (fj1 - fj) * e2);
            }
        }
        let centre = cumulative[self.center].clone();
        cumulative
            .iter()
            .map(|c| {
                a0.iter()
                    .zip(c)
                    .zip(&centre)
                    .map(|((a, ci), cc)| a - Complex64::i() * (ci - cc))
                    .collect()
            })
            .collect()
    }
}

fn j_norm(field: &RadialField, t: f64, s: f64) -> Result<f64> {
    Ok(crate::radial_spectral::l2_norm(&vector_field_j(field, t, s)?))
}

/// Runs the iteration from `u^{(0)}(t) = S(t - t0) u(t0)` on `[t0 - T, t0 + T]`.
pub fn picard_lwp(u_t0: &RadialField, t0: f64, s: f64, half_width: f64, config: &PicardConfig) -> Result<PicardReport> {
    TimeTag::nonzero(t0)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(invalid("s", format!("must be in [0, 1], got {s}")));
    }
    if !(half_width > 0.0 && half_width < t0.abs()) {
        return Err(invalid("T", format!("need 0 < T < |t0| = {}, got {half_width}", t0.abs())));
    }
    if config.panels < 2 || config.max_iterations == 0 {
        return Err(invalid("config", "need at least two panels and one iteration"));
    }
    let panels = config.panels + config.panels % 2;
    let grid = *u_t0.grid();
    let h = 2.0 * half_width / panels as f64;
    let times: Vec<f64> = (0..=panels)
        .map(|i| if i == panels / 2 { t0 } else { t0 - half_width + h * i as f64 })
        .collect();
    let g1 = Grid1 {
        grid,
        t0,
        times,
        h,
        center: panels / 2,
        omega: grid.wavenumbers().map(|k| 0.5 * k * k).collect(),
    };

    let a0 = dst1(u_t0.samples());
    let mut iterate: Vec<Vec<Complex64>> = vec![a0.clone(); g1.times.len()];
    let r_initial = j_norm(u_t0, t0, s)?;
    let mut differences = Vec::new();
    let mut ratios = Vec::new();
    let mut outcome = PicardOutcome::IterationLimit;
    let mut above_one = 0;

    for _ in 0..config.max_iterations {
        let next = g1.apply(&a0, &iterate, config.p);
        let mut diff: f64 = 0.0;
        let mut size: f64 = 0.0;
        for ((t, a_new), a_old) in g1.times.iter().zip(&next).zip(&iterate) {
            let delta: Vec<Complex64> = a_new.iter().zip(a_old).map(|(x, y)| x - y).collect();
            diff = diff.max(j_norm(&g1.field(&delta, *t), *t, s)?);
            size = size.max(j_norm(&g1.field(a_new, *t), *t, s)?);
        }
        iterate = next;
        if let Some(&last) = differences.last() {
            let ratio: f64 = if last > 0.0 { diff / last } else { 0.0 };
            ratios.push(ratio);
            above_one = if ratio >= 1.0 { above_one + 1 } else { 0 };
        }
        differences.push(diff);
        if diff <= config.tol * size || diff == 0.0 {
            outcome = PicardOutcome::Converged;
            break;
        }
        if above_one >= 3 {
            outcome = PicardOutcome::Diverged;
            break;
        }
    }

    let fields: Vec<RadialField> = g1.times.iter().zip(&iterate).map(|(t, a)| g1.field(a, *t)).collect();
    let mut r_sup: f64 = 0.0;
    for (t, f) in g1.times.iter().zip(&fields) {
        r_sup = r_sup.max(j_norm(f, *t, s)?);
    }
    Ok(PicardReport {
        t0,
        half_width,
        s,
        outcome,
        differences,
        ratios,
        r_initial,
        r_sup,
        times: g1.times,
        iterate: fields,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panel_weight_branches_agree() {
        for theta in [9.9e-3, 1.01e-2] {
            let (a1, a2) = panel_weights(theta);
            let it = Complex64::new(0.0, theta);
            let e = it.exp();
            let b1 = (e - 1.0) / it;
            let b2 = e / it + (e - 1.0) / (theta * theta);
            assert!((a1 - b1).norm() < 1e-10);
            assert!((a2 - b2).norm() < 1e-8);
        }
        let (e1, e2) = panel_weights(0.0);
        assert_eq!(e1, Complex64::new(1.0, 0.0));
        assert_eq!(e2, Complex64::new(0.5, 0.0));
    }

    #[test]
    fn zero_data_is_a_fixed_point() {
        let grid = RadialGrid::new(16.0, 128).unwrap();
        let rep = picard_lwp(&RadialField::zeros(grid), 1.0, 0.5, 0.25, &PicardConfig::default()).unwrap();
        assert_eq!(rep.outcome, PicardOutcome::Converged);
        assert_eq!(rep.differences, vec![0.0]);
    }

    #[test]
    fn rejects_bad_window() {
        let grid = RadialGrid::new(16.0, 128).unwrap();
        let z = RadialField::zeros(grid);
        assert!(picard_lwp(&z, 1.0, 0.5, 1.5, &PicardConfig::default()).is_err());
        assert!(picard_lwp(&z, 0.0, 0.5, 0.1, &PicardConfig::default()).is_err());
        assert!(picard_lwp(&z, 1.0, 1.5, 0.1, &PicardConfig::default()).is_err());
    }
}
