use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{dst, RadialField};
use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Four-point Lagrange on `g`, with the odd reflections at `r = 0` and `r = R`.
    #[default]
    Cubic,
    /// Exact evaluation of the sine series of `g`; O(M^2).
    BandLimited,
}

/// How much of the field a resampling could not represent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TruncationLoss {
    /// Output nodes whose source point lies beyond `R - dr` (set to zero).
    pub nodes_beyond: usize,
    /// Fraction of the input L^2 mass never read (only when `scale < 1`).
    pub discarded_fraction: f64,
    /// `|g_{M-1}| / max |g|` of the input; the size of what zeroed nodes miss.
    pub edge_ratio: f64,
}

impl TruncationLoss {
    /// Relative L^2 loss estimate; zero when nothing was dropped.
    pub fn relative(&self) -> f64 {
        let beyond = if self.nodes_beyond > 0 { self.edge_ratio } else { 0.0 };
        self.discarded_fraction.sqrt() + beyond
    }

    pub fn combine(self, other: Self) -> Self {
        Self {
            nodes_beyond: self.nodes_beyond + other.nodes_beyond,
            discarded_fraction: self.discarded_fraction + other.discarded_fraction,
            edge_ratio: self.edge_ratio.max(other.edge_ratio),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Resampled {
    pub field: RadialField,
    pub loss: TruncationLoss,
    pub interpolation: Interpolation,
}

/// Returns `amplitude * phase(r) * f(scale * r)` (conjugating `f` first when
/// asked), sampled on the input grid.
///
/// In `g` units this is `g_out(r) = (amplitude / scale) phase(r) g(scale r)`.
pub fn resample(
    field: &RadialField,
    scale: f64,
    phase: impl Fn(f64) -> Complex64,
    amplitude: Complex64,
    conjugate: bool,
    interpolation: Interpolation,
) -> Result<Resampled> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(invalid("scale", format!("must be positive, got {scale}")));
    }
    let grid = *field.grid();
    let dr = grid.spacing();
    let last = grid.len() as f64;
    let factor = amplitude / scale;

    let coeffs = match interpolation {
        Interpolation::BandLimited => Some(dst::dst1(field.samples())),
        Interpolation::Cubic => None,
    };

    let mut nodes_beyond = 0;
    let samples = grid
        .nodes()
        .map(|r| {
            let x = scale * r / dr;
            if x > last * (1.0 + 1e-14) {
                nodes_beyond += 1;
                return Complex64::new(0.0, 0.0);
            }
            let g = match &coeffs {
                Some(c) => eval_sine_series(c, grid.radius(), grid.intervals(), scale * r),
                None => cubic_at(field.samples(), grid.intervals(), x),
            };
            let g = if conjugate { g.conj() } else { g };
            factor * phase(r) * g
        })
        .collect();

    let discarded_fraction = if scale < 1.0 {
        let cut = scale * grid.node(grid.len() - 1);
        let total: f64 = field.samples().iter().map(|g| g.norm_sqr()).sum();
        if total == 0.0 {
            0.0
        } else {
            grid.nodes()
                .zip(field.samples())
                .filter(|(r, _)| *r > cut)
                .map(|(_, g)| g.norm_sqr())
                .sum::<f64>()
                / total
        }
    } else {
        0.0
    };

    Ok(Resampled {
        field: RadialField::from_samples_unchecked(grid, samples),
        loss: TruncationLoss {
            nodes_beyond,
            discarded_fraction,
            edge_ratio: field.boundary_ratio(),
        },
        interpolation,
    })
}

/// `g` at integer node index `j` (r = j dr), extended oddly about 0 and M.
fn node_value(samples: &[Complex64], intervals: usize, j: i64) -> Complex64 {
    let m = intervals as i64;
    let period = 2 * m;
    let j = j.rem_euclid(period);
    if j == 0 || j == m {
        Complex64::new(0.0, 0.0)
    } else if j < m {
        samples[(j - 1) as usize]
    } else {
        -samples[(period - j - 1) as usize]
    }
}

fn cubic_at(samples: &[Complex64], intervals: usize, x: f64) -> Complex64 {
    let i0 = x.floor();
    let t = x - i0;
    let i0 = i0 as i64;
    let w = [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ];
    (0..4)
        .map(|d| node_value(samples, intervals, i0 - 1 + d as i64) * w[d])
        .sum()
}

fn eval_sine_series(coeffs: &[Complex64], radius: f64, intervals: usize, rho: f64) -> Complex64 {
    let theta = std::f64::consts::PI * rho / radius;
    let step = Complex64::from_polar(1.0, theta);
    let mut z = step;
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, &c) in coeffs.iter().enumerate() {
        // Re-anchor the rotation periodically to bound drift.
        if n % 256 == 255 {
            z = Complex64::from_polar(1.0, theta * (n + 1) as f64);
        }
        acc += c * z.im;
        z *= step;
    }
    acc * (2.0 / intervals as f64).sqrt()
}
