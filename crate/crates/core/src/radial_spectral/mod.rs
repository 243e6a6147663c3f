//! Radial grid, sampled radial fields and their sine-spectral representation.
//!
//! A radial function `f(|x|)` on R^3 is stored as `g(r) = r f(r)` on the
//! interior nodes `r_m = m dr`, `m = 1..M-1`, of `[0, R]`. With that
//! substitution the 3D Laplacian becomes `g''` with Dirichlet conditions at
//! both ends, so the sine basis `sin(k_n r)`, `k_n = n pi / R`, diagonalises
//! it and every radial Fourier multiplier `m(|xi|)` acts as `m(k_n)` on the
//! sine coefficients of `g`.

pub mod dst;
pub mod io;
mod resample;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use resample::{resample, Interpolation, Resampled, TruncationLoss};

pub const FOUR_PI: f64 = 4.0 * PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    radius: f64,
    intervals: usize,
}

impl RadialGrid {
    pub fn new(radius: f64, intervals: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGrid(format!("radius must be positive, got {radius}")));
        }
        if intervals < 64 || !intervals.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "interval count must be a power of two >= 64, got {intervals}"
            )));
        }
        Ok(Self { radius, intervals })
    }

    /// R = 32, M = 2048.
    pub fn desk() -> Self {
        Self {
            radius: 32.0,
            intervals: 2048,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// M, the number of intervals.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of interior nodes, M - 1.
    pub fn len(&self) -> usize {
        self.intervals - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.radius / self.intervals as f64
    }

    /// Radius of interior node `i` (0-based, so `i = m - 1`).
    pub fn node(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let dr = self.spacing();
        (1..self.intervals).map(move |m| m as f64 * dr)
    }

    /// Wavenumber of coefficient `i` (0-based, `k = (i+1) pi / R`).
    pub fn wavenumber(&self, i: usize) -> f64 {
        (i + 1) as f64 * PI / self.radius
    }

    pub fn wavenumbers(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let dk = PI / self.radius;
        (1..self.intervals).map(move |n| n as f64 * dk)
    }

    pub fn k_min(&self) -> f64 {
        PI / self.radius
    }

    pub fn k_max(&self) -> f64 {
        self.wavenumber(self.len() - 1)
    }

    /// Same radius, twice the nodes.
    pub fn refined(&self) -> Self {
        Self {
            radius: self.radius,
            intervals: self.intervals * 2,
        }
    }
}

/// Samples `g_m = r_m f(r_m)` of a radial complex field on a [`RadialGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    samples: Vec<Complex64>,
}

impl RadialField {
    pub fn zeros(grid: RadialGrid) -> Self {
        Self {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Wraps raw `g` samples, rejecting wrong lengths and non-finite values.
    pub fn from_samples(grid: RadialGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                node: i + 1,
                r: grid.node(i),
            });
        }
        Ok(Self { grid, samples })
    }

    /// Builds a field from physical values `f(r)` sampled at the nodes.
    pub fn from_values(grid: RadialGrid, values: &[Complex64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        let samples = values.iter().zip(grid.nodes()).map(|(&f, r)| f * r).collect();
        Self::from_samples(grid, samples)
    }

    pub(crate) fn from_samples_unchecked(grid: RadialGrid, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self { grid, samples }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// The stored `g = r f` samples.
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Physical values `f(r_m) = g_m / r_m`.
    pub fn values(&self) -> Vec<Complex64> {
        self.samples
            .iter()
            .zip(self.grid.nodes())
            .map(|(&g, r)| g / r)
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `|g_{M-1}| / max |g|`, zero for the zero field.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            0.0
        } else {
            self.samples[self.samples.len() - 1].norm() / peak
        }
    }

    /// Decay flag of the field against a declared boundary tolerance.
    pub fn decays(&self, boundary_tol: f64) -> bool {
        self.boundary_ratio() <= boundary_tol
    }

    /// Applies `op(r, g)` node-wise.
    pub fn map_nodes(&self, mut op: impl FnMut(f64, Complex64) -> Complex64) -> Self {
        let samples = self
            .grid
            .nodes()
            .zip(&self.samples)
            .map(|(r, &g)| op(r, g))
            .collect();
        Self::from_samples_unchecked(self.grid, samples)
    }

    /// Pointwise multiplication of `f` by a real or complex radial profile.
    pub fn multiply_by(&self, mut profile: impl FnMut(f64) -> Complex64) -> Self {
        self.map_nodes(|r, g| g * profile(r))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_nodes(|_, g| g * c)
    }

    pub fn conj(&self) -> Self {
        self.map_nodes(|_, g| g.conj())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Self::from_samples_unchecked(self.grid, samples))
    }

    pub fn dst_forward(&self) -> SpectralCoeffs {
        dst_forward(self)
    }

    /// Forward transform, multiply by `m(k)`, inverse transform.
    pub fn apply_multiplier(&self, m: impl Fn(f64) -> Complex64) -> Result<Self> {
        Ok(dst_inverse(&apply_multiplier(&dst_forward(self), m)?))
    }

    /// Same as [`apply_multiplier`](Self::apply_multiplier) for real symbols.
    pub fn apply_real_multiplier(&self, m: impl Fn(f64) -> f64) -> Result<Self> {
        self.apply_multiplier(|k| Complex64::new(m(k), 0.0))
    }
}

/// Sine coefficients of `g` for wavenumbers `k_n = n pi / R`, orthonormal
/// scaling so that `sum |g_m|^2 = sum |ghat_n|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCoeffs {
    grid: RadialGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralCoeffs {
    pub fn from_coeffs(grid: RadialGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `4 pi dr sum |ghat_n|^2`, equal to the squared L^2(R^3) norm.
    pub fn energy(&self) -> f64 {
        FOUR_PI * self.grid.spacing() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// `4 pi dr sum k_n^{2s} |ghat_n|^2`.
    pub fn weighted_energy(&self, s: f64) -> f64 {
        FOUR_PI
            * self.grid.spacing()
            * self
                .grid
                .wavenumbers()
                .zip(&self.coeffs)
                .map(|(k, c)| k.powf(2.0 * s) * c.norm_sqr())
                .sum::<f64>()
    }

    pub(crate) fn map_with_k(&self, op: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .grid
            .wavenumbers()
            .zip(&self.coeffs)
            .map(|(k, &c)| op(k, c))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }
}

/// Samples `g_m = r_m f(r_m)`.
pub fn sample_function(grid: RadialGrid, f: impl Fn(f64) -> Complex64) -> Result<RadialField> {
    let mut samples = Vec::with_capacity(grid.len());
    for (i, r) in grid.nodes().enumerate() {
        let v = f(r);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { node: i + 1, r });
        }
        samples.push(v * r);
    }
    Ok(RadialField { grid, samples })
}

pub fn sample_real(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Result<RadialField> {
    sample_function(grid, |r| Complex64::new(f(r), 0.0))
}

pub fn dst_forward(field: &RadialField) -> SpectralCoeffs {
    SpectralCoeffs {
        grid: field.grid,
        coeffs: dst::dst1(&field.samples),
    }
}

pub fn dst_inverse(coeffs: &SpectralCoeffs) -> RadialField {
    RadialField {
        grid: coeffs.grid,
        samples: dst::dst1(&coeffs.coeffs),
    }
}

/// `ghat_n <- m(k_n) ghat_n`.
pub fn apply_multiplier(coeffs: &SpectralCoeffs, m: impl Fn(f64) -> Complex64) -> Result<SpectralCoeffs> {
    let mut out = Vec::with_capacity(coeffs.coeffs.len());
    for (k, &c) in coeffs.grid.wavenumbers().zip(&coeffs.coeffs) {
        let factor = m(k);
        if !(factor.re.is_finite() && factor.im.is_finite()) {
            return Err(invalid("multiplier", format!("non-finite value {factor} at k = {k}")));
        }
        out.push(factor * c);
    }
    Ok(SpectralCoeffs {
        grid: coeffs.grid,
        coeffs: out,
    })
}

/// `||f||_{L^2(R^3)} = (4 pi sum |g_m|^2 dr)^{1/2}`.
///
/// `g` vanishes at both ends of `[0, R]`, so the plain sum is the trapezoid
/// rule; for even-in-r integrands it is spectrally accurate.
pub fn l2_norm(field: &RadialField) -> f64 {
    l2_norm_sq(field).sqrt()
}

pub fn l2_norm_sq(field: &RadialField) -> f64 {
    FOUR_PI * field.grid.spacing() * field.samples.iter().map(|g| g.norm_sqr()).sum::<f64>()
}

/// `L^p(R^3)` norm for `p` in `[1, inf]`; pass `f64::INFINITY` for the sup norm.
pub fn lebesgue_norm(field: &RadialField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid("p", format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(sup_norm(field));
    }
    Ok(lebesgue_integral(field, p).powf(1.0 / p))
}

/// `int |f|^p dx = 4 pi sum r^{2-p} |g|^p dr`.
pub fn lebesgue_integral(field: &RadialField, p: f64) -> f64 {
    if p == 2.0 {
        return l2_norm_sq(field);
    }
    FOUR_PI
        * field.grid.spacing()
        * field
            .grid
            .nodes()
            .zip(&field.samples)
            .map(|(r, g)| r.powf(2.0 - p) * g.norm().powf(p))
            .sum::<f64>()
}

/// `max |f|` including a quadratic extrapolation of `f` to `r = 0` from the
/// three innermost nodes.
pub fn sup_norm(field: &RadialField) -> f64 {
    let f = |i: usize| field.samples[i] / field.grid.node(i);
    let at_origin = f(0) * 3.0 - f(1) * 3.0 + f(2);
    field
        .samples
        .iter()
        .zip(field.grid.nodes())
        .map(|(g, r)| g.norm() / r)
        .fold(at_origin.norm(), f64::max)
}

/// `||r^s f||_{L^2(R^3)}` by weighted quadrature.
pub fn weighted_l2(field: &RadialField, s: f64) -> f64 {
    (FOUR_PI
        * field.grid.spacing()
        * field
            .grid
            .nodes()
            .zip(&field.samples)
            .map(|(r, g)| r.powf(2.0 * s) * g.norm_sqr())
            .sum::<f64>())
    .sqrt()
}

/// `<a, b> = int conj(a) b dx`.
pub fn inner(a: &RadialField, b: &RadialField) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    Ok(a.samples
        .iter()
        .zip(&b.samples)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        * (FOUR_PI * a.grid.spacing()))
}

/// Spectral derivative `g'(r_m)` of the stored samples.
pub fn g_derivative(field: &RadialField) -> Vec<Complex64> {
    let coeffs = dst::dst1(&field.samples);
    let weighted: Vec<Complex64> = field
        .grid
        .wavenumbers()
        .zip(&coeffs)
        .map(|(k, &c)| c * k)
        .collect();
    dst::cosine_series(&weighted)
}

/// `du/dr` at the nodes, from `u_r = (g' - g/r) / r`.
pub fn radial_derivative(field: &RadialField) -> Vec<Complex64> {
    g_derivative(field)
        .into_iter()
        .zip(&field.samples)
        .zip(field.grid.nodes())
        .map(|((dg, &g), r)| (dg - g / r) / r)
        .collect()
}

/// `g''` through the multiplier `-k^2`, i.e. `r * Delta f`.
pub fn laplacian(field: &RadialField) -> RadialField {
    let c = dst_forward(field).map_with_k(|k, c| -c * (k * k));
    dst_inverse(&c)
}
