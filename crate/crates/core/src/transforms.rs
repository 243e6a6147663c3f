//! Linear propagator, modulation, the vector field `|J(t)|^s`, the
//! pseudo-conformal transform and the final-data map `f -> F^{-1} conj(f)`.
//!
//! Conventions, fixed once here and echoed in every report that uses them:
//!
//! * Fourier transform is unitary, `Ff(xi) = (2 pi)^{-3/2} int e^{-i x.xi} f dx`.
//!   For radial functions `F` and `F^{-1}` coincide and reduce to the sine
//!   transform `rho Ff(rho) = sqrt(2/pi) int_0^inf g(r) sin(rho r) dr`.
//! * Fractional powers `(i t)^{-3/2}` and `(2 pi i t)^{-3/2}` use the principal
//!   branch, so `i^{-3/2} = e^{-3 pi i / 4}`.
//! * `pseudo_conformal(field, t)` takes the snapshot of `u` at time `1/t` and
//!   returns `T u` at time `t`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial_spectral::{dst_forward, dst_inverse, resample, Interpolation, RadialField, Resampled};

pub const FOURIER_CONVENTION: &str = "unitary (2pi)^{-3/2}; radial F = F^{-1} = sine transform; principal branch i^{-3/2} = e^{-3pi i/4}";

/// A time value, validated where the operation needs `t != 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeTag(f64);

impl TimeTag {
    pub fn new(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(crate::error::invalid("t", format!("time must be finite, got {t}")));
        }
        Ok(Self(t))
    }

    pub fn nonzero(t: f64) -> Result<Self> {
        let tag = Self::new(t)?;
        if t == 0.0 {
            return Err(Error::ZeroTime(t));
        }
        Ok(tag)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_negative(self) -> bool {
        self.0.is_sign_negative()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `S(t) = e^{i t Δ / 2}`, the spectral multiplier `e^{-i k^2 t / 2}`.
pub fn free_propagate(field: &RadialField, t: f64) -> RadialField {
    if t == 0.0 {
        return field.clone();
    }
    let c = dst_forward(field).map_with_k(|k, c| c * Complex64::from_polar(1.0, -0.5 * k * k * t));
    dst_inverse(&c)
}

/// Principal-branch `z^{-3/2}`.
pub fn pow_minus_three_halves(z: Complex64) -> Complex64 {
    (z.ln() * -1.5).exp()
}

/// Direct quadrature of the free Schrödinger kernel, reduced to one radial
/// integral:
///
/// `g(r) = (2 pi i t)^{-3/2} 4 pi t e^{i r^2/2t} int_0^R e^{i rho^2/2t} g0(rho) sin(r rho / t) d rho`.
///
/// Costs O(M^2); intended as an oracle for [`free_propagate`].
pub fn kernel_propagate(field: &RadialField, t: f64) -> Result<RadialField> {
    TimeTag::nonzero(t)?;
    let grid = *field.grid();
    let dr = grid.spacing();
    let pref = pow_minus_three_halves(Complex64::new(0.0, 2.0 * PI * t)) * (4.0 * PI * t * dr);
    let radii: Vec<f64> = grid.nodes().collect();
    let chirped: Vec<Complex64> = radii
        .iter()
        .zip(field.samples())
        .map(|(&rho, &g)| g * Complex64::from_polar(1.0, rho * rho / (2.0 * t)))
        .collect();
    let samples: Vec<Complex64> = radii
        .par_iter()
        .map(|&r| {
            let acc: Complex64 = radii
                .iter()
                .zip(&chirped)
                .map(|(&rho, &h)| h * (r * rho / t).sin())
                .sum();
            pref * Complex64::from_polar(1.0, r * r / (2.0 * t)) * acc
        })
        .collect();
    RadialField::from_samples(grid, samples)
}

/// Multiplication by `M(±t) = e^{± i r^2 / 2t}`.
pub fn modulate(field: &RadialField, t: f64, sign: Sign) -> Result<RadialField> {
    TimeTag::nonzero(t)?;
    let s = sign.value();
    Ok(field.multiply_by(|r| Complex64::from_polar(1.0, s * r * r / (2.0 * t))))
}

/// `|J(t)|^s = M(t) |t ∇|^s M(-t)`.
pub fn vector_field_j(field: &RadialField, t: f64, s: f64) -> Result<RadialField> {
    TimeTag::nonzero(t)?;
    if !(s.is_finite() && s >= 0.0) {
        return Err(crate::error::invalid("s", format!("must be >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(field.clone());
    }
    let inner = modulate(field, t, Sign::Minus)?;
    let at = t.abs();
    let lifted = inner.apply_real_multiplier(|k| (at * k).powf(s))?;
    modulate(&lifted, t, Sign::Plus)
}

/// `||(x + i t ∇) u||^2_{L^2}` by expanding the square:
/// `||x u||^2 + t^2 ||∇u||^2 - 8 pi t Im int r conj(g) g' dr`.
///
/// Unlike the `M(t) |t∇| M(-t)` route this stays resolved for small `|t|`,
/// where the chirp `e^{-i r^2/2t}` would alias on the grid.
pub fn vector_field_norm_sq(field: &RadialField, t: f64) -> f64 {
    let grid = field.grid();
    let dr = grid.spacing();
    let weight_sq = crate::radial_spectral::weighted_l2(field, 1.0).powi(2);
    if t == 0.0 {
        return weight_sq;
    }
    let grad_sq = dst_forward(field).weighted_energy(1.0);
    let dg = crate::radial_spectral::g_derivative(field);
    let cross: f64 = grid
        .nodes()
        .zip(field.samples())
        .zip(&dg)
        .map(|((r, g), d)| r * (g.conj() * d).im)
        .sum::<f64>()
        * dr;
    weight_sq + t * t * grad_sq - 8.0 * PI * t * cross
}

/// `T u(t, x) = (i t)^{-3/2} e^{i|x|^2/2t} conj(u)(1/t, x/t)`.
///
/// `snapshot` is `u` at time `1/t`; the result is `T u` at time `t`.
pub fn pseudo_conformal(snapshot: &RadialField, t: f64, interpolation: Interpolation) -> Result<Resampled> {
    TimeTag::nonzero(t)?;
    let amplitude = pow_minus_three_halves(Complex64::new(0.0, t));
    resample(
        snapshot,
        1.0 / t.abs(),
        |r| Complex64::from_polar(1.0, r * r / (2.0 * t)),
        amplitude,
        true,
        interpolation,
    )
}

/// The equation's scaling `f -> lambda^{2/p} f(lambda x)`.
pub fn scaling_map(field: &RadialField, lambda: f64, p: f64, interpolation: Interpolation) -> Result<Resampled> {
    if !(p.is_finite() && p > 0.0) {
        return Err(crate::error::invalid("p", format!("must be positive, got {p}")));
    }
    resample(
        field,
        lambda,
        |_| Complex64::new(1.0, 0.0),
        Complex64::new(lambda.powf(2.0 / p), 0.0),
        false,
        interpolation,
    )
}

/// `F^{-1} conj(f)` for radial `f`, evaluated on the same grid:
/// `G(rho) = sqrt(2/pi) int_0^R conj(g(r)) sin(rho r) dr`.
///
/// O(M^2) direct quadrature; the integrand is even in `r`, so the trapezoid
/// sum is spectrally accurate while `rho < pi / dr`.
pub fn conj_fourier_final_data(field: &RadialField) -> RadialField {
    let grid = *field.grid();
    let dr = grid.spacing();
    let scale = (2.0 / PI).sqrt() * dr;
    let radii: Vec<f64> = grid.nodes().collect();
    let conj: Vec<Complex64> = field.samples().iter().map(|g| g.conj()).collect();
    let samples: Vec<Complex64> = radii
        .par_iter()
        .map(|&rho| {
            radii
                .iter()
                .zip(&conj)
                .map(|(&r, &g)| g * (rho * r).sin())
                .sum::<Complex64>()
                * scale
        })
        .collect();
    RadialField::from_samples_unchecked(grid, samples)
}
