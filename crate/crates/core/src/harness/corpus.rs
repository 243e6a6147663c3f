//! Seeded radial test data. Every kind is defined through grid-independent
//! parameters, so the same seed gives the same function on refined grids.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lp_decomp::CutoffKind;
use crate::radial_spectral::{dst_inverse, sample_function, RadialField, RadialGrid, SpectralCoeffs};

/// Largest wavenumber carried by `random_bandlimited`.
pub const BAND_K: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CorpusKind {
    /// `sum c_i e^{-a_i r^2}`, one to three terms, `|c_i| <= 1`, `a_i in [1/4, 2]`.
    GaussianMix,
    /// A random complex multiple of `chi_j`.
    ShellBump { j: i32 },
    /// Random sine coefficients on `k_n <= BAND_K` with a Gaussian taper.
    RandomBandlimited,
}

impl CorpusKind {
    /// The `i`-th kind in the rotation used by the corpus sweeps.
    pub fn rotation(i: u64) -> Self {
        match i % 3 {
            0 => CorpusKind::GaussianMix,
            1 => CorpusKind::ShellBump { j: (i / 3 % 3) as i32 - 1 },
            _ => CorpusKind::RandomBandlimited,
        }
    }
}

fn unit_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.25..1.0), rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn corpus(grid: RadialGrid, seed: u64, kind: CorpusKind) -> RadialField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        CorpusKind::GaussianMix => {
            let n = rng.gen_range(1..=3);
            let terms: Vec<(Complex64, f64)> = (0..n).map(|_| (unit_complex(&mut rng), rng.gen_range(0.25..2.0))).collect();
            sample_function(grid, |r| terms.iter().map(|(c, a)| c * (-a * r * r).exp()).sum())
                .expect("bounded parameters")
        }
        CorpusKind::ShellBump { j } => {
            let c = unit_complex(&mut rng);
            sample_function(grid, |r| c * CutoffKind::Chi.eval(j, r)).expect("bounded cutoff")
        }
        CorpusKind::RandomBandlimited => {
            let modes = (BAND_K * grid.radius() / std::f64::consts::PI).floor() as usize;
            let drawn: Vec<Complex64> = (0..modes.min(grid.len()))
                .map(|n| {
                    let k = grid.wavenumber(n);
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (-(k * k) / 8.0).exp()
                })
                .collect();
            let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
            coeffs[..drawn.len()].copy_from_slice(&drawn);
            // sine coefficients scale like sqrt(M) for a fixed function
            let norm = (grid.intervals() as f64 / 2.0).sqrt() / grid.radius();
            coeffs.iter_mut().for_each(|c| *c *= norm);
            dst_inverse(&SpectralCoeffs::from_coeffs(grid, coeffs).expect("finite coefficients"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_bits() {
        let grid = RadialGrid::new(32.0, 512).unwrap();
        for i in 0..6 {
            let kind = CorpusKind::rotation(i);
            assert_eq!(corpus(grid, 42, kind), corpus(grid, 42, kind));
        }
        assert_ne!(corpus(grid, 1, CorpusKind::GaussianMix), corpus(grid, 2, CorpusKind::GaussianMix));
    }

    #[test]
    fn bandlimited_is_grid_independent() {
        let coarse = RadialGrid::new(32.0, 512).unwrap();
        let a = corpus(coarse, 7, CorpusKind::RandomBandlimited);
        let b = corpus(coarse.refined(), 7, CorpusKind::RandomBandlimited);
        let va = a.values();
        let vb = b.values();
        for (i, x) in va.iter().enumerate() {
            assert!((x - vb[2 * i + 1]).norm() < 1e-12 * (1.0 + x.norm()));
        }
    }
}
