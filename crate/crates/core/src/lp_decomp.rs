//! Smooth cutoff profile, spatial dyadic cutoffs, Littlewood-Paley projections
//! and the high-low splitting of initial data.
//!
//! Frequencies are dyadic multiples of the grid base `pi / R`, so
//! `N = 2^j pi / R` and the multiplier `phi(k/N) - phi(2k/N)` becomes
//! `phi(n / 2^j) - phi(n / 2^{j-1})` on mode `n`.

use std::f64::consts::PI;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::radial_spectral::{dst_forward, l2_norm, lebesgue_norm, weighted_l2, RadialField, RadialGrid};
use crate::transforms::conj_fourier_final_data;

/// `phi(r) = 1` on `[0, 1]`, `0` on `[2, inf)`, and `1 - S7(r - 1)` between,
/// with `S7(x) = 35x^4 - 84x^5 + 70x^6 - 20x^7` (first three derivatives
/// vanish at both joins).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutoffProfile;

impl CutoffProfile {
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 1.0 {
            1.0
        } else if r >= 2.0 {
            0.0
        } else {
            let x = r - 1.0;
            let x4 = x * x * x * x;
            1.0 - x4 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)))
        }
    }
}

fn phi(r: f64) -> f64 {
    CutoffProfile.eval(r)
}

/// A dyadic frequency `N = 2^j * base`, with `base = pi / R` for the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicIndex {
    pub j: i32,
    pub base: f64,
}

impl DyadicIndex {
    pub fn for_grid(grid: &RadialGrid, j: i32) -> Self {
        Self {
            j,
            base: PI / grid.radius(),
        }
    }

    pub fn value(&self) -> f64 {
        self.base * 2f64.powi(self.j)
    }

    /// Symbol `phi(k/N) - phi(2k/N)`, supported in `(N/2, 2N)`.
    pub fn symbol(&self, k: f64) -> f64 {
        let n = self.value();
        phi(k / n) - phi(2.0 * k / n)
    }
}

/// Every dyadic `N` whose symbol touches the discrete spectrum; the projections
/// over this list sum to the identity exactly.
pub fn full_band(grid: &RadialGrid) -> Vec<DyadicIndex> {
    let top = grid.intervals().trailing_zeros() as i32;
    (0..=top).map(|j| DyadicIndex::for_grid(grid, j)).collect()
}

/// The band `[4 pi / R, k_max / 4]` where projections are well resolved.
pub fn resolvable_band(grid: &RadialGrid) -> Vec<DyadicIndex> {
    full_band(grid)
        .into_iter()
        .filter(|n| frequency_resolved(grid, n.value()))
        .collect()
}

pub fn frequency_resolved(grid: &RadialGrid, n: f64) -> bool {
    n >= 4.0 * grid.k_min() * (1.0 - 1e-12) && n <= grid.k_max() / 4.0
}

/// `P_N f`. Logs a warning when `N` lies outside the resolvable band.
pub fn project_dyadic(field: &RadialField, n: DyadicIndex) -> RadialField {
    if !frequency_resolved(field.grid(), n.value()) {
        warn!("P_N with N = {} outside the resolvable band of the grid", n.value());
    }
    field
        .apply_real_multiplier(|k| n.symbol(k))
        .expect("dyadic symbol is finite")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffKind {
    /// `chi_j = phi(2^{-j} r) - phi(2^{-j+1} r)`
    Chi,
    /// `chi_{<=j} = phi(2^{-j} r)`
    ChiLe,
    /// `phi(2^{-j-1} r) - phi(2^{-j+2} r)`
    ChiTilde,
    /// `phi(2^{-j-2} r) - phi(2^{-j+3} r)`
    ChiTildeTilde,
}

impl CutoffKind {
    pub fn eval(self, j: i32, r: f64) -> f64 {
        let at = |e: i32| phi(r * 2f64.powi(-e));
        match self {
            CutoffKind::Chi => at(j) - at(j - 1),
            CutoffKind::ChiLe => at(j),
            CutoffKind::ChiTilde => at(j + 1) - at(j - 2),
            CutoffKind::ChiTildeTilde => at(j + 2) - at(j - 3),
        }
    }
}

/// Whether shell `2^j` is resolved: `2^j >= 4 dr` and `2^{j+1} <= R`.
pub fn shell_resolved(grid: &RadialGrid, j: i32) -> bool {
    let width = 2f64.powi(j);
    width >= 4.0 * grid.spacing() && 2.0 * width <= grid.radius()
}

pub fn spatial_cutoff(field: &RadialField, j: i32, kind: CutoffKind) -> RadialField {
    if !shell_resolved(field.grid(), j) {
        warn!("spatial cutoff at shell 2^{j} is not resolved by the grid");
    }
    field.multiply_by(|r| kind.eval(j, r).into())
}

/// `chi_{>=N0} = 1 - phi(r / N0)`.
pub fn high_cutoff(n0: f64, r: f64) -> f64 {
    1.0 - phi(r / n0)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PartNorms {
    pub l2: f64,
    pub weighted_half: f64,
    pub l3: f64,
    /// `||.||_{H^{1/2}}` of the final data built from this part.
    pub final_hdot_half: f64,
    /// `||.||_{H^1}` of the final data built from this part.
    pub final_hdot_one: f64,
}

impl PartNorms {
    fn measure(part: &RadialField, final_data: &RadialField) -> Self {
        let c = dst_forward(final_data);
        Self {
            l2: l2_norm(part),
            weighted_half: weighted_l2(part, 0.5),
            l3: lebesgue_norm(part, 3.0).expect("p = 3 is valid"),
            final_hdot_half: c.weighted_energy(0.5).sqrt(),
            final_hdot_one: c.weighted_energy(1.0).sqrt(),
        }
    }
}

/// Result of [`split_high_low`]. The fields themselves are skipped when
/// serializing.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub delta0: f64,
    #[serde(rename = "N0")]
    pub n0: f64,
    pub tail_norm: f64,
    /// Tail norms at every scanned `N0`, in scan order.
    pub scan: Vec<(f64, f64)>,
    /// `2 int |x| chi_{>=N0} chi_{<=N0} |u0|^2`, the overlap term in
    /// `|| |x|^{1/2} u0 ||^2 = ||.v0||^2 + ||.w0||^2 + cross`.
    pub cross_term: f64,
    pub v_norms: PartNorms,
    pub w_norms: PartNorms,
    #[serde(skip)]
    pub v0: RadialField,
    #[serde(skip)]
    pub w0: RadialField,
    #[serde(skip)]
    pub v_plus: RadialField,
    #[serde(skip)]
    pub w_plus: RadialField,
}

/// `|| |x|^{1/2} chi_{>=N0} u0 ||_{L^2}`.
pub fn weighted_tail(u0: &RadialField, n0: f64) -> f64 {
    weighted_l2(&u0.multiply_by(|r| high_cutoff(n0, r).into()), 0.5)
}

/// Candidate thresholds `N0 = 2, 4, ...` up to `R / 4`.
pub fn threshold_candidates(grid: &RadialGrid) -> Vec<f64> {
    let mut out = Vec::new();
    let mut n0 = 2.0;
    while n0 <= grid.radius() / 4.0 {
        out.push(n0);
        n0 *= 2.0;
    }
    out
}

/// Splits `u0 = v0 + w0` at the smallest dyadic `N0 > 1` whose weighted tail
/// is at most `delta0`, and builds the final data `V+ = F^{-1} conj(v0)`,
/// `W+ = F^{-1} conj(w0)`.
pub fn split_high_low(u0: &RadialField, delta0: f64) -> Result<DecompositionReport> {
    if !(delta0.is_finite() && delta0 > 0.0) {
        return Err(invalid("delta0", format!("must be positive, got {delta0}")));
    }
    let grid = *u0.grid();
    let mut scan = Vec::new();
    let mut chosen = None;
    for n0 in threshold_candidates(&grid) {
        let tail = weighted_tail(u0, n0);
        scan.push((n0, tail));
        if tail <= delta0 {
            chosen = Some((n0, tail));
            break;
        }
    }
    let (n0, tail_norm) = match chosen {
        Some(c) => c,
        None => {
            let (max_n0, residual_tail) = scan.last().copied().unwrap_or((0.0, weighted_l2(u0, 0.5)));
            return Err(Error::SplitFailure {
                max_n0,
                residual_tail,
                delta0,
            });
        }
    };

    let w0 = u0.multiply_by(|r| phi(r / n0).into());
    let v0 = u0.try_sub(&w0)?;
    let v_plus = conj_fourier_final_data(&v0);
    let w_plus = conj_fourier_final_data(&w0);
    let cross_term = 2.0
        * crate::radial_spectral::FOUR_PI
        * grid.spacing()
        * grid
            .nodes()
            .zip(u0.samples())
            .map(|(r, g)| r * high_cutoff(n0, r) * phi(r / n0) * g.norm_sqr())
            .sum::<f64>();

    Ok(DecompositionReport {
        delta0,
        n0,
        tail_norm,
        scan,
        cross_term,
        v_norms: PartNorms::measure(&v0, &v_plus),
        w_norms: PartNorms::measure(&w0, &w_plus),
        v0,
        w0,
        v_plus,
        w_plus,
    })
}

/// `|| (sum_N |P_N f|^2)^{1/2} ||_{L^3} / ||f||_{L^3}` over the full band.
pub fn square_function_ratio(field: &RadialField) -> f64 {
    let grid = *field.grid();
    let mut acc = vec![0.0; grid.len()];
    for n in full_band(&grid) {
        let part = field.apply_real_multiplier(|k| n.symbol(k)).expect("finite symbol");
        for (a, g) in acc.iter_mut().zip(part.samples()) {
            *a += g.norm_sqr();
        }
    }
    let square = RadialField::from_samples(grid, acc.into_iter().map(|s| s.sqrt().into()).collect())
        .expect("finite square function");
    let denom = lebesgue_norm(field, 3.0).expect("p = 3 is valid");
    if denom == 0.0 {
        return 0.0;
    }
    lebesgue_norm(&square, 3.0).expect("p = 3 is valid") / denom
}
