//! Run manifests, written in TOML. Every key is optional; omitted keys take
//! the desk-scale defaults below. Unknown keys are rejected.
//!
//! ```toml
//! seed = 7
//! dt = 1e-3
//! interpolation = "cubic"        # or "band_limited"
//!
//! [grid]
//! radius = 32.0
//! intervals = 2048               # power of two >= 64
//!
//! [data]
//! kind = "gaussian"              # zero | gaussian | gaussian_mix | shell_bump | random_bandlimited
//! amplitude = 1.0
//! width = 1.0                    # u0 = amplitude * exp(-r^2 / (2 width^2))
//!
//! [conserve]
//! t_end = 1.0
//!
//! [highlow]
//! delta0 = 1e-2
//! t0 = 0.25
//! t_final = 8.0
//! ```
//!
//! The remaining sections (`transform`, `lwp`, `norms`, `oracle`) and their
//! keys are the fields of the structs below.

use serde::{Deserialize, Serialize};

use super::corpus::{corpus, CorpusKind};
use crate::error::{Error, Result};
use crate::radial_spectral::{sample_real, Interpolation, RadialField, RadialGrid};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub radius: f64,
    pub intervals: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.radius, self.intervals).map_err(|e| Error::Manifest(e.to_string()))
    }

    /// Parses `MxR`, e.g. `2048x32`.
    pub fn parse_mxr(text: &str) -> Result<Self> {
        let (m, r) = text
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::Manifest(format!("grid `{text}` is not of the form MxR")))?;
        let intervals = m
            .trim()
            .parse()
            .map_err(|_| Error::Manifest(format!("grid `{text}`: bad interval count `{m}`")))?;
        let radius = r
            .trim()
            .parse()
            .map_err(|_| Error::Manifest(format!("grid `{text}`: bad radius `{r}`")))?;
        let grid = Self { radius, intervals };
        grid.build()?;
        Ok(grid)
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            radius: 32.0,
            intervals: 2048,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum DataSpec {
    Zero,
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
    },
    GaussianMix,
    ShellBump {
        j: i32,
    },
    RandomBandlimited,
}

fn one() -> f64 {
    1.0
}

impl Default for DataSpec {
    fn default() -> Self {
        DataSpec::Gaussian {
            amplitude: 1.0,
            width: 1.0,
        }
    }
}

impl DataSpec {
    pub fn build(&self, grid: RadialGrid, seed: u64) -> Result<RadialField> {
        match *self {
            DataSpec::Zero => Ok(RadialField::zeros(grid)),
            DataSpec::Gaussian { .. } => {
                let f = self.profile().expect("gaussian has a profile");
                sample_real(grid, f)
            }
            DataSpec::GaussianMix => Ok(corpus(grid, seed, CorpusKind::GaussianMix)),
            DataSpec::ShellBump { j } => Ok(corpus(grid, seed, CorpusKind::ShellBump { j })),
            DataSpec::RandomBandlimited => Ok(corpus(grid, seed, CorpusKind::RandomBandlimited)),
        }
    }

    /// Closed-form real profile, for data that has one.
    pub fn profile(&self) -> Option<impl Fn(f64) -> f64> {
        match *self {
            DataSpec::Gaussian { amplitude, width } => {
                Some(move |r: f64| amplitude * (-r * r / (2.0 * width * width)).exp())
            }
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConserveSpec {
    pub t_end: f64,
    pub tol_mass: f64,
    pub tol_energy: f64,
    pub tol_p: f64,
    /// Accepted window for the `dt` over `dt/2` error ratio.
    pub order_window: [f64; 2],
    /// The reference run uses `dt / reference_refinement`.
    pub reference_refinement: u32,
}

impl Default for ConserveSpec {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            tol_mass: 1e-10,
            tol_energy: 1e-6,
            tol_p: 1e-4,
            order_window: [3.2, 4.8],
            reference_refinement: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformSpec {
    pub times: Vec<f64>,
    pub s_values: Vec<f64>,
    pub tol: f64,
    /// Times in `[1/2, 2]` at which the transformed solution is tested.
    pub equivalence_times: Vec<f64>,
    /// Centered-difference step in time.
    pub fd_step: f64,
    /// Allowed residual over the measured floor.
    pub equivalence_factor: f64,
}

impl Default for TransformSpec {
    fn default() -> Self {
        Self {
            times: vec![0.5, 2.0],
            s_values: vec![0.5, 1.0],
            tol: 1e-3,
            equivalence_times: vec![0.5, 0.75, 1.0, 1.5, 2.0],
            fd_step: 1e-3,
            equivalence_factor: 10.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HighLowSpec {
    pub delta0: f64,
    pub t0: f64,
    pub t_final: f64,
    /// The pipeline grid; larger than the desk grid so the free flow up to
    /// `t_final` stays clear of the wall.
    pub grid: GridSpec,
    pub dt: f64,
    pub stride: usize,
}

impl Default for HighLowSpec {
    fn default() -> Self {
        Self {
            delta0: 1e-2,
            t0: 0.25,
            t_final: 8.0,
            grid: GridSpec {
                radius: 64.0,
                intervals: 4096,
            },
            dt: 1e-3,
            stride: 50,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LwpSpec {
    /// Multiplies the manifest data.
    pub amplitude: f64,
    pub t0: f64,
    pub half_width: f64,
    pub s: f64,
    pub panels: usize,
    /// Step of the solver used as the oracle for the fixed point.
    pub solver_dt: f64,
    pub agreement_tol: f64,
    /// Relative window around `2^{(1+2s)/4}` for `ratio(T) / ratio(T/2)`.
    pub scaling_tol: f64,
}

impl Default for LwpSpec {
    fn default() -> Self {
        Self {
            amplitude: 0.5,
            t0: 1.0,
            half_width: 0.25,
            s: 0.5,
            panels: 200,
            solver_dt: 1e-4,
            agreement_tol: 1e-4,
            scaling_tol: 0.3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormsSpec {
    pub corpora: u64,
    /// Time window `[0, t_window]` of the space-time audits.
    pub t_window: f64,
    pub time_samples: usize,
    pub reconstruction_tol: f64,
    pub square_function_tol: f64,
    pub refinement_growth_tol: f64,
}

impl Default for NormsSpec {
    fn default() -> Self {
        Self {
            corpora: 20,
            t_window: 4.0,
            time_samples: 161,
            reconstruction_tol: 1e-10,
            square_function_tol: 0.1,
            refinement_growth_tol: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSpec {
    pub times: Vec<f64>,
    pub tol: f64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self {
            times: vec![0.25, 0.5, 1.0],
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Manifest {
    pub seed: u64,
    pub dt: f64,
    pub interpolation: Interpolation,
    pub grid: GridSpec,
    pub data: DataSpec,
    pub conserve: ConserveSpec,
    pub transform: TransformSpec,
    pub highlow: HighLowSpec,
    pub lwp: LwpSpec,
    pub norms: NormsSpec,
    pub oracle: OracleSpec,
}

impl Default for Manifest {
    fn default() -> Self {
        Self {
            seed: 0,
            dt: 1e-3,
            interpolation: Interpolation::Cubic,
            grid: GridSpec::default(),
            data: DataSpec::default(),
            conserve: ConserveSpec::default(),
            transform: TransformSpec::default(),
            highlow: HighLowSpec::default(),
            lwp: LwpSpec::default(),
            norms: NormsSpec::default(),
            oracle: OracleSpec::default(),
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Manifest(format!("`{name}` must be positive and finite, got {x}")))
    }
}

impl Manifest {
    pub fn validate(&self) -> Result<()> {
        self.grid.build()?;
        self.highlow.grid.build()?;
        positive("dt", self.dt)?;
        positive("conserve.t_end", self.conserve.t_end)?;
        positive("highlow.delta0", self.highlow.delta0)?;
        positive("highlow.t0", self.highlow.t0)?;
        positive("highlow.dt", self.highlow.dt)?;
        positive("lwp.half_width", self.lwp.half_width)?;
        positive("lwp.solver_dt", self.lwp.solver_dt)?;
        positive("norms.t_window", self.norms.t_window)?;
        positive("transform.fd_step", self.transform.fd_step)?;
        if self.highlow.t_final <= self.highlow.t0 {
            return Err(Error::Manifest("`highlow.t_final` must exceed `highlow.t0`".into()));
        }
        if self.conserve.reference_refinement < 2 {
            return Err(Error::Manifest("`conserve.reference_refinement` must be at least 2".into()));
        }
        if self.highlow.stride == 0 || self.lwp.panels < 2 || self.norms.time_samples < 2 {
            return Err(Error::Manifest("strides, panels and sample counts must be at least 2 (stride >= 1)".into()));
        }
        if let DataSpec::Gaussian { amplitude, width } = self.data {
            positive("data.width", width)?;
            if !amplitude.is_finite() {
                return Err(Error::Manifest("`data.amplitude` must be finite".into()));
            }
        }
        let [lo, hi] = self.conserve.order_window;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Manifest("`conserve.order_window` must be an increasing pair".into()));
        }
        if self.transform.times.iter().chain(&self.oracle.times).any(|t| !t.is_finite() || *t == 0.0) {
            return Err(Error::Manifest("transform and oracle times must be finite and nonzero".into()));
        }
        if self
            .transform
            .equivalence_times
            .iter()
            .any(|t| !(t.is_finite() && *t > self.transform.fd_step))
        {
            return Err(Error::Manifest("equivalence times must exceed `transform.fd_step`".into()));
        }
        Ok(())
    }
}

/// Parses and validates a TOML manifest.
pub fn parse_manifest(text: &str) -> Result<Manifest> {
    let manifest: Manifest = toml::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
    manifest.validate()?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_manifest_is_default() {
        assert_eq!(parse_manifest("").unwrap(), Manifest::default());
    }

    #[test]
    fn doc_example_parses() {
        let text = r#"
            seed = 7
            dt = 1e-3
            interpolation = "band_limited"
            [grid]
            radius = 32.0
            intervals = 2048
            [data]
            kind = "gaussian"
            amplitude = 2.0
            [conserve]
            t_end = 0.5
            [highlow]
            delta0 = 1e-3
        "#;
        let m = parse_manifest(text).unwrap();
        assert_eq!(m.seed, 7);
        assert_eq!(m.interpolation, Interpolation::BandLimited);
        assert_eq!(m.data, DataSpec::Gaussian { amplitude: 2.0, width: 1.0 });
        assert_eq!(m.conserve.t_end, 0.5);
        assert_eq!(m.conserve.tol_mass, 1e-10);
        assert_eq!(m.highlow.delta0, 1e-3);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(matches!(parse_manifest("colour = 1"), Err(Error::Manifest(_))));
        assert!(parse_manifest("[grid]\nradius = 32.0\nintervals = 100").is_err());
        assert!(parse_manifest("dt = -1.0").is_err());
        assert!(parse_manifest("[data]\nkind = \"shell_bump\"").is_err());
        assert!(parse_manifest("[data]\nkind = \"shell_bump\"\nj = 1").is_ok());
        assert!(parse_manifest("[highlow]\nt0 = 9.0").is_err());
    }

    #[test]
    fn grid_flag_syntax() {
        assert_eq!(
            GridSpec::parse_mxr("1024x16").unwrap(),
            GridSpec {
                radius: 16.0,
                intervals: 1024
            }
        );
        assert!(GridSpec::parse_mxr("1024").is_err());
        assert!(GridSpec::parse_mxr("1000x16").is_err());
        assert!(GridSpec::parse_mxr("axb").is_err());
    }
}
