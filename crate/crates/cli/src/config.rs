//! Run configuration (TOML).

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use micromaser::circuit::{BoundarySector, CircuitParams, PhaseGrid};
use micromaser::device::{CavityParams, DeviceInputs};
use micromaser::maser::MaserConfig;
use micromaser::spectral::{flux_axis, EigenOptions, SweepSpec, MAX_LEVELS};
use micromaser::transitions::KConvention;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// The reference configuration, also the documentation of every key.
pub const DEFAULT_TOML: &str = include_str!("../configs/default.toml");

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub circuit: CircuitBlock,
    pub sweep: SweepBlock,
    pub maser: MaserBlock,
    pub evolve: EvolveBlock,
    pub cavity: CavityBlock,
    pub device: DeviceBlock,
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sector {
    #[default]
    Even,
    Odd,
    Full,
}

impl From<Sector> for BoundarySector {
    fn from(s: Sector) -> Self {
        match s {
            Sector::Even => BoundarySector::Even,
            Sector::Odd => BoundarySector::Odd,
            Sector::Full => BoundarySector::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitBlock {
    pub gamma: f64,
    pub ej_over_ec: f64,
    pub ej_freq: f64,
    pub n_p: usize,
    pub n_q: usize,
    pub sector: Sector,
}

impl Default for CircuitBlock {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            ej_over_ec: 100.0,
            ej_freq: 400.0,
            n_p: 80,
            n_q: 160,
            sector: Sector::Even,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    #[default]
    Planck,
    ReducedPlanck,
}

impl From<Convention> for KConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Planck => KConvention::Planck,
            Convention::ReducedPlanck => KConvention::ReducedPlanck,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepBlock {
    pub f_start: f64,
    pub f_stop: f64,
    pub f_step: f64,
    pub f_s: Vec<f64>,
    pub f_s_adiabatic: Vec<f64>,
    pub k: usize,
    pub k_convention: Convention,
    pub seed: u64,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self {
            f_start: 0.45,
            f_stop: 0.55,
            f_step: 0.001,
            f_s: vec![0.0, 0.22, 0.27],
            f_s_adiabatic: vec![0.15, 0.22, 0.27],
            k: 4,
            k_convention: Convention::Planck,
            seed: micromaser::spectral::eigen::DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaserBlock {
    pub n_th: f64,
    pub n_t: Vec<f64>,
    pub tau_int_over_pi: Vec<f64>,
    pub n_max: usize,
}

impl Default for MaserBlock {
    fn default() -> Self {
        Self {
            n_th: 0.1,
            n_t: vec![1.0, 100.0],
            tau_int_over_pi: vec![1.4, 10.0],
            n_max: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    #[default]
    Maser,
    PureDecay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveBlock {
    pub preset: Preset,
    pub n_t: f64,
    pub tau_int_over_pi: f64,
    pub n_max: usize,
    pub t_final: f64,
    /// Defaults to 90% of the stability limit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub record_every: usize,
    pub columns: usize,
    pub check_positivity: bool,
}

impl Default for EvolveBlock {
    fn default() -> Self {
        Self {
            preset: Preset::Maser,
            n_t: 1.0,
            tau_int_over_pi: 1.4,
            n_max: 32,
            t_final: 20.0,
            dt: None,
            record_every: 100,
            columns: 4,
            check_positivity: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CavityBlock {
    pub area: f64,
    pub thickness: f64,
    pub quality: f64,
    pub loop_area: f64,
    pub beta_l: f64,
}

impl Default for CavityBlock {
    fn default() -> Self {
        let c = CavityParams::reference();
        Self {
            area: c.area,
            thickness: c.thickness,
            quality: c.quality,
            loop_area: c.loop_area,
            beta_l: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviceSource {
    /// Gap and `|t01|` taken from the block.
    #[default]
    Fixed,
    /// Gap and `|t01|` computed from the circuit at `(f, f_s)`.
    Circuit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceBlock {
    pub source: DeviceSource,
    pub gap_over_ej: f64,
    pub t01: f64,
    pub f: f64,
    pub f_s: f64,
    pub n_t: f64,
    pub tau_int_over_pi: f64,
}

impl Default for DeviceBlock {
    fn default() -> Self {
        Self {
            source: DeviceSource::Fixed,
            gap_over_ej: 0.05,
            t01: 0.13,
            f: 0.493,
            f_s: 0.27,
            n_t: 1.0,
            tau_int_over_pi: 1.4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: PathBuf,
    pub precision: usize,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            precision: 12,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Hash of everything that influences output bytes (the output
    /// directory does not).
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output.dir = PathBuf::new();
        let text = toml::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn template(&self) -> CliResult<CircuitParams> {
        let c = &self.circuit;
        Ok(CircuitParams::new(c.gamma, c.ej_over_ec, 0.0, 0.0, c.ej_freq)?)
    }

    pub fn grid(&self) -> CliResult<PhaseGrid> {
        Ok(PhaseGrid::new(self.circuit.n_p, self.circuit.n_q)?)
    }

    pub fn eigen_options(&self) -> EigenOptions {
        EigenOptions {
            seed: self.sweep.seed,
            ..EigenOptions::default()
        }
    }

    pub fn sweep_spec(&self, f_s: f64) -> CliResult<SweepSpec> {
        let s = &self.sweep;
        if s.k == 0 || s.k > MAX_LEVELS {
            return Err(CliError::Validation(format!(
                "sweep.k must be in 1..={MAX_LEVELS}, got {}",
                s.k
            )));
        }
        let mut spec = SweepSpec::new(self.template()?.with_flux(0.0, f_s), f_s, self.grid()?, s.k);
        spec.sector = self.circuit.sector.into();
        spec.options = self.eigen_options();
        Ok(spec)
    }

    pub fn flux_axis(&self) -> CliResult<Vec<f64>> {
        let s = &self.sweep;
        Ok(flux_axis(s.f_start, s.f_stop, s.f_step)?)
    }

    /// `(N_t, τ_int)` pairs for the photon statistics, `τ_int` in radians.
    pub fn pump_pairs(&self) -> CliResult<Vec<(f64, f64)>> {
        let m = &self.maser;
        if m.n_t.len() != m.tau_int_over_pi.len() {
            return Err(CliError::Validation(format!(
                "maser.n_t has {} entries but maser.tau_int_over_pi has {}",
                m.n_t.len(),
                m.tau_int_over_pi.len()
            )));
        }
        if m.n_t.is_empty() {
            return Err(CliError::Validation("maser.n_t is empty".into()));
        }
        Ok(m.n_t
            .iter()
            .zip(&m.tau_int_over_pi)
            .map(|(&n, &t)| (n, t * PI))
            .collect())
    }

    pub fn maser_configs(&self) -> CliResult<Vec<MaserConfig>> {
        self.pump_pairs()?
            .into_iter()
            .map(|(n_t, tau)| Ok(MaserConfig::from_pump(self.maser.n_th, n_t, tau, self.maser.n_max)?))
            .collect()
    }

    pub fn cavity(&self) -> CliResult<CavityParams> {
        let c = &self.cavity;
        Ok(CavityParams::new(c.area, c.thickness, c.quality, c.loop_area)?)
    }

    pub fn device_inputs(&self, gap_over_ej: f64, t01: f64) -> CliResult<DeviceInputs> {
        Ok(DeviceInputs {
            gap_over_ej,
            t01,
            ej_freq: self.circuit.ej_freq,
            cavity: self.cavity()?,
            beta_l: self.cavity.beta_l,
            tau_int: self.device.tau_int_over_pi * PI,
            n_t: self.device.n_t,
        })
    }

    /// Checks every block before any computation starts.
    pub fn validate(&self) -> CliResult<()> {
        self.template()?;
        self.grid()?;
        micromaser::circuit::HamiltonianOperator::new(
            &self.template()?,
            &self.grid()?,
            self.circuit.sector.into(),
            micromaser::circuit::PotentialModel::Josephson,
        )?;
        for &f_s in self.sweep.f_s.iter().chain(&self.sweep.f_s_adiabatic) {
            if !f_s.is_finite() {
                return Err(CliError::Validation(format!("f_s value {f_s} is not finite")));
            }
            self.sweep_spec(f_s)?;
        }
        self.flux_axis()?;
        self.maser_configs()?;
        let e = &self.evolve;
        if !(e.t_final > 0.0 && e.t_final.is_finite()) {
            return Err(CliError::Validation(format!(
                "evolve.t_final must be > 0, got {}",
                e.t_final
            )));
        }
        if e.record_every == 0 {
            return Err(CliError::Validation("evolve.record_every must be >= 1".into()));
        }
        if e.columns > e.n_max {
            return Err(CliError::Validation(format!(
                "evolve.columns = {} exceeds evolve.n_max = {}",
                e.columns, e.n_max
            )));
        }
        MaserConfig::from_pump(self.maser.n_th, e.n_t, e.tau_int_over_pi * PI, e.n_max)?;
        self.cavity()?;
        if self.cavity.beta_l.is_nan() || self.cavity.beta_l < 0.0 {
            return Err(CliError::Validation(format!(
                "cavity.beta_l must be >= 0, got {}",
                self.cavity.beta_l
            )));
        }
        if !(1..=17).contains(&self.output.precision) {
            return Err(CliError::Validation(format!(
                "output.precision must be in 1..=17, got {}",
                self.output.precision
            )));
        }
        Ok(())
    }
}
