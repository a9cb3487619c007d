//! TOML configuration schema with unit-suffixed keys.
//!
//! Every physical quantity names its unit in the key (`omega_c_cm1`,
//! `tau_c_fs`, `temperature_k`, ...). Omitted sections fall back to the
//! reference-model defaults, so an empty document is a valid, fully
//! specified configuration. Unknown keys are rejected by name.

use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::kinetics::{Integrator, KineticScheme};
use crate::rates::{Alignment, CouplingSpec, DipoleAverage};
use crate::spectral::{CavitySpec, OracleSettings, PhononBathSpec, QuadratureSpec};
use crate::vibsolver::DoubleWellSpec;

/// Cavity section; mirrors [`CavitySpec`] with the aperture in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavityConfig {
    pub omega_c_cm1: f64,
    pub tau_c_fs: f64,
    pub lambda_c_au: f64,
    pub refractive_index: f64,
    pub theta_max_deg: f64,
}

impl Default for CavityConfig {
    fn default() -> Self {
        let spec = CavitySpec::default();
        CavityConfig {
            omega_c_cm1: spec.omega_c_cm1,
            tau_c_fs: spec.tau_c_fs,
            lambda_c_au: spec.lambda_c_au,
            refractive_index: spec.refractive_index,
            theta_max_deg: spec.theta_max_rad.to_degrees(),
        }
    }
}

impl CavityConfig {
    pub fn to_spec(&self) -> CavitySpec {
        CavitySpec {
            omega_c_cm1: self.omega_c_cm1,
            tau_c_fs: self.tau_c_fs,
            lambda_c_au: self.lambda_c_au,
            refractive_index: self.refractive_index,
            theta_max_rad: self.theta_max_deg.to_radians(),
        }
    }
}

/// Dipole orientation keyword for the config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignmentKind {
    Aligned,
    Isotropic,
}

impl AlignmentKind {
    pub fn to_alignment(self) -> Alignment {
        match self {
            AlignmentKind::Aligned => Alignment::Aligned,
            AlignmentKind::Isotropic => Alignment::Isotropic,
        }
    }

    pub fn to_average(self) -> DipoleAverage {
        match self {
            AlignmentKind::Aligned => DipoleAverage::Aligned,
            AlignmentKind::Isotropic => DipoleAverage::Isotropic,
        }
    }
}

/// Coupling section. The strength is given either as a resonant Rabi
/// splitting (back-solved to g_c once ω₀ is known) or as g_c directly;
/// `rabi_cm1` wins when both are present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingConfig {
    pub rabi_cm1: Option<f64>,
    pub g_c_au: Option<f64>,
    pub n_molecules: f64,
    pub alignment: AlignmentKind,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        CouplingConfig {
            rabi_cm1: Some(150.0),
            g_c_au: None,
            n_molecules: 1e12,
            alignment: AlignmentKind::Aligned,
        }
    }
}

impl CouplingConfig {
    pub fn to_spec(&self, omega0_cm1: f64) -> Result<CouplingSpec> {
        match (self.rabi_cm1, self.g_c_au) {
            (Some(rabi), _) => CouplingSpec::from_rabi(
                rabi,
                self.n_molecules,
                omega0_cm1,
                self.alignment.to_alignment(),
            ),
            (None, Some(g)) => CouplingSpec::new(g, self.n_molecules, self.alignment.to_alignment()),
            (None, None) => Err(EngineError::invalid(
                "coupling",
                "provide rabi_cm1 or g_c_au",
            )),
        }
    }
}

/// Thermodynamic conditions and the outside-cavity reference rate.
///
/// `k0_fs1` comes from external exact dynamics for the reference model and is
/// always an input, never computed here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Conditions {
    pub temperature_k: f64,
    pub k0_fs1: f64,
}

impl Default for Conditions {
    fn default() -> Self {
        Conditions {
            temperature_k: 300.0,
            k0_fs1: 2.3e-6,
        }
    }
}

/// Kinetic-scheme section for the `kinetics` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KineticsConfig {
    pub k1_fs1: f64,
    pub k2_fs1: f64,
    pub k3_fs1: f64,
    pub initial: [f64; 4],
    pub t_max_fs: f64,
    pub n_samples: usize,
    pub integrator: Integrator,
}

impl Default for KineticsConfig {
    fn default() -> Self {
        let s = KineticScheme::default();
        KineticsConfig {
            k1_fs1: s.k1_fs1,
            k2_fs1: s.k2_fs1,
            k3_fs1: s.k3_fs1,
            initial: s.initial,
            t_max_fs: 3e5,
            n_samples: 1000,
            integrator: Integrator::Exact,
        }
    }
}

impl KineticsConfig {
    pub fn scheme(&self) -> KineticScheme {
        KineticScheme {
            k1_fs1: self.k1_fs1,
            k2_fs1: self.k2_fs1,
            k3_fs1: self.k3_fs1,
            initial: self.initial,
        }
    }
}

/// Sweep axis selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    OmegaC,
    Rabi,
    TauC,
    NMol,
}

impl SweepAxis {
    pub fn column_name(self) -> &'static str {
        match self {
            SweepAxis::OmegaC => "omega_c_cm1",
            SweepAxis::Rabi => "rabi_cm1",
            SweepAxis::TauC => "tau_c_fs",
            SweepAxis::NMol => "n_molecules",
        }
    }
}

/// Axis spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Rate-formula selector shared by the `rate` and `sweep` subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
#[clap(rename_all = "lowercase")]
pub enum RateVariant {
    Aligned,
    Isotropic,
    Convolved,
    Lossless,
}

/// Sweep section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub variant: RateVariant,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            axis: SweepAxis::OmegaC,
            min: 950.0,
            max: 1430.0,
            points: 97,
            spacing: Spacing::Linear,
            variant: RateVariant::Aligned,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min < self.max) {
            return Err(EngineError::invalid("sweep.min/sweep.max", "need min < max"));
        }
        if self.points < 2 {
            return Err(EngineError::invalid("sweep.points", "need at least 2 points"));
        }
        if self.spacing == Spacing::Log && !(self.min > 0.0) {
            return Err(EngineError::invalid("sweep.min", "log spacing needs min > 0"));
        }
        Ok(())
    }

    pub fn axis_values(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Linear => crate::numerics::linspace(self.min, self.max, self.points),
            Spacing::Log => crate::numerics::logspace(self.min, self.max, self.points),
        }
    }
}

/// Full engine configuration; every section optional with reference defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct EngineConfig {
    pub matter: DoubleWellSpec,
    pub cavity: CavityConfig,
    pub coupling: CouplingConfig,
    pub bath: PhononBathSpec,
    pub conditions: Conditions,
    pub kinetics: KineticsConfig,
    pub sweep: SweepConfig,
    pub oracle: OracleSettings,
    pub quadrature: QuadratureSpec,
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        self.matter.validate()?;
        self.cavity.to_spec().validate()?;
        self.bath.validate()?;
        if !(self.conditions.temperature_k > 0.0) {
            return Err(EngineError::invalid("conditions.temperature_k", "must be > 0"));
        }
        if !(self.conditions.k0_fs1 > 0.0) {
            return Err(EngineError::invalid("conditions.k0_fs1", "must be > 0"));
        }
        if !(self.coupling.n_molecules >= 1.0) {
            return Err(EngineError::invalid("coupling.n_molecules", "must be >= 1"));
        }
        self.kinetics.scheme().validate()?;
        self.sweep.validate()
    }

    /// Canonical serialized form, used for config round-trips and as the CSV
    /// metadata snapshot (field order is declaration order, so the output is
    /// byte-stable).
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization cannot fail")
    }
}

/// Parse and validate a TOML configuration document.
pub fn parse_config(text: &str) -> Result<EngineConfig> {
    let cfg: EngineConfig =
        toml::from_str(text).map_err(|e| EngineError::UnknownKey(e.message().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
