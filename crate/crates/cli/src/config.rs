//! TOML run configuration. Every table rejects unknown keys.

use std::path::Path;

use hovqe::encoding::EncodingKind;
use hovqe::grouping::Scheme;
use hovqe::hamiltonian::{
    n_alpha_spec, n_carbon_spec, HamiltonianSpec, NuclearSystem, PotentialSpec, PowerConstruction, HBAR_C, NUCLEON_MASS,
};
use hovqe::sim::NoiseModel;
use hovqe::vqe::{AnsatzConfig, Mode, OptimizerConfig, Preset, StageConfig};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub hamiltonian: SystemConfig,
    #[serde(default)]
    pub eigensolve: EigensolveConfig,
    #[serde(default)]
    pub encode: EncodeConfig,
    #[serde(default)]
    pub counts: CountsConfig,
    #[serde(default)]
    pub groups: GroupsConfig,
    #[serde(default)]
    pub vqe: VqeSection,
    #[serde(default)]
    pub tables: TablesConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Physical system; N and K come from the command sections.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "system", rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemConfig {
    /// Neutron on a carbon isotope with the tabulated exponential fit.
    Carbon { a_target: u32 },
    /// Neutron on an alpha particle with the tabulated polynomial potential.
    Alpha { hbar_omega: u32 },
    /// Any two-body system and potential.
    Custom {
        a_target: u32,
        #[serde(default = "one")]
        a_proj: u32,
        hbar_omega: f64,
        #[serde(default = "nucleon_mass")]
        nucleon_mass: f64,
        #[serde(default = "hbar_c")]
        hbar_c: f64,
        potential: PotentialSpec,
    },
    /// V0 = −2.79 MeV, c = 0.05, ħω = 15.95 MeV on A = 16.
    #[default]
    Demo,
}

fn one() -> u32 {
    1
}

fn nucleon_mass() -> f64 {
    NUCLEON_MASS
}

fn hbar_c() -> f64 {
    HBAR_C
}

impl SystemConfig {
    /// Spec with basis size `n` and truncation `k`; `n` may be 1 for matrix-only use.
    pub fn spec(&self, n: usize, k: usize) -> CliResult<HamiltonianSpec> {
        let spec = match self {
            SystemConfig::Carbon { a_target } => n_carbon_spec(*a_target, n, k)?,
            SystemConfig::Alpha { hbar_omega } => n_alpha_spec(*hbar_omega, n, k)?,
            SystemConfig::Custom { a_target, a_proj, hbar_omega, nucleon_mass, hbar_c, potential } => HamiltonianSpec {
                system: NuclearSystem {
                    a_target: *a_target,
                    a_proj: *a_proj,
                    nucleon_mass: *nucleon_mass,
                    hbar_omega: *hbar_omega,
                    hbar_c: *hbar_c,
                },
                potential: potential.clone(),
                n,
                k,
            },
            SystemConfig::Demo => hovqe::hamiltonian::demo_spec().with_nk(n, k),
        };
        Ok(spec)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigensolveConfig {
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub construction: PowerConstruction,
}

impl Default for EigensolveConfig {
    fn default() -> Self {
        Self { n: vec![4, 8, 16], k: vec![3], construction: PowerConstruction::Padded }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EncodeConfig {
    pub n: usize,
    pub k: usize,
    pub encoding: EncodingKind,
    pub construction: PowerConstruction,
}

impl Default for EncodeConfig {
    fn default() -> Self {
        Self { n: 4, k: 2, encoding: EncodingKind::Gray, construction: PowerConstruction::Padded }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CountsConfig {
    pub encodings: Vec<EncodingKind>,
    /// Largest qubit count for binary and Gray grids.
    pub n_max: usize,
    /// Largest basis size for the one-hot grid.
    pub dim_max: usize,
}

impl Default for CountsConfig {
    fn default() -> Self {
        Self { encodings: vec![EncodingKind::OneHot, EncodingKind::Binary, EncodingKind::Gray], n_max: 4, dim_max: 8 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroupsConfig {
    pub n: usize,
    pub k: usize,
    pub encoding: EncodingKind,
    pub scheme: Scheme,
    pub construction: PowerConstruction,
}

impl Default for GroupsConfig {
    fn default() -> Self {
        Self { n: 4, k: 2, encoding: EncodingKind::Gray, scheme: Scheme::Dgc, construction: PowerConstruction::Padded }
    }
}

/// Either a built-in preset schedule, or an explicit one on the `[hamiltonian]` system.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqeSection {
    pub preset: Option<Preset>,
    pub mode: Option<Mode>,
    pub seeds: Option<Vec<u64>>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub encoding: Option<EncodingKind>,
    pub ansatz: Option<AnsatzConfig>,
    pub grouping: Option<Scheme>,
    pub stages: Option<Vec<StageConfig>>,
    pub noise: Option<NoiseModel>,
    pub optimizer: Option<OptimizerConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TablesConfig {
    /// Qubit counts for the binary and Gray tables.
    pub n: Vec<usize>,
    /// Basis sizes for the one-hot tables.
    pub dim: Vec<usize>,
}

impl Default for TablesConfig {
    fn default() -> Self {
        Self { n: vec![2, 3], dim: vec![4] }
    }
}
