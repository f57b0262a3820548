//! Flags, config files and the resolved experiment configuration.
//!
//! Every subcommand reads its parameters from the command line first and
//! from the matching table of the TOML config file second; anything still
//! unset takes its default. The resolved [`ExperimentConfig`] is what gets
//! embedded in every output, and `--dump-config` writes it back in the
//! config file format.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use kuramoto_core::ode::OdeOptions;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "kuramoto", version, about = "Experiments on the Kuramoto gradient flow of identical oscillators")]
pub struct Cli {
    /// TOML config file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed of the ChaCha8 generator behind every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when omitted.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Table of all equilibria with index, potential and spectrum.
    Equilibria(EquilibriaArgs),
    /// Integrate one orbit and classify where it ends.
    Simulate(SimulateArgs),
    /// Cell complex of the maximum set: counts, χ and homology.
    Cells(CellsArgs),
    /// Normal-circle experiment at a point of the maximum set, or a winding
    /// number around a template.
    Imprint(ImprintArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquilibriaArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    /// Explicit start angles, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<f64>>,
    /// Start next to the equilibrium with angle π on these oscillators
    /// (1-based, comma separated).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start_equilibrium: Option<Vec<usize>>,
    /// Distance from the start equilibrium along a seeded unstable direction.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset_unstable: Option<f64>,
    /// Trace the saddle connections from the start equilibrium to this one
    /// instead of a single forward orbit.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heteroclinic_to: Option<Vec<usize>>,
    /// Natural frequencies ω of the generalized model.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<f64>>,
    /// Coupling matrix of the generalized model, row-major.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Integrate in reverse time.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backward: Option<bool>,
    /// Minimum time between rows of the trace.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_interval: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    /// Also write the summary report to this file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CellsArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    RootsOfUnity,
    /// Half the oscillators at 0 and half at π (m even).
    Singular,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImprintArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseKind>,
    /// Explicit base point on the maximum set, overriding `--base`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_angles: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Points on the circle.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Potential level where forward orbits are recorded (default m − 2).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossing_level: Option<f64>,
    /// Compute the winding number of a small circle around the set where
    /// the oscillators in `--I` coincide.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winding: Option<bool>,
    /// Three coinciding oscillators (1-based).
    #[arg(long = "I", value_delimiter = ',')]
    #[serde(rename = "I", skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<usize>>,
    /// Radius of the winding circle.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

/// The on-disk config format: global keys plus one optional table per
/// subcommand.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equilibria: Option<EquilibriaArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<CellsArgs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub imprint: Option<ImprintArgs>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("bad config file {}: {e}", path.display())))
    }
}

/// Fills every `None` field of `cli` from `file`.
trait Merge {
    fn merge(self, file: Self) -> Self;
}

macro_rules! merge_impl {
    ($t:ty { $($f:ident),* }) => {
        impl Merge for $t {
            fn merge(self, file: Self) -> Self {
                Self { $($f: self.$f.or(file.$f)),* }
            }
        }
    };
}

merge_impl!(EquilibriaArgs { m });
merge_impl!(SimulateArgs {
    m, angles, start_equilibrium, offset_unstable, heteroclinic_to, omega, coupling, t_max, backward, sample_interval, atol, rtol,
    summary
});
merge_impl!(CellsArgs { m });
merge_impl!(ImprintArgs { m, base, base_angles, radius, n, crossing_level, winding, subset, delta });

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriaConfig {
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StartConfig {
    /// Uniform angles drawn from the seeded generator.
    Random,
    Angles { angles: Vec<f64> },
    /// Offset from an equilibrium along a seeded unit vector in its
    /// unstable eigenspace.
    Equilibrium { subset: Vec<usize>, offset: f64 },
    Heteroclinic { from: Vec<usize>, to: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub m: usize,
    pub start: StartConfig,
    pub omega: Option<Vec<f64>>,
    pub coupling: Option<Vec<f64>>,
    pub t_max: f64,
    pub backward: bool,
    pub sample_interval: f64,
    pub atol: f64,
    pub rtol: f64,
    pub summary: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellsConfig {
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ImprintConfig {
    NormalCircle {
        m: usize,
        base: Option<BaseKind>,
        base_angles: Option<Vec<f64>>,
        radius: f64,
        n: usize,
        crossing_level: Option<f64>,
    },
    Winding {
        m: usize,
        subset: Vec<usize>,
        delta: f64,
        n: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum CommandConfig {
    Equilibria(EquilibriaConfig),
    Simulate(SimulateConfig),
    Cells(CellsConfig),
    Imprint(ImprintConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    #[serde(flatten)]
    pub command: CommandConfig,
}

pub const DEFAULT_SEED: u64 = 0;
pub const CELLS_MAX_M: usize = 9;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn check_m(m: Option<i64>, default: usize) -> CliResult<usize> {
    let m = m.unwrap_or(default as i64);
    if m < 2 {
        return Err(bad("m must be ≥ 2"));
    }
    if m > 64 {
        return Err(bad("m must be ≤ 64"));
    }
    Ok(m as usize)
}

fn check_indices(name: &str, idx: &[usize], m: usize) -> CliResult<()> {
    if let Some(&i) = idx.iter().find(|&&i| i == 0 || i > m) {
        return Err(bad(format!("{name}: index {i} outside 1..={m}")));
    }
    let mut sorted = idx.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != idx.len() {
        return Err(bad(format!("{name}: repeated index")));
    }
    Ok(())
}

fn positive(name: &str, x: f64) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() { Ok(x) } else { Err(bad(format!("{name} must be positive and finite"))) }
}

impl SimulateArgs {
    fn resolve(self) -> CliResult<SimulateConfig> {
        let default_m = self.angles.as_ref().map_or(5, Vec::len);
        let m = check_m(self.m, default_m)?;
        let start = match (self.angles, self.start_equilibrium, self.heteroclinic_to) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => return Err(bad("--angles cannot be combined with an equilibrium start")),
            (Some(a), None, None) => {
                if a.len() != m {
                    return Err(bad(format!("--angles has {} entries, expected m = {m}", a.len())));
                }
                if a.iter().any(|x| !x.is_finite()) {
                    return Err(bad("--angles must be finite"));
                }
                StartConfig::Angles { angles: a }
            }
            (None, Some(i), Some(j)) => {
                check_indices("--start-equilibrium", &i, m)?;
                check_indices("--heteroclinic-to", &j, m)?;
                StartConfig::Heteroclinic { from: i, to: j }
            }
            (None, Some(i), None) => {
                check_indices("--start-equilibrium", &i, m)?;
                StartConfig::Equilibrium { subset: i, offset: positive("--offset-unstable", self.offset_unstable.unwrap_or(1e-5))? }
            }
            (None, None, Some(_)) => return Err(bad("--heteroclinic-to needs --start-equilibrium")),
            (None, None, None) => StartConfig::Random,
        };
        if let Some(w) = &self.omega {
            if w.len() != m {
                return Err(bad(format!("--omega has {} entries, expected m = {m}", w.len())));
            }
        }
        if let Some(a) = &self.coupling {
            if a.len() != m * m {
                return Err(bad(format!("--coupling has {} entries, expected m² = {}", a.len(), m * m)));
            }
        }
        let ode = OdeOptions::default();
        Ok(SimulateConfig {
            m,
            start,
            omega: self.omega,
            coupling: self.coupling,
            t_max: positive("--t-max", self.t_max.unwrap_or(200.0))?,
            backward: self.backward.unwrap_or(false),
            sample_interval: {
                let s = self.sample_interval.unwrap_or(0.05);
                if !(s >= 0.0 && s.is_finite()) {
                    return Err(bad("--sample-interval must be non-negative"));
                }
                s
            },
            atol: positive("--atol", self.atol.unwrap_or(ode.atol))?,
            rtol: positive("--rtol", self.rtol.unwrap_or(ode.rtol))?,
            summary: self.summary,
        })
    }
}

impl ImprintArgs {
    fn resolve(self) -> CliResult<ImprintConfig> {
        let m = check_m(self.m, 5)?;
        if self.winding.unwrap_or(false) {
            let subset = self.subset.ok_or_else(|| bad("--winding needs --I"))?;
            check_indices("--I", &subset, m)?;
            if subset.len() != 3 {
                return Err(bad("--I must name three oscillators"));
            }
            return Ok(ImprintConfig::Winding {
                m,
                subset,
                delta: positive("--delta", self.delta.unwrap_or(1e-3))?,
                n: self.n.unwrap_or(64),
            });
        }
        if let Some(a) = &self.base_angles {
            if a.len() != m {
                return Err(bad(format!("--base-angles has {} entries, expected m = {m}", a.len())));
            }
        }
        let base = if self.base_angles.is_some() { self.base } else { Some(self.base.unwrap_or(BaseKind::RootsOfUnity)) };
        if base == Some(BaseKind::Singular) && self.base_angles.is_none() && m % 2 == 1 {
            return Err(bad("--base singular needs an even m"));
        }
        let n = self.n.unwrap_or(360);
        if n == 0 {
            return Err(bad("--n must be positive"));
        }
        Ok(ImprintConfig::NormalCircle {
            m,
            base,
            base_angles: self.base_angles,
            radius: positive("--radius", self.radius.unwrap_or(0.01))?,
            n,
            crossing_level: self.crossing_level,
        })
    }
}

impl ExperimentConfig {
    pub fn resolve(cli: Cli) -> CliResult<Self> {
        let file = match &cli.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let command = match cli.command {
            Command::Equilibria(a) => {
                let a = a.merge(file.equilibria.unwrap_or_default());
                CommandConfig::Equilibria(EquilibriaConfig { m: check_m(a.m, 5)? })
            }
            Command::Simulate(a) => CommandConfig::Simulate(a.merge(file.simulate.unwrap_or_default()).resolve()?),
            Command::Cells(a) => {
                let a = a.merge(file.cells.unwrap_or_default());
                let m = a.m.unwrap_or(5);
                if !(3..=CELLS_MAX_M as i64).contains(&m) {
                    return Err(bad(format!("cells: m = {m} outside the supported range 3..={CELLS_MAX_M}")));
                }
                CommandConfig::Cells(CellsConfig { m: m as usize })
            }
            Command::Imprint(a) => CommandConfig::Imprint(a.merge(file.imprint.unwrap_or_default()).resolve()?),
        };
        Ok(ExperimentConfig {
            seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            format: cli.format.or(file.format).unwrap_or_default(),
            output: cli.output.or(file.output),
            command,
        })
    }

    /// The resolved configuration in config file form; loading it back
    /// reproduces `self`.
    pub fn to_file(&self) -> ConfigFile {
        let mut f = ConfigFile { seed: Some(self.seed), format: Some(self.format), output: self.output.clone(), ..Default::default() };
        match &self.command {
            CommandConfig::Equilibria(c) => f.equilibria = Some(EquilibriaArgs { m: Some(c.m as i64) }),
            CommandConfig::Cells(c) => f.cells = Some(CellsArgs { m: Some(c.m as i64) }),
            CommandConfig::Simulate(c) => {
                let mut a = SimulateArgs {
                    m: Some(c.m as i64),
                    omega: c.omega.clone(),
                    coupling: c.coupling.clone(),
                    t_max: Some(c.t_max),
                    backward: Some(c.backward),
                    sample_interval: Some(c.sample_interval),
                    atol: Some(c.atol),
                    rtol: Some(c.rtol),
                    summary: c.summary.clone(),
                    ..Default::default()
                };
                match &c.start {
                    StartConfig::Random => {}
                    StartConfig::Angles { angles } => a.angles = Some(angles.clone()),
                    StartConfig::Equilibrium { subset, offset } => {
                        a.start_equilibrium = Some(subset.clone());
                        a.offset_unstable = Some(*offset);
                    }
                    StartConfig::Heteroclinic { from, to } => {
                        a.start_equilibrium = Some(from.clone());
                        a.heteroclinic_to = Some(to.clone());
                    }
                }
                f.simulate = Some(a);
            }
            CommandConfig::Imprint(ImprintConfig::NormalCircle { m, base, base_angles, radius, n, crossing_level }) => {
                f.imprint = Some(ImprintArgs {
                    m: Some(*m as i64),
                    base: *base,
                    base_angles: base_angles.clone(),
                    radius: Some(*radius),
                    n: Some(*n),
                    crossing_level: *crossing_level,
                    ..Default::default()
                })
            }
            CommandConfig::Imprint(ImprintConfig::Winding { m, subset, delta, n }) => {
                f.imprint = Some(ImprintArgs {
                    m: Some(*m as i64),
                    winding: Some(true),
                    subset: Some(subset.clone()),
                    delta: Some(*delta),
                    n: Some(*n),
                    ..Default::default()
                })
            }
        }
        f
    }
}
