//! Experiment configuration: a TOML document whose values can be overridden
//! by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ddanneal::analysis::{NoiseSource, SweepSpec};
use ddanneal::dynamics::{AnnealConfig, Protocol, DEFAULT_STEPS};
use ddanneal::ising::IsingModel;
use ddanneal::noise::LorentzianPeak;
use ddanneal::problems::{fixture_info, printed_fixture, FIXTURE_NAMES};
use serde::{Deserialize, Serialize};

pub const DEFAULT_DURATION: f64 = 2.6;
pub const DEFAULT_HX: f64 = 3.0;
pub const DEFAULT_J_HZ: f64 = 26.0;
pub const DEFAULT_GAMMA: f64 = 3.0;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    None,
    Static,
    TwoPeak,
    /// Peaks listed under `noise.peaks` in the config file.
    Lorentzian,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealBlock {
    pub duration: Option<f64>,
    pub steps: Option<usize>,
    pub hx: Option<f64>,
    pub protocol: Option<Protocol>,
    /// Coupling scale in Hz that maps dimensionless time onto seconds.
    pub j_hz: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseBlock {
    pub kind: Option<NoiseKind>,
    pub gamma: Option<f64>,
    pub peaks: Option<Vec<LorentzianPeak>>,
    pub amplitudes_hz: Option<Vec<f64>>,
    pub correlated: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DdBlock {
    pub pulse_counts: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleBlock {
    pub n_realizations: Option<usize>,
    pub master_seed: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub path: Option<PathBuf>,
}

/// Everything optional; unset values fall back to the problem preset and
/// then to built-in defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Preset name or path to a model JSON file.
    pub problem: Option<String>,
    pub anneal: AnnealBlock,
    pub noise: NoiseBlock,
    pub dd: DdBlock,
    pub ensemble: EnsembleBlock,
    pub output: OutputBlock,
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Sets `slot` when the flag was given.
pub fn set<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

pub struct Problem {
    pub model: IsingModel,
    pub hx: f64,
    pub duration: f64,
    pub j_hz: f64,
}

/// A preset name selects the printed benchmark matrix and its run
/// parameters; anything else is read as a model JSON file.
pub fn load_problem(name: &str) -> Result<Problem> {
    if FIXTURE_NAMES.contains(&name) {
        let info = fixture_info(name)?;
        return Ok(Problem {
            model: printed_fixture(name)?,
            hx: info.hx,
            duration: info.duration,
            j_hz: info.j_hz,
        });
    }
    let text = std::fs::read_to_string(name)
        .with_context(|| format!("`{name}` is neither a preset ({}) nor a readable model file", FIXTURE_NAMES.join(", ")))?;
    Ok(Problem {
        model: IsingModel::from_json(&text).with_context(|| format!("parsing model file {name}"))?,
        hx: DEFAULT_HX,
        duration: DEFAULT_DURATION,
        j_hz: DEFAULT_J_HZ,
    })
}

/// Fully resolved run parameters, embedded in every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolved {
    pub problem: String,
    pub anneal: AnnealConfig,
    pub j_hz: f64,
    pub noise_kind: NoiseKind,
    pub noise: NoiseSource,
    pub correlated: bool,
    pub amplitudes_hz: Vec<f64>,
    pub pulse_counts: Vec<usize>,
    pub n_realizations: usize,
    pub master_seed: u64,
}

impl Resolved {
    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            problem: self.problem.clone(),
            anneal: self.anneal.clone(),
            j_hz: self.j_hz,
            noise: self.noise.clone(),
            correlated: self.correlated,
            amplitudes_hz: self.amplitudes_hz.clone(),
            pulse_counts: self.pulse_counts.clone(),
            n_realizations: self.n_realizations,
            master_seed: self.master_seed,
        }
    }
}

pub fn resolve(config: &ExperimentConfig) -> Result<(Resolved, IsingModel)> {
    let name = config.problem.clone().unwrap_or_else(|| "mot5".to_string());
    let problem = load_problem(&name)?;
    let a = &config.anneal;
    let anneal = AnnealConfig::new(a.duration.unwrap_or(problem.duration), a.hx.unwrap_or(problem.hx))
        .with_steps(a.steps.unwrap_or(DEFAULT_STEPS))
        .with_protocol(a.protocol.unwrap_or_default());
    if anneal.protocol == Protocol::LocalFieldsWithSignFlips && !problem.model.has_fields() {
        bail!("protocol local-fields-with-sign-flips needs a model with local fields; pass a model file");
    }
    anneal.validate()?;

    let n = &config.noise;
    let kind = n.kind.unwrap_or(NoiseKind::None);
    let gamma = n.gamma.unwrap_or(DEFAULT_GAMMA);
    let noise = match kind {
        NoiseKind::None => NoiseSource::None,
        NoiseKind::Static => NoiseSource::Static,
        NoiseKind::TwoPeak => NoiseSource::two_peak(gamma)?,
        NoiseKind::Lorentzian => match &n.peaks {
            Some(peaks) if !peaks.is_empty() => NoiseSource::Spectrum { peaks: peaks.clone() },
            _ => bail!("noise kind `lorentzian` needs `noise.peaks` in the config file"),
        },
    };
    let amplitudes_hz = match (kind, &n.amplitudes_hz) {
        (NoiseKind::None, _) => vec![0.0],
        (_, Some(a)) if !a.is_empty() => a.clone(),
        _ => bail!("noise kind {kind:?} needs at least one amplitude"),
    };
    let resolved = Resolved {
        problem: name,
        anneal,
        j_hz: a.j_hz.unwrap_or(problem.j_hz),
        noise_kind: kind,
        noise,
        correlated: n.correlated.unwrap_or(true),
        amplitudes_hz,
        pulse_counts: config.dd.pulse_counts.clone().unwrap_or_else(|| vec![0]),
        n_realizations: config.ensemble.n_realizations.unwrap_or(1),
        master_seed: config.ensemble.master_seed.unwrap_or(DEFAULT_SEED),
    };
    resolved.sweep_spec().validate()?;
    Ok((resolved, problem.model))
}
