//! Fidelity versus pulse count under noise, over a grid of noise amplitudes.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::seeds::derive_seed;
use super::stats::{summarize_values, Summary};
use crate::dynamics::{final_fidelity, propagate, pulse_positions, AnnealConfig, PulseSchedule};
use crate::error::{Error, Result};
use crate::ising::{brute_force_ground_states, IsingModel};
use crate::noise::{sample_trace, static_disorder, LorentzianPeak, NoiseSpectrum, NoiseTrace};

/// What perturbs the longitudinal fields during a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseSource {
    None,
    /// Gaussian fields of standard deviation `amplitude`, constant in time.
    Static,
    /// Traces drawn from a sum of Lorentzian peaks, rescaled to `amplitude`.
    Spectrum { peaks: Vec<LorentzianPeak> },
}

impl NoiseSource {
    pub fn two_peak(gamma: f64) -> Result<Self> {
        Ok(NoiseSource::Spectrum {
            peaks: NoiseSpectrum::two_peak(gamma, 1.0)?.peaks,
        })
    }

    /// Short label written into result tables.
    pub fn id(&self) -> String {
        match self {
            NoiseSource::None => "none".into(),
            NoiseSource::Static => "static".into(),
            NoiseSource::Spectrum { peaks } => {
                let parts: Vec<String> = peaks
                    .iter()
                    .map(|p| format!("{}/{}/{}", p.center, p.half_width, p.weight))
                    .collect();
                format!("lorentzian:{}", parts.join("+"))
            }
        }
    }

    /// Trace in units of J for an amplitude given in Hz.
    pub fn trace(
        &self,
        amplitude_hz: f64,
        j_hz: f64,
        config: &AnnealConfig,
        n_qubits: usize,
        correlated: bool,
        seed: u64,
    ) -> Result<Option<NoiseTrace>> {
        let sigma = amplitude_hz / j_hz;
        match self {
            NoiseSource::None => Ok(None),
            _ if amplitude_hz == 0.0 => Ok(None),
            NoiseSource::Static => {
                static_disorder(sigma, n_qubits, config.n_steps, config.dt(), correlated, seed).map(Some)
            }
            NoiseSource::Spectrum { peaks } => {
                let spectrum = NoiseSpectrum {
                    peaks: peaks.clone(),
                    amplitude: amplitude_hz,
                };
                let physical = config.duration / j_hz;
                let trace = sample_trace(&spectrum, config.n_steps, physical, n_qubits, correlated, seed)?;
                Ok(Some(trace.in_units_of(j_hz)))
            }
        }
    }
}

/// One factorial sweep. `anneal` is dimensionless; `j_hz` maps it to lab time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub problem: String,
    pub anneal: AnnealConfig,
    pub j_hz: f64,
    pub noise: NoiseSource,
    #[serde(default = "default_correlated")]
    pub correlated: bool,
    pub amplitudes_hz: Vec<f64>,
    pub pulse_counts: Vec<usize>,
    pub n_realizations: usize,
    pub master_seed: u64,
}

fn default_correlated() -> bool {
    true
}

impl SweepSpec {
    pub fn physical_duration_s(&self) -> f64 {
        self.anneal.duration / self.j_hz
    }

    pub fn validate(&self) -> Result<()> {
        self.anneal.validate()?;
        if !(self.j_hz > 0.0 && self.j_hz.is_finite()) {
            return Err(Error::InvalidParameter(format!("J must be positive, got {} Hz", self.j_hz)));
        }
        if let Some(a) = self.amplitudes_hz.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return Err(Error::InvalidParameter(format!("noise amplitude must be non-negative, got {a}")));
        }
        if let Some(p) = self.pulse_counts.iter().find(|p| **p > self.anneal.n_steps) {
            return Err(Error::InvalidParameter(format!(
                "{p} pulses do not fit into {} steps",
                self.anneal.n_steps
            )));
        }
        if self.amplitudes_hz.is_empty() || self.pulse_counts.is_empty() || self.n_realizations == 0 {
            return Err(Error::InvalidParameter("sweep grid is empty".into()));
        }
        Ok(())
    }

    /// Grid cells in output order: amplitude-major, then pulse count, then realization.
    pub fn cells(&self) -> Vec<SweepCell> {
        let mut cells = Vec::new();
        for (ai, &amplitude_hz) in self.amplitudes_hz.iter().enumerate() {
            for (pi, &pulses) in self.pulse_counts.iter().enumerate() {
                for r in 0..self.n_realizations {
                    cells.push(SweepCell {
                        amplitude_index: ai,
                        pulse_index: pi,
                        realization: r,
                        amplitude_hz,
                        pulses,
                        seed: derive_seed(self.master_seed, &[ai as u64, pi as u64, r as u64]),
                    });
                }
            }
        }
        cells
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepCell {
    pub amplitude_index: usize,
    pub pulse_index: usize,
    pub realization: usize,
    pub amplitude_hz: f64,
    pub pulses: usize,
    /// `derive_seed(master, [amplitude_index, pulse_index, realization])`
    pub seed: u64,
}

/// One realization. Column order is the CSV schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub amplitude_hz: f64,
    pub pulses: usize,
    pub pulses_per_ms: f64,
    pub seed: u64,
    pub fidelity: f64,
    /// `fidelity` divided by the noiseless fidelity of the same problem.
    pub normalized_fidelity: f64,
    pub protocol: String,
    pub problem: String,
    /// Sweep duration in seconds.
    pub duration: f64,
    pub spectrum: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub noiseless_fidelity: f64,
    pub rows: Vec<SweepRow>,
}

/// Evaluates `model` on prepared targets and noiseless reference.
pub struct SweepRunner<'a> {
    model: &'a IsingModel,
    spec: &'a SweepSpec,
    targets: Vec<usize>,
    noiseless: f64,
}

impl<'a> SweepRunner<'a> {
    pub fn new(model: &'a IsingModel, spec: &'a SweepSpec) -> Result<Self> {
        spec.validate()?;
        let targets = brute_force_ground_states(model)?.indices;
        let state = propagate(model, &spec.anneal, None, &PulseSchedule::empty())?;
        let noiseless = final_fidelity(&state, &targets, &PulseSchedule::empty())?;
        Ok(Self {
            model,
            spec,
            targets,
            noiseless,
        })
    }

    pub fn noiseless_fidelity(&self) -> f64 {
        self.noiseless
    }

    pub fn run_cell(&self, cell: &SweepCell) -> Result<SweepRow> {
        let spec = self.spec;
        let n = self.model.n_spins();
        let schedule = pulse_positions(cell.pulses, spec.anneal.n_steps)?;
        let trace = spec
            .noise
            .trace(cell.amplitude_hz, spec.j_hz, &spec.anneal, n, spec.correlated, cell.seed)?;
        let state = propagate(self.model, &spec.anneal, trace.as_ref(), &schedule)?;
        let fidelity = final_fidelity(&state, &self.targets, &schedule)?.clamp(0.0, 1.0);
        let duration = spec.physical_duration_s();
        Ok(SweepRow {
            amplitude_hz: cell.amplitude_hz,
            pulses: cell.pulses,
            pulses_per_ms: cell.pulses as f64 / (duration * 1e3),
            seed: cell.seed,
            fidelity,
            normalized_fidelity: fidelity / self.noiseless,
            protocol: serde_json::to_value(spec.anneal.protocol)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
            problem: spec.problem.clone(),
            duration,
            spectrum: spec.noise.id(),
        })
    }
}

/// Full factorial sweep over amplitudes × pulse counts × realizations, run
/// in parallel on the current rayon pool. Rows come back in [`SweepSpec::cells`]
/// order and are identical for any thread count.
pub fn dd_sweep(model: &IsingModel, spec: &SweepSpec) -> Result<SweepResult> {
    let runner = SweepRunner::new(model, spec)?;
    let rows = spec
        .cells()
        .par_iter()
        .map(|c| runner.run_cell(c))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        noiseless_fidelity: runner.noiseless,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupSummary {
    pub amplitude_hz: f64,
    pub pulses: usize,
    #[serde(flatten)]
    pub stats: Summary,
}

/// Fidelity statistics per (amplitude, pulse count), sorted by both.
pub fn summarize(rows: &[SweepRow]) -> Result<Vec<GroupSummary>> {
    if rows.is_empty() {
        return Err(Error::InsufficientData("no sweep rows to summarize".into()));
    }
    let mut groups: BTreeMap<(u64, usize), Vec<f64>> = BTreeMap::new();
    for r in rows {
        // non-negative floats order like their bit patterns
        groups
            .entry((r.amplitude_hz.to_bits(), r.pulses))
            .or_default()
            .push(r.fidelity);
    }
    groups
        .into_iter()
        .map(|((bits, pulses), values)| {
            Ok(GroupSummary {
                amplitude_hz: f64::from_bits(bits),
                pulses,
                stats: summarize_values(&values)?,
            })
        })
        .collect()
}
