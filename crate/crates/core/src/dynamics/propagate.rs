use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::schedule::PulseSchedule;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::ising::{energies, IsingModel, MAX_ENUMERATION_SPINS};
use crate::noise::NoiseTrace;

pub const DEFAULT_STEPS: usize = 50_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    /// Fields absorbed into an ancilla; global flips commute with the cost term.
    #[default]
    CouplingsOnly,
    /// Problem fields kept as fields; every pulse negates the fields of the
    /// flipped qubits so the cost term stays invariant in the toggling frame.
    LocalFieldsWithSignFlips,
    /// Couplings-only cost term with per-qubit pulse pairs that rescale
    /// selected couplings.
    CouplingModulation,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ramp {
    /// `C(t) = 1 − t/T`
    #[default]
    Linear,
}

impl Ramp {
    pub fn value(self, t: f64, duration: f64) -> f64 {
        match self {
            Ramp::Linear => 1.0 - t / duration,
        }
    }

    /// `−dC/dt`
    pub fn slope(self, _t: f64, duration: f64) -> f64 {
        match self {
            Ramp::Linear => 1.0 / duration,
        }
    }
}

/// Annealing parameters in units where the largest coupling is 1 (ħ = 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    /// Sweep duration in units of 1/J.
    pub duration: f64,
    #[serde(default = "default_steps")]
    pub n_steps: usize,
    /// Transverse field `h_x` in units of J.
    pub hx: f64,
    #[serde(default)]
    pub protocol: Protocol,
    #[serde(default)]
    pub ramp: Ramp,
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

impl AnnealConfig {
    pub fn new(duration: f64, hx: f64) -> Self {
        Self {
            duration,
            n_steps: DEFAULT_STEPS,
            hx,
            protocol: Protocol::default(),
            ramp: Ramp::default(),
        }
    }

    pub fn with_steps(mut self, n_steps: usize) -> Self {
        self.n_steps = n_steps;
        self
    }

    pub fn with_protocol(mut self, protocol: Protocol) -> Self {
        self.protocol = protocol;
        self
    }

    pub fn dt(&self) -> f64 {
        self.duration / self.n_steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        if !(self.hx > 0.0 && self.hx.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "driver strength must be positive, got {}",
                self.hx
            )));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidParameter("need at least one time step".into()));
        }
        Ok(())
    }
}

/// Entry `b` of `table` becomes `Π_i exp(−i f_i s_i(b) θ)`, built by
/// doubling in `2ⁿ` multiplications.
fn field_phases(fields: &[f64], theta: f64, table: &mut [Complex64]) {
    let up: Complex64 = fields
        .iter()
        .map(|&f| Complex64::from_polar(1.0, -f * theta))
        .product();
    table[0] = up;
    for (i, &f) in fields.iter().enumerate() {
        // s_i: +1 → −1 multiplies the phase by exp(+2i f θ)
        let ratio = Complex64::from_polar(1.0, 2.0 * f * theta);
        let half = 1usize << i;
        for b in 0..half {
            table[b | half] = table[b] * ratio;
        }
    }
}

/// `exp(+i θ σˣ_q)` on every qubit.
fn driver_rotation(amps: &mut [Complex64], n_qubits: usize, theta: f64) {
    let (s, c) = theta.sin_cos();
    let is = Complex64::new(0.0, s);
    for q in 0..n_qubits {
        let bit = 1usize << q;
        for b in 0..amps.len() {
            if b & bit == 0 {
                let a0 = amps[b];
                let a1 = amps[b | bit];
                amps[b] = c * a0 + is * a1;
                amps[b | bit] = is * a0 + c * a1;
            }
        }
    }
}

/// Evolves the uniform superposition under
/// `H(t) = Σ J_ij σᶻσᶻ + Σ (±h_i + δh_i(t)) σᶻ_i − C(t) h_x Σ σˣ_i`
/// with one symmetric split step per time step (diagonal half, driver at
/// the step midpoint, diagonal half) and instantaneous pulses between steps.
/// `observe` is called after every step and its pulses, with the 1-based step.
pub fn propagate_observed(
    model: &IsingModel,
    config: &AnnealConfig,
    noise: Option<&NoiseTrace>,
    schedule: &PulseSchedule,
    mut observe: impl FnMut(usize, &StateVector),
) -> Result<StateVector> {
    config.validate()?;
    let n = model.n_spins();
    if n > MAX_ENUMERATION_SPINS {
        return Err(Error::TooManySpins {
            n,
            limit: MAX_ENUMERATION_SPINS,
        });
    }
    if config.protocol != Protocol::LocalFieldsWithSignFlips && model.has_fields() {
        return Err(Error::InvalidParameter(
            "couplings-only protocols need a model without local fields".into(),
        ));
    }
    if let Some(trace) = noise {
        if trace.n_steps() != config.n_steps || trace.n_qubits() != n {
            return Err(Error::Dimension(format!(
                "noise trace is {}x{}, expected {}x{}",
                trace.n_steps(),
                trace.n_qubits(),
                config.n_steps,
                n
            )));
        }
    }
    schedule.validate(config.n_steps)?;
    if config.protocol != Protocol::CouplingModulation {
        let all = (1usize << n) - 1;
        if schedule.pulses().iter().any(|p| p.mask & all != all) {
            return Err(Error::InvalidParameter(
                "only the coupling-modulation protocol accepts partial pulses".into(),
            ));
        }
    }

    let dt = config.dt();
    let half = dt / 2.0;
    let mut couplings_only = model.clone();
    couplings_only.set_fields(vec![0.0; n])?;
    couplings_only.set_offset(0.0);
    let base: Vec<Complex64> = energies(&couplings_only)?
        .into_iter()
        .map(|e| Complex64::from_polar(1.0, -e * half))
        .collect();

    let mut state = StateVector::uniform(n);
    let mut signs = vec![1.0; n];
    let mut fields = vec![0.0; n];
    let mut table = vec![Complex64::new(0.0, 0.0); 1 << n];
    let noisy = noise.is_some_and(|t| !t.is_zero());
    let mut pulses = schedule.pulses().iter().peekable();

    let diagonal_fields = model.has_fields() || noisy;
    for k in 0..config.n_steps {
        if diagonal_fields {
            for (i, f) in fields.iter_mut().enumerate() {
                *f = signs[i] * model.fields()[i] + noise.map_or(0.0, |t| t.value(k, i));
            }
            field_phases(&fields, half, &mut table);
        }
        let apply_diagonal = |amps: &mut [Complex64]| {
            if diagonal_fields {
                for ((a, p), f) in amps.iter_mut().zip(&base).zip(&table) {
                    *a *= p * f;
                }
            } else {
                for (a, p) in amps.iter_mut().zip(&base) {
                    *a *= p;
                }
            }
        };
        let t_mid = (k as f64 + 0.5) * dt;
        let c = config.ramp.value(t_mid, config.duration);
        apply_diagonal(state.amplitudes_mut());
        driver_rotation(state.amplitudes_mut(), n, c * config.hx * dt);
        apply_diagonal(state.amplitudes_mut());

        while let Some(p) = pulses.next_if(|p| p.step == k + 1) {
            state.flip(p.mask);
            for (i, s) in signs.iter_mut().enumerate() {
                if p.mask >> i & 1 == 1 {
                    *s = -*s;
                }
            }
        }
        observe(k + 1, &state);
    }
    Ok(state)
}

pub fn propagate(
    model: &IsingModel,
    config: &AnnealConfig,
    noise: Option<&NoiseTrace>,
    schedule: &PulseSchedule,
) -> Result<StateVector> {
    propagate_observed(model, config, noise, schedule, |_, _| {})
}

/// Probability of ending in one of `targets`, read out in the frame left by
/// the schedule (a net flip mask `F` maps target `t` to `t ^ F`).
pub fn final_fidelity(state: &StateVector, targets: &[usize], schedule: &PulseSchedule) -> Result<f64> {
    let frame = schedule.net_flip(state.n_qubits());
    let shifted: Vec<usize> = targets.iter().map(|&t| t ^ frame).collect();
    super::state::fidelity(state, &shifted)
}
