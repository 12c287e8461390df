//! Longitudinal-field noise: static Gaussian disorder and time traces drawn
//! from Lorentzian spectra with the approximate frequency-domain method.
//!
//! "Amplitude" always means the standard deviation of the generated values.
//! Traces are generated in whatever unit the amplitude is given in (usually
//! Hz); [`NoiseTrace::in_units_of`] converts them to units of J.

use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::IsingModel;

/// Frequency bins per time step in the frequency-domain method.
pub const OVERSAMPLING: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorentzianPeak {
    /// Hz
    pub center: f64,
    /// Hz
    pub half_width: f64,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpectrum {
    pub peaks: Vec<LorentzianPeak>,
    /// Target standard deviation of the generated trace.
    pub amplitude: f64,
}

impl NoiseSpectrum {
    /// Mains-hum spectrum: a peak at 50 Hz of half-width `γ` and its third
    /// harmonic at 150 Hz of half-width `3γ`, one third as tall.
    pub fn two_peak(gamma: f64, amplitude: f64) -> Result<Self> {
        let spectrum = Self {
            peaks: vec![
                LorentzianPeak { center: 50.0, half_width: gamma, weight: 1.0 },
                LorentzianPeak { center: 150.0, half_width: 3.0 * gamma, weight: 1.0 },
            ],
            amplitude,
        };
        spectrum.validate()?;
        Ok(spectrum)
    }

    pub fn single_peak(center: f64, gamma: f64, amplitude: f64) -> Result<Self> {
        let spectrum = Self {
            peaks: vec![LorentzianPeak { center, half_width: gamma, weight: 1.0 }],
            amplitude,
        };
        spectrum.validate()?;
        Ok(spectrum)
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        Self {
            peaks: self.peaks.clone(),
            amplitude,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.peaks.is_empty() {
            return Err(Error::InvalidParameter("spectrum needs at least one peak".into()));
        }
        for p in &self.peaks {
            if !(p.half_width > 0.0 && p.half_width.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "peak half-width must be positive, got {}",
                    p.half_width
                )));
            }
            if !(p.weight >= 0.0 && p.weight.is_finite() && p.center.is_finite()) {
                return Err(Error::InvalidParameter(format!("invalid peak {p:?}")));
            }
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "amplitude must be non-negative, got {}",
                self.amplitude
            )));
        }
        Ok(())
    }

    /// `S(f) = (1/2π) Σ_k w_k γ_k / ((f − f_k)² + γ_k²)`.
    pub fn density(&self, f: f64) -> f64 {
        self.peaks
            .iter()
            .map(|p| p.weight * p.half_width / ((f - p.center).powi(2) + p.half_width.powi(2)))
            .sum::<f64>()
            / (2.0 * std::f64::consts::PI)
    }
}

/// Per-step, per-qubit longitudinal fields `δh_i(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseTrace {
    /// One column per qubit, each of length `n_steps`.
    columns: Vec<Vec<f64>>,
    /// Step duration in seconds (or whatever time unit generated it).
    pub dt: f64,
    pub correlated: bool,
    pub seed: u64,
}

impl NoiseTrace {
    pub fn zeros(n_steps: usize, n_qubits: usize, dt: f64) -> Self {
        Self {
            columns: vec![vec![0.0; n_steps]; n_qubits],
            dt,
            correlated: true,
            seed: 0,
        }
    }

    pub fn from_columns(columns: Vec<Vec<f64>>, dt: f64) -> Result<Self> {
        let n_steps = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n_steps) {
            return Err(Error::Dimension("trace columns differ in length".into()));
        }
        let correlated = columns.windows(2).all(|w| w[0] == w[1]);
        Ok(Self {
            columns,
            dt,
            correlated,
            seed: 0,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn n_qubits(&self) -> usize {
        self.columns.len()
    }

    pub fn value(&self, step: usize, qubit: usize) -> f64 {
        self.columns[qubit][step]
    }

    pub fn column(&self, qubit: usize) -> &[f64] {
        &self.columns[qubit]
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.iter().all(|&v| v == 0.0))
    }

    /// Divides every value by `unit` (for example J in Hz).
    pub fn in_units_of(&self, unit: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.columns {
            for v in c.iter_mut() {
                *v /= unit;
            }
        }
        out
    }

    /// Audit export: `step,t,qubit,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "step,t,qubit,value")?;
        for step in 0..self.n_steps() {
            for (q, c) in self.columns.iter().enumerate() {
                writeln!(out, "{step},{},{q},{}", step as f64 * self.dt, c[step])?;
            }
        }
        Ok(())
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One realization of length `n_steps` with step `dt`, before amplitude rescaling.
fn frequency_domain_draw(spectrum: &NoiseSpectrum, n_steps: usize, dt: f64, rng: &mut ChaCha20Rng) -> Vec<f64> {
    let m = OVERSAMPLING * n_steps;
    let df = 1.0 / (m as f64 * dt);
    let mut bins = vec![Complex64::new(0.0, 0.0); m];
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    for k in 0..=m / 2 {
        let a = spectrum.density(k as f64 * df).sqrt();
        let self_conjugate = k == 0 || 2 * k == m;
        let z = if self_conjugate {
            Complex64::new(normal(), 0.0)
        } else {
            Complex64::new(normal(), normal()) / std::f64::consts::SQRT_2
        };
        bins[k] = a * z;
        if !self_conjugate {
            bins[m - k] = bins[k].conj();
        }
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut bins);
    bins.truncate(n_steps);
    bins.into_iter().map(|c| c.re).collect()
}

fn rescale_to(values: &mut [f64], amplitude: f64) -> Result<()> {
    if amplitude == 0.0 {
        values.iter_mut().for_each(|v| *v = 0.0);
        return Ok(());
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    if !(std > 0.0) {
        return Err(Error::InvalidParameter(
            "cannot rescale a constant trace; use at least two steps".into(),
        ));
    }
    let factor = amplitude / std;
    values.iter_mut().for_each(|v| *v *= factor);
    Ok(())
}

/// Samples a time trace whose empirical standard deviation equals
/// `spectrum.amplitude`. Correlated traces share one draw (stream 0);
/// uncorrelated traces use ChaCha stream `q` for qubit `q`.
pub fn sample_trace(
    spectrum: &NoiseSpectrum,
    n_steps: usize,
    duration: f64,
    n_qubits: usize,
    correlated: bool,
    seed: u64,
) -> Result<NoiseTrace> {
    spectrum.validate()?;
    if n_steps == 0 || !(duration > 0.0) {
        return Err(Error::InvalidParameter(
            "trace needs a positive duration and at least one step".into(),
        ));
    }
    let dt = duration / n_steps as f64;
    let draw = |stream: u64| -> Result<Vec<f64>> {
        let mut values = frequency_domain_draw(spectrum, n_steps, dt, &mut rng_for(seed, stream));
        rescale_to(&mut values, spectrum.amplitude)?;
        Ok(values)
    };
    let columns = if correlated {
        let shared = draw(0)?;
        vec![shared; n_qubits]
    } else {
        (0..n_qubits as u64).map(draw).collect::<Result<_>>()?
    };
    Ok(NoiseTrace {
        columns,
        dt,
        correlated,
        seed,
    })
}

/// Gaussian draws of standard deviation `sigma`, one per qubit or one shared.
pub fn static_fields(sigma: f64, n_qubits: usize, correlated: bool, rng: &mut impl Rng) -> Vec<f64> {
    if correlated {
        let v: f64 = rng.sample::<f64, _>(StandardNormal) * sigma;
        vec![v; n_qubits]
    } else {
        (0..n_qubits)
            .map(|_| rng.sample::<f64, _>(StandardNormal) * sigma)
            .collect()
    }
}

/// Time-independent disorder held constant over `n_steps` steps.
pub fn static_disorder(
    sigma: f64,
    n_qubits: usize,
    n_steps: usize,
    dt: f64,
    correlated: bool,
    seed: u64,
) -> Result<NoiseTrace> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be non-negative, got {sigma}")));
    }
    let fields = static_fields(sigma, n_qubits, correlated, &mut rng_for(seed, 0));
    Ok(NoiseTrace {
        columns: fields.into_iter().map(|v| vec![v; n_steps]).collect(),
        dt,
        correlated,
        seed,
    })
}

/// Adds independent Gaussian noise to every nonzero coupling; zero entries stay zero.
pub fn perturb_couplings(model: &IsingModel, sigma: f64, rng: &mut impl Rng) -> IsingModel {
    let mut out = model.clone();
    for (i, j, v) in model.couplings() {
        let d: f64 = rng.sample(StandardNormal);
        out.set_coupling(i, j, v + sigma * d);
    }
    out
}

pub fn uncorrelated_coupling_disorder(model: &IsingModel, sigma: f64, seed: u64) -> Result<IsingModel> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be non-negative, got {sigma}")));
    }
    Ok(perturb_couplings(model, sigma, &mut rng_for(seed, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_peak_height_ratio() {
        let s = NoiseSpectrum::two_peak(3.0, 1.0).unwrap();
        let alone = |k: usize| NoiseSpectrum { peaks: vec![s.peaks[k]], amplitude: 1.0 };
        let ratio = alone(0).density(50.0) / alone(1).density(150.0);
        assert!((ratio - 3.0).abs() < 1e-6);
        // closed form at the first peak, including the tail of the second
        let pi2 = 2.0 * std::f64::consts::PI;
        let expected = (1.0 / 3.0 + 9.0 / (100.0f64.powi(2) + 81.0)) / pi2;
        assert!((s.density(50.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn single_peak_maximum() {
        let s = NoiseSpectrum::single_peak(10.0, 3.0, 1.0).unwrap();
        assert!(s.density(10.0) > s.density(9.9));
        assert!(s.density(10.0) > s.density(10.1));
    }

    #[test]
    fn zero_amplitude_is_zero() {
        let s = NoiseSpectrum::two_peak(3.0, 0.0).unwrap();
        let t = sample_trace(&s, 100, 0.1, 2, false, 7).unwrap();
        assert!(t.is_zero());
        assert!(static_disorder(0.0, 3, 10, 0.1, false, 1).unwrap().is_zero());
    }

    #[test]
    fn rejects_invalid_spectra() {
        assert!(NoiseSpectrum::two_peak(0.0, 1.0).is_err());
        assert!(NoiseSpectrum::single_peak(10.0, 3.0, -1.0).is_err());
        let s = NoiseSpectrum::two_peak(3.0, 1.0).unwrap();
        assert!(sample_trace(&s, 0, 0.1, 1, true, 0).is_err());
    }

    #[test]
    fn coupling_disorder_keeps_zero_pattern() {
        let mut m = IsingModel::new(4);
        m.set_coupling(0, 1, 1.0);
        m.set_coupling(2, 3, -0.5);
        let p = uncorrelated_coupling_disorder(&m, 0.3, 11).unwrap();
        assert_eq!(p.coupling(0, 2), 0.0);
        assert_eq!(p.coupling(1, 3), 0.0);
        assert_ne!(p.coupling(0, 1), 1.0);
        assert_eq!(uncorrelated_coupling_disorder(&m, 0.0, 11).unwrap(), m);
    }

    #[test]
    fn csv_export_shape() {
        let t = static_disorder(1.0, 2, 3, 0.5, true, 4).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 3 * 2);
        assert!(text.starts_with("step,t,qubit,value\n0,0,0,"));
    }
}
