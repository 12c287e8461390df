use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Selects every qubit.
pub const GLOBAL: usize = usize::MAX;

/// An instantaneous π pulse about x on the qubits in `mask`, applied right
/// after step `step` (1-based, so `step = n_steps` acts after the last step).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pulse {
    pub step: usize,
    pub mask: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pulses: Vec<Pulse>,
}

impl PulseSchedule {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts by step; pulses sharing a step combine into one mask.
    pub fn from_pulses(mut pulses: Vec<Pulse>) -> Self {
        pulses.sort_by_key(|p| p.step);
        let mut merged: Vec<Pulse> = Vec::with_capacity(pulses.len());
        for p in pulses {
            match merged.last_mut() {
                Some(last) if last.step == p.step => last.mask ^= p.mask,
                _ => merged.push(p),
            }
        }
        merged.retain(|p| p.mask != 0);
        Self { pulses: merged }
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn steps(&self) -> Vec<usize> {
        self.pulses.iter().map(|p| p.step).collect()
    }

    pub fn merge(&self, other: &PulseSchedule) -> Self {
        Self::from_pulses(self.pulses.iter().chain(&other.pulses).copied().collect())
    }

    /// XOR of all masks restricted to `n_qubits`: the net frame change at the end.
    pub fn net_flip(&self, n_qubits: usize) -> usize {
        let all = (1usize << n_qubits) - 1;
        self.pulses.iter().fold(0, |acc, p| acc ^ (p.mask & all))
    }

    pub fn validate(&self, n_steps: usize) -> Result<()> {
        for w in self.pulses.windows(2) {
            if w[1].step <= w[0].step {
                return Err(Error::InvalidParameter("pulse steps must be strictly increasing".into()));
            }
        }
        if let Some(p) = self.pulses.iter().find(|p| p.step == 0 || p.step > n_steps) {
            return Err(Error::InvalidParameter(format!(
                "pulse at step {} outside 1..={n_steps}",
                p.step
            )));
        }
        Ok(())
    }
}

/// `pulse_count` global pulses spread over `n_steps`: a leading block of
/// `⌊n/p⌋` spacings followed by `⌈n/p⌉` spacings, so the last pulse lands on
/// step `n_steps`.
pub fn pulse_positions(pulse_count: usize, n_steps: usize) -> Result<PulseSchedule> {
    if pulse_count > n_steps {
        return Err(Error::InvalidParameter(format!(
            "{pulse_count} pulses do not fit into {n_steps} steps"
        )));
    }
    if pulse_count == 0 {
        return Ok(PulseSchedule::empty());
    }
    let short = n_steps / pulse_count;
    let n_long = n_steps - short * pulse_count;
    let n_short = pulse_count - n_long;
    let mut step = 0;
    let pulses = (0..pulse_count)
        .map(|k| {
            step += if k < n_short { short } else { short + 1 };
            Pulse { step, mask: GLOBAL }
        })
        .collect();
    Ok(PulseSchedule { pulses })
}

/// Spacings between consecutive pulses, starting from step 0.
pub fn spacings(schedule: &PulseSchedule) -> Vec<usize> {
    let mut prev = 0;
    schedule
        .pulses
        .iter()
        .map(|p| {
            let d = p.step - prev;
            prev = p.step;
            d
        })
        .collect()
}

/// One modulation cycle of `interval` steps starting after step `start`:
/// qubit `k` stays unflipped for `Δt₋ = interval·(1 + scale)/2` steps and
/// flipped for the remaining `Δt₊`, so `Δt₋ − Δt₊ = scale·interval` and the
/// couplings `J_ik` act with weight `scale` to first order.
pub fn coupling_modulation_schedule(
    qubit: usize,
    scale: f64,
    start: usize,
    interval: usize,
) -> Result<PulseSchedule> {
    if !(-1.0..=1.0).contains(&scale) {
        return Err(Error::InvalidParameter(format!("modulation scale {scale} outside [-1, 1]")));
    }
    if interval == 0 {
        return Err(Error::InvalidParameter("modulation interval must be positive".into()));
    }
    let minus = (interval as f64 * (1.0 + scale) / 2.0).round() as usize;
    let mask = 1usize << qubit;
    if minus == interval {
        return Ok(PulseSchedule::empty());
    }
    let opening = start + minus;
    if opening == 0 {
        // a pulse before the first step cannot be expressed
        return Err(Error::InvalidParameter(
            "a fully flipped first cycle needs start >= 1".into(),
        ));
    }
    let pulses = vec![
        Pulse { step: opening, mask },
        Pulse { step: start + interval, mask },
    ];
    Ok(PulseSchedule::from_pulses(pulses))
}

/// Repeats the modulation cycle back to back over `n_steps`.
pub fn modulated_schedule(qubit: usize, scale: f64, n_steps: usize, cycles: usize) -> Result<PulseSchedule> {
    if cycles == 0 || n_steps % cycles != 0 {
        return Err(Error::InvalidParameter(format!(
            "{n_steps} steps cannot be split into {cycles} equal cycles"
        )));
    }
    let interval = n_steps / cycles;
    let mut all = PulseSchedule::empty();
    for c in 0..cycles {
        all = all.merge(&coupling_modulation_schedule(qubit, scale, c * interval, interval)?);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_hundred_pulses() {
        let s = pulse_positions(300, 50_000).unwrap();
        let sp = spacings(&s);
        assert_eq!(sp.len(), 300);
        assert_eq!(sp.iter().sum::<usize>(), 50_000);
        let first_long = sp.iter().position(|&d| d == 167).unwrap();
        assert!(sp[..first_long].iter().all(|&d| d == 166));
        assert!(sp[first_long..].iter().all(|&d| d == 167));
    }

    #[test]
    fn four_hundred_pulses_uniform() {
        let sp = spacings(&pulse_positions(400, 50_000).unwrap());
        assert!(sp.iter().all(|&d| d == 125));
    }

    #[test]
    fn zero_and_too_many() {
        assert!(pulse_positions(0, 10).unwrap().is_empty());
        assert!(pulse_positions(11, 10).is_err());
        assert_eq!(pulse_positions(10, 10).unwrap().steps(), (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn same_step_pulses_combine() {
        let s = PulseSchedule::from_pulses(vec![
            Pulse { step: 3, mask: 0b01 },
            Pulse { step: 3, mask: 0b01 },
            Pulse { step: 5, mask: 0b10 },
        ]);
        assert_eq!(s.pulses(), &[Pulse { step: 5, mask: 0b10 }]);
    }

    #[test]
    fn modulation_intervals() {
        let s = coupling_modulation_schedule(1, 0.5, 10, 100).unwrap();
        // unflipped for 75 steps, flipped for 25
        assert_eq!(s.steps(), vec![85, 110]);
        assert!(coupling_modulation_schedule(1, 1.0, 0, 100).unwrap().is_empty());
        assert!(coupling_modulation_schedule(0, 1.5, 0, 100).is_err());
        let full = modulated_schedule(2, 0.0, 100, 5).unwrap();
        assert_eq!(full.len(), 10);
        assert_eq!(full.net_flip(3), 0);
    }
}
