use num_complex::Complex64;

use crate::error::{Error, Result};

/// Computational-basis wavefunction; bit `i` of the index is qubit `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|+⟩^{⊗n}`, the ground state of `−h_x Σ σˣ`.
    pub fn uniform(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            n_qubits,
            amplitudes: vec![a; dim],
        }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "state length {dim} is not a power of two"
            )));
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// Applies `Π_{i ∈ mask} σˣ_i`: amplitude at `b` moves to `b ^ mask`.
    pub fn flip(&mut self, mask: usize) {
        let mask = mask & (self.amplitudes.len() - 1);
        if mask == 0 {
            return;
        }
        for b in 0..self.amplitudes.len() {
            let partner = b ^ mask;
            if b < partner {
                self.amplitudes.swap(b, partner);
            }
        }
    }
}

/// Global spin flip `Π_i σˣ_i`, mapping basis index `b` to its complement.
pub fn apply_global_flip(state: &mut StateVector) {
    let mask = (1usize << state.n_qubits) - 1;
    state.flip(mask);
}

/// Total probability on the listed basis states.
pub fn fidelity(state: &StateVector, targets: &[usize]) -> Result<f64> {
    if targets.is_empty() {
        return Err(Error::InvalidParameter("fidelity needs at least one target state".into()));
    }
    let dim = state.amplitudes.len();
    if let Some(&t) = targets.iter().find(|&&t| t >= dim) {
        return Err(Error::Dimension(format!("target {t} outside {dim}-dimensional space")));
    }
    Ok(targets.iter().map(|&t| state.probability(t)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn global_flip_examples() {
        let mut s = StateVector::basis(3, 0);
        apply_global_flip(&mut s);
        assert_eq!(s, StateVector::basis(3, 0b111));

        let mut u = StateVector::uniform(4);
        apply_global_flip(&mut u);
        assert_eq!(u, StateVector::uniform(4));
    }

    #[test]
    fn fidelity_examples() {
        let s = StateVector::basis(3, 5);
        assert_eq!(fidelity(&s, &[5, 2]).unwrap(), 1.0);
        let u = StateVector::uniform(5);
        assert!((fidelity(&u, &[3, 28]).unwrap() - 2.0 / 32.0).abs() < 1e-15);
        assert!(fidelity(&u, &[]).is_err());
        assert!(fidelity(&u, &[32]).is_err());
    }

    #[test]
    fn partial_flip() {
        let mut s = StateVector::basis(3, 0b001);
        s.flip(0b011);
        assert_eq!(s, StateVector::basis(3, 0b010));
    }
}
