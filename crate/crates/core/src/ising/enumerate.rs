use rayon::prelude::*;

use super::{IsingModel, SpinConfiguration};
use crate::error::{Error, Result};

/// Largest model that [`brute_force_ground_states`] will enumerate.
pub const MAX_ENUMERATION_SPINS: usize = 24;

/// Relative tie tolerance, measured against the spread `max E − min E`.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

const CHUNK_BITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct GroundStates {
    pub energy: f64,
    /// Basis indices of all minimizing configurations, ascending.
    pub indices: Vec<usize>,
    pub n_spins: usize,
}

impl GroundStates {
    pub fn states(&self) -> Vec<SpinConfiguration> {
        self.indices
            .iter()
            .map(|&i| SpinConfiguration::from_index(i, self.n_spins))
            .collect()
    }

    pub fn degeneracy(&self) -> usize {
        self.indices.len()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// True if every ground state of `self` is also a ground state of `other`.
    pub fn is_subset_of(&self, other: &GroundStates) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }
}

/// Visits every configuration of one chunk (fixed high bits) in Gray-code
/// order, updating the energy incrementally. The chunk's first energy is
/// evaluated directly so rounding does not accumulate across chunks.
fn visit_chunk(model: &IsingModel, chunk: usize, low_bits: usize, mut visit: impl FnMut(usize, f64)) {
    let n = model.n_spins();
    let base = chunk << low_bits;
    let mut spins: Vec<f64> = (0..n)
        .map(|i| if base >> i & 1 == 0 { 1.0 } else { -1.0 })
        .collect();
    let mut energy = model
        .energy(&SpinConfiguration::from_index(base, n))
        .expect("length matches");
    let mut local: Vec<f64> = (0..n).map(|k| model.local_field(k, &spins)).collect();
    visit(base, energy);
    for step in 1usize..(1 << low_bits) {
        let k = step.trailing_zeros() as usize;
        let old = spins[k];
        energy -= 2.0 * old * local[k];
        spins[k] = -old;
        for (j, lf) in local.iter_mut().enumerate() {
            if j != k {
                *lf -= 2.0 * model.coupling(j, k) * old;
            }
        }
        let gray = step ^ (step >> 1);
        visit(base | gray, energy);
    }
}

fn chunk_layout(n: usize) -> (usize, usize) {
    let low = n.min(CHUNK_BITS);
    (low, 1usize << (n - low))
}

/// Energies of all `2ⁿ` basis states, indexed by basis index.
pub fn energies(model: &IsingModel) -> Result<Vec<f64>> {
    let n = model.n_spins();
    if n > MAX_ENUMERATION_SPINS {
        return Err(Error::TooManySpins {
            n,
            limit: MAX_ENUMERATION_SPINS,
        });
    }
    let (low, _) = chunk_layout(n);
    let mut out = vec![0.0; 1 << n];
    out.par_chunks_mut(1 << low)
        .enumerate()
        .for_each(|(chunk, slice)| {
            visit_chunk(model, chunk, low, |idx, e| slice[idx & ((1 << low) - 1)] = e);
        });
    Ok(out)
}

/// Exhaustive search for the global minimum and every configuration
/// attaining it within `DEGENERACY_TOLERANCE · (max − min)`.
pub fn brute_force_ground_states(model: &IsingModel) -> Result<GroundStates> {
    let n = model.n_spins();
    if n > MAX_ENUMERATION_SPINS {
        return Err(Error::TooManySpins {
            n,
            limit: MAX_ENUMERATION_SPINS,
        });
    }
    let (low, chunks) = chunk_layout(n);
    let (min, max) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            visit_chunk(model, c, low, |_, e| {
                lo = lo.min(e);
                hi = hi.max(e);
            });
            (lo, hi)
        })
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |a, b| (a.0.min(b.0), a.1.max(b.1)),
        );
    let threshold = min + DEGENERACY_TOLERANCE * (max - min);
    let mut indices: Vec<usize> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut hits = Vec::new();
            visit_chunk(model, c, low, |idx, e| {
                if e <= threshold {
                    hits.push(idx);
                }
            });
            hits
        })
        .collect();
    indices.sort_unstable();
    Ok(GroundStates {
        energy: min,
        indices,
        n_spins: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ferromagnet_pair() {
        let mut m = IsingModel::new(2);
        m.set_coupling(0, 1, -1.0);
        let gs = brute_force_ground_states(&m).unwrap();
        assert_eq!(gs.energy, -1.0);
        assert_eq!(gs.indices, vec![0, 3]);
    }

    #[test]
    fn energies_match_direct_evaluation() {
        // 14 spins exercises more than one chunk
        let n = 14;
        let mut m = IsingModel::new(n);
        for i in 0..n {
            for j in (i + 1)..n {
                m.set_coupling(i, j, ((i * 7 + j * 3) % 11) as f64 / 5.0 - 1.0);
            }
        }
        m.set_fields((0..n).map(|i| (i as f64 * 0.37).sin()).collect()).unwrap();
        m.set_offset(0.5);
        let all = energies(&m).unwrap();
        for idx in (0..1 << n).step_by(97) {
            let direct = m.energy(&SpinConfiguration::from_index(idx, n)).unwrap();
            assert!((all[idx] - direct).abs() < 1e-10, "idx {idx}");
        }
    }

    #[test]
    fn zero_model_is_fully_degenerate() {
        let gs = brute_force_ground_states(&IsingModel::new(3)).unwrap();
        assert_eq!(gs.degeneracy(), 8);
    }

    #[test]
    fn size_limit() {
        let m = IsingModel::new(MAX_ENUMERATION_SPINS + 1);
        assert!(matches!(
            brute_force_ground_states(&m),
            Err(Error::TooManySpins { .. })
        ));
    }

    #[test]
    fn decoupled_ancilla_doubles_degeneracy() {
        let mut m = IsingModel::new(3);
        m.set_coupling(0, 1, 1.0);
        m.set_coupling(1, 2, 1.0);
        let base = brute_force_ground_states(&m).unwrap();
        let quad = brute_force_ground_states(&m.quadratize_with_ancilla()).unwrap();
        assert_eq!(quad.degeneracy(), 2 * base.degeneracy());
    }
}
