//! Monte Carlo estimate of how often disorder changes the ground state.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::seeds::derive_seed;
use crate::error::{Error, Result};
use crate::ising::{brute_force_ground_states, IsingModel};
use crate::noise::{perturb_couplings, static_fields};

/// Largest model accepted by [`gs_change_probability`].
pub const MAX_STABILITY_SPINS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisorderKind {
    /// One Gaussian field shared by every spin.
    LocalCorrelated,
    /// Independent Gaussian field per spin.
    LocalUncorrelated,
    /// Independent Gaussian shift of every nonzero coupling.
    CouplingUncorrelated,
    /// All nonzero couplings multiplied by a shared factor `1 + σ·ξ`.
    CouplingCorrelated,
}

impl DisorderKind {
    pub const ALL: [DisorderKind; 4] = [
        DisorderKind::LocalCorrelated,
        DisorderKind::LocalUncorrelated,
        DisorderKind::CouplingUncorrelated,
        DisorderKind::CouplingCorrelated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DisorderKind::LocalCorrelated => "local-correlated",
            DisorderKind::LocalUncorrelated => "local-uncorrelated",
            DisorderKind::CouplingUncorrelated => "coupling-uncorrelated",
            DisorderKind::CouplingCorrelated => "coupling-correlated",
        }
    }

    fn apply(self, model: &IsingModel, sigma: f64, rng: &mut ChaCha20Rng) -> Result<IsingModel> {
        let n = model.n_spins();
        match self {
            DisorderKind::LocalCorrelated | DisorderKind::LocalUncorrelated => {
                let shifts = static_fields(sigma, n, self == DisorderKind::LocalCorrelated, rng);
                let fields = model.fields().iter().zip(shifts).map(|(h, d)| h + d).collect();
                model.clone().with_fields(fields)
            }
            DisorderKind::CouplingUncorrelated => Ok(perturb_couplings(model, sigma, rng)),
            DisorderKind::CouplingCorrelated => {
                let factor = 1.0 + static_fields(sigma, 1, true, rng)[0];
                let mut out = model.clone();
                for (i, j, v) in model.couplings() {
                    out.set_coupling(i, j, v * factor);
                }
                Ok(out)
            }
        }
    }
}

impl std::str::FromStr for DisorderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown disorder kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityPoint {
    /// Disorder strength in units of the model's couplings.
    pub sigma: f64,
    pub probability: f64,
    /// Binomial standard error `sqrt(p(1 − p)/n)`.
    pub std_error: f64,
}

/// Fraction of disorder draws whose ground states are not all ground states
/// of the clean model. Lifting a degeneracy (keeping a subset) does not count
/// as a change. Draw `k` at grid index `g` uses seed
/// `derive_seed(seed, [g, k])`, so results do not depend on thread count.
pub fn gs_change_probability(
    model: &IsingModel,
    kind: DisorderKind,
    sigmas: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<StabilityPoint>> {
    if model.n_spins() > MAX_STABILITY_SPINS {
        return Err(Error::TooManySpins {
            n: model.n_spins(),
            limit: MAX_STABILITY_SPINS,
        });
    }
    if n_samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    if let Some(s) = sigmas.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
        return Err(Error::InvalidParameter(format!("sigma must be non-negative, got {s}")));
    }
    let clean = brute_force_ground_states(model)?;
    sigmas
        .iter()
        .enumerate()
        .map(|(g, &sigma)| {
            let changed = (0..n_samples)
                .into_par_iter()
                .map(|k| -> Result<usize> {
                    let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(seed, &[g as u64, k as u64]));
                    let perturbed = kind.apply(model, sigma, &mut rng)?;
                    let gs = brute_force_ground_states(&perturbed)?;
                    Ok(usize::from(!gs.is_subset_of(&clean)))
                })
                .sum::<Result<usize>>()?;
            let p = changed as f64 / n_samples as f64;
            Ok(StabilityPoint {
                sigma,
                probability: p,
                std_error: (p * (1.0 - p) / n_samples as f64).sqrt(),
            })
        })
        .collect()
}
