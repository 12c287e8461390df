//! Experiment drivers and statistics built on the simulator.

mod collapse;
mod fit;
mod seeds;
mod stability;
mod stats;
mod sweep;

pub use collapse::{collapse_fit, collapse_residual, curve_points, CollapseFit, CurvePoint, EXPONENT_RANGE};
pub use fit::{arctan_fit, exponential_fit, ArctanFit, ExponentialFit};
pub use seeds::derive_seed;
pub use stability::{gs_change_probability, DisorderKind, StabilityPoint, MAX_STABILITY_SPINS};
pub use stats::{mean, median, quartiles, std_dev, summarize_values, Summary};
pub use sweep::{dd_sweep, summarize, GroupSummary, NoiseSource, SweepCell, SweepResult, SweepRow, SweepRunner, SweepSpec};
