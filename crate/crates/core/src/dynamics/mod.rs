//! State-vector annealing with noise and dynamical-decoupling pulses.

mod magnus;
mod propagate;
mod schedule;
mod state;

pub use magnus::{
    cost_operator, evolve, exact_cycle_propagator, hamiltonian, magnus_effective_generator,
    operator_norm, sigma_x, sigma_y, sigma_z, time_ordered_propagator, Operator,
};
pub use propagate::{
    final_fidelity, propagate, propagate_observed, AnnealConfig, Protocol, Ramp, DEFAULT_STEPS,
};
pub use schedule::{
    coupling_modulation_schedule, modulated_schedule, pulse_positions, spacings, Pulse,
    PulseSchedule, GLOBAL,
};
pub use state::{apply_global_flip, fidelity, StateVector};
