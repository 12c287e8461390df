//! QUBO and Ising representations and the transformation chain
//! `QUBO → penalty fold → spins → couplings-only (ancilla) → normalized`.

mod enumerate;
mod io;
mod model;
mod qubo;

pub use enumerate::{
    brute_force_ground_states, energies, GroundStates, DEGENERACY_TOLERANCE,
    MAX_ENUMERATION_SPINS,
};
pub use io::ModelDocument;
pub use model::{IsingModel, SpinConfiguration};
pub use qubo::{
    encode_couplings_only, penalty_fold, qubo_to_ising, FoldedQubo, LinearConstraints,
    QuboProblem,
};
