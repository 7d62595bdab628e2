//! Exact linear algebra on the lattice model: ground states, gaps, exact
//! time evolution and fidelities.

pub mod evolve;
pub mod spectrum;
pub mod state;

pub use evolve::{evolve_exact, ExactPropagator};
pub use spectrum::{ground_state, model_spectrum, ModelSpectrum, SolverOptions, SolverPath, SpectrumSlice};
pub use state::{fidelity, LatticeState};
