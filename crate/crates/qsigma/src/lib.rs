//! Simulation toolkit for the qubit-regularized O(3) sigma model.

pub mod adiabatic;
pub mod compile;
pub mod error;
pub mod exact;
pub mod lattice;
pub mod linalg;
pub mod perturbation;
pub mod rng;
pub mod scalar;
pub mod shadows;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type State32 = exact::LatticeState<f32>;
pub type State64 = exact::LatticeState<f64>;
pub type Spectrum32 = exact::ModelSpectrum<f32>;
pub type Spectrum64 = exact::ModelSpectrum<f64>;
pub type Csr32 = linalg::Csr<f32>;
pub type Csr64 = linalg::Csr<f64>;
pub type CMat32 = linalg::CMat<f32>;
pub type CMat64 = linalg::CMat<f64>;
