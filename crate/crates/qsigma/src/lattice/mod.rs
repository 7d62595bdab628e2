//! Lattice model: encoding, geometry, Hamiltonian, symmetries and the
//! two-site structure.

pub mod cg;
pub mod encoding;
pub mod export;
pub mod geometry;
pub mod hamiltonian;
pub mod noether;
pub mod params;
pub mod sector;
pub mod symmetry;
pub mod truncation;
pub mod two_site;

pub use encoding::{SiteEncoding, SiteLabel};
pub use geometry::{Boundary, Lattice, Link, LinkClass};
pub use hamiltonian::{build_hamiltonian, build_terms, SplitHamiltonian, Terms, DEFAULT_DIM_CAP};
pub use params::ModelParams;
pub use sector::{SectorBasis, SectorSpec};
pub use symmetry::SymmetryOps;
pub use two_site::{build_general_two_site, two_site_blocks, GeneralCouplings, TwoSiteBlocks};
