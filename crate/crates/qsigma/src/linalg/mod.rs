//! Generic dense and sparse linear algebra used by every module.

pub mod eigen;
pub mod krylov;
pub mod lanczos;
pub mod mat;
pub mod sparse;

pub use eigen::{
    expm_hermitian, herm_eigen, herm_eigenvalues, herm_norm, herm_trace_norm, psd_sqrt, sym_eigen,
    tridiagonal_eigen, HermEigen, SymEigen,
};
pub use krylov::expm_krylov;
pub use lanczos::{lanczos, LanczosOptions, LanczosResult};
pub use mat::{CMat, Mat};
pub use sparse::{Csr, LinearOperator, ShiftedSum};
