//! Dense complex-matrix kernel: arithmetic, Hermitian eigendecomposition,
//! SVD, polar decomposition and positive-power functional calculus.

mod eigen;
mod functional;
mod matrix;
mod polar;
mod svd;
mod tolerance;

pub use eigen::{hermitian_eigen, EigenDecomposition, JACOBI_CONVERGENCE, JACOBI_MAX_SWEEPS};
pub use functional::{is_psd, psd_power, range_projection, PsdCheck};
pub use matrix::{inner, vec_norm, ComplexMatrix, C64};
pub use polar::{polar, PolarParts};
pub use svd::{operator_norm, svd, SingularSpectrum};
pub use tolerance::Tolerance;
