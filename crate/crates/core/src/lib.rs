pub mod campaign;
pub mod conjecture;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod norms;
pub mod young;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Tolerance, C64};
