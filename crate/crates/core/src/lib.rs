pub mod capacity;
pub mod eof;
pub mod error;
pub mod examples;
pub mod linalg;
pub mod measures;
pub mod optim;
pub mod quantum;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};

/// Double-precision complex scalar used throughout the quantum layer.
pub type C64 = num_complex::Complex<f64>;
/// Double-precision complex matrix.
pub type CMatrix = linalg::ComplexMatrix<f64>;
