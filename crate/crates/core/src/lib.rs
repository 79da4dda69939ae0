pub mod engine;
pub mod error;
pub mod quad;
pub mod scenarios;
pub mod cheb;
pub mod contour;
pub mod operators;
pub mod testfn;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
