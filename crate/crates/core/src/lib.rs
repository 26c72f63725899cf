pub mod classical;
pub mod error;
pub mod io;
pub mod linalg;

pub use error::{Error, Result};
pub use faer::c64;
pub mod torus;
pub mod spectral;
pub mod measures;
pub mod entropy;
pub mod billiard_quantum;
