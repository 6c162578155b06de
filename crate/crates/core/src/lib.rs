pub mod error;
pub mod numkernel;
pub mod qform;
pub mod symplectic;
pub mod calculus;
pub mod model;
pub mod oracle;

pub use error::{Error, Result};
pub use num_complex::Complex64;
