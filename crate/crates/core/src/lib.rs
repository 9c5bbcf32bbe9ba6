pub mod affine;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod fista;
pub mod instances;
pub mod linalg;
pub mod problem;

pub use error::{Error, Result};
