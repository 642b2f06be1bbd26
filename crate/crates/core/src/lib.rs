pub mod cli;
pub mod error;
pub mod free_boundary;
pub mod gaussian;
pub mod hermite;
pub mod oracles;
pub mod solution;

pub use error::{Error, Result};
