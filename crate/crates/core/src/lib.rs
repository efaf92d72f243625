pub mod calculus;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod geom;
pub mod io;
pub mod linking;
pub mod sampling;
pub mod selftest;

pub use error::{Error, Result};
