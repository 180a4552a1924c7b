//! Exact topological recursion on admissible, possibly singular, local
//! spectral curves, together with independent checkers and oracles.

pub mod closedform;
pub mod curve;
pub mod error;
pub mod forms;
pub mod intersect;
pub mod exactnum;
pub mod recursion;
pub mod verify;
pub mod walgebra;

pub use error::{Error, Result};
