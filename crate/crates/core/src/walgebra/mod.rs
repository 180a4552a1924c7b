//! The algebraic side: Psi coefficients of twisted modes and the
//! normal-form recursion for single-cycle Airy structures, used as an
//! independent pipeline against the residue engine.

mod oracle;
mod psi;

pub use oracle::{airy_oracle_d1, ModeCoefficientTable, ORACLE_COMPONENT};
pub use psi::{psi, psi_closed, psi_direct};
