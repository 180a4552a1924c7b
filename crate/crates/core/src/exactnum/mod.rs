//! Exact scalars: rationals, cyclotomic numbers and truncated Puiseux series.

pub mod cyclo;
pub mod puiseux;
pub mod rational;

pub use cyclo::{cyclo_as_rational, cyclo_root, CycloNumber};
pub use puiseux::{puiseux_inv, puiseux_mul, residue, PuiseuxSeries};
pub use rational::{format_rational, int, parse_rational, rat, Rational};
