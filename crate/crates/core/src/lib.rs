//! Simulation and verification toolkit for extended Wigner's friend arguments.
//!
//! - [`qcore`]: dense qubit states, operators and measurement dilations
//! - [`scenario`]: timed, sited experiment descriptions and their Born tables
//! - [`possibilistic`]: implication chains from zero-probability entries
//! - [`epistemic`]: nested-knowledge forward chaining with a cut table
//! - [`feasibility`]: exact rational LP, Bell-polytope membership, qubit joint measurability

pub mod par;
pub mod fmt;
pub mod epistemic;
pub mod feasibility;
pub mod possibilistic;
pub mod qcore;
pub mod scenario;

pub use par::Exec;
