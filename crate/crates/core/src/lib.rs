//! Simulation of the sequential-atom generation of N-photon generalized
//! binomial states in a single-mode cavity, with the dispersive CNOT gate
//! built on them and experimental-feasibility estimates.
//!
//! * [`fock`]: truncated Fock space, binomial and coherent states.
//! * [`jc`]: resonant Jaynes-Cummings evolution and atomic post-selection.
//! * [`protocol`]: interaction-time planning, coefficient recursion,
//!   probabilities and fidelities.
//! * [`gates`]: π dispersive interaction, logical qubit and CNOT.
//! * [`feasibility`]: timing jitter, lifetimes and photon-number bounds.
//! * [`reference`], [`report`]: tabulated reference values and CSV/JSON output.

pub mod feasibility;
pub mod fock;
pub mod gates;
pub mod jc;
pub mod protocol;
pub mod reference;
pub mod report;

pub use fock::{BinomialStateSpec, FockVector};
pub use protocol::{run_protocol, GenerationReport, ProtocolPlan};
