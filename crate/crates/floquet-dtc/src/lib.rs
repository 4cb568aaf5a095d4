//! Floquet dynamics of kicked Ising and kicked CZ circuits on small 2D lattices.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`] builds bond graphs, gate layers and ancilla groups.
//! * [`circuit`] turns a lattice into one Floquet cycle and realises the
//!   ancilla sign-flip noise on it.
//! * [`statevector`] evolves dense states and evaluates Pauli expectations
//!   and out-of-time-ordered correlators.
//! * [`ensemble`] averages trajectories into time series with error bars.
//! * [`calibration`], [`mitigation`] and [`fitting`] handle the noise-rate
//!   conversions, depolarizing normalisation and exponential decay fits.
//! * [`theory`] verifies the exact operator identities on dense matrices.
//! * [`config`] and [`cli`] drive runs from JSON documents.

pub mod calibration;
pub mod circuit;
pub mod cli;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod fitting;
pub mod lattice;
pub mod mitigation;
pub mod output;
pub mod statevector;
pub mod sum;
pub mod theory;

pub use error::{Error, Result};
