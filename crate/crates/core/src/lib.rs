//! Analysis of finite linear reaction networks.
//!
//! A network is a set of states with first-order reaction rates between them.
//! Its Markovian generator `A` (column convention: `A[k][i]` is the rate of
//! `i -> k`) drives `dn/dt = A n`. This crate decides detailed balance and
//! pathwise detailed balance, computes response functions exactly and by
//! stochastic simulation, finds the cut-vertex topology under which pathwise
//! detailed balance survives perturbation, and runs the constructive
//! perturbation probe that exposes fine-tuned pathwise detailed balance.
//!
//! Module map:
//! - [`netmodel`]: network data model, file format, generator construction and validation.
//! - [`numerics`]: dense linear algebra, steady states, uniformized matrix exponential.
//! - [`balance`]: detailed balance, symmetrization, spanning-tree energy vectors, sources/sinks.
//! - [`pathwise`]: the `Δ_n` series, pathwise detailed balance and the walk-sum oracle.
//! - [`topology`]: support graph, cut vertices, paths through a prescribed edge.
//! - [`stability`]: DB-preserving perturbations, the instability probe, class sampling.
//! - [`stochastic`]: trajectory simulation and Monte Carlo response estimates.
//! - [`cli`]: the `dbnet` command-line driver.
//! - [`netgen`]: random network families used by tests and examples.

pub mod balance;
pub mod cli;
pub mod error;
pub mod netgen;
pub mod netmodel;
pub mod numerics;
pub mod pathwise;
pub mod stability;
pub mod stochastic;
pub mod tol;
pub mod topology;

pub use error::{Error, Result};
pub use netmodel::{ClassAnnotation, CompartmentSpec, Generator, Network, Pair, Rate};
pub use numerics::{Propagator, SteadyState};
