//! Electric-vehicle charging schedules through the QAOA pipeline.
//!
//! The crate takes a charging unit with registered cars to a constrained
//! integer program ([`model`]), a penalized binary QUBO ([`convert`]), a
//! Pauli-Z Hamiltonian ([`ising`]) and an exact QAOA statevector ([`sim`]),
//! with a classical outer loop ([`optimize`]), brute-force oracles
//! ([`exact`]), gate accounting and routing ([`hardware`]) and result
//! postprocessing ([`report`]).

pub mod bits;
pub mod convert;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod hardware;
pub mod ising;
pub mod model;
pub mod optimize;
pub mod report;
pub mod sim;

pub use bits::BitOrder;
pub use convert::{Encoding, EncodingScheme, Qubo};
pub use error::{Error, Result};
pub use exact::{ExactSolution, PenaltySearchForm};
pub use hardware::{CouplingMap, GateBudget, ReadoutNoiseModel};
pub use ising::IsingHamiltonian;
pub use model::{Car, ChargingUnit, QuadraticProgram};
pub use optimize::{NelderMeadOptions, OptimizationRun};
pub use report::{Distribution, ExperimentRecord};
pub use sim::{Counts, EnergyMode, QaoaParameters, Statevector};
