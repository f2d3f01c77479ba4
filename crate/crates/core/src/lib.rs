//! Simulation of quantum gates on mesoscopic atomic-ensemble ("superatom")
//! qubits under perfect Rydberg blockade, with STIRAP-based gate pulse
//! sequences, state/process tomography and maximum-likelihood reconstruction.

pub mod basis;
pub mod error;
pub mod experiment;
pub mod gates;
pub mod integrator;
pub mod io;
pub mod levels;
pub mod linalg;
pub mod logical;
pub mod mle;
pub mod propagator;
pub mod pulse;
pub mod states;
pub mod tomo;
pub mod units;

pub use basis::{
    build_basis, build_basis_with_sink, build_shared_basis, build_shared_basis_with_sink,
    BlockadedBasis,
};
pub use error::{Error, Result};
pub use levels::{Level, LevelScheme};
pub use states::{DensityMatrix, Operator, StateVector};
