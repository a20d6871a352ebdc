//! Lee-Yang zeros of ferromagnetic Ising partition functions on finite
//! graphs, their certified extraction, and their trajectories under a
//! single varying coupling.

pub mod dynamics;
pub mod graph;
pub mod partition;
pub mod real;
pub mod scenarios;
pub mod trigpoly;
pub mod verify;

pub use graph::{CouplingGraph, GraphError};
pub use partition::{MagnetizationWeights, PartitionError};
pub use real::{Precision, Real};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
