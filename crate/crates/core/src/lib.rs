//! Dense state-vector simulation and training engine for the data
//! re-uploading quantum classifier on one or two qubits.
//!
//! The crate is split along the pipeline the playground runs:
//!
//! * [`qstate`]: states, gates, probabilities, fidelity and concurrence.
//! * [`model`]: classifier architecture, target states and forward passes.
//! * [`train`]: losses, reverse-mode gradients, Adam and the epoch loop.
//! * [`datasets`]: seeded 2D toy datasets with closed-form labels.
//! * [`geometry`]: Bloch / Q-simplex coordinates and decision grids.

pub mod datasets;
pub mod error;
pub mod geometry;
pub mod model;
pub mod qstate;
pub mod train;

pub use error::{Error, Result};
