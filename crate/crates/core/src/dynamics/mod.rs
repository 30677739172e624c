//! Time-dependent propagation after sudden donor excitation: the
//! nonequilibrium FRET rate kernels with their population master equation,
//! and the coherent (polaron-frame, second-order time-local) density-matrix
//! propagation.

mod cret;
mod fret;
mod kernel;
mod trajectory;

pub use cret::*;
pub use fret::*;
pub use kernel::*;
pub use trajectory::*;
