//! Seeded random streams, Haar-random states and unitaries, uniform Cliffords.

mod clifford;
mod haar;
mod rng;

pub use clifford::{random_clifford, CliffordElement, Pauli};
pub use haar::{complex_gaussian, haar_orthogonal_to, haar_state, haar_unitary, TwirlEnsemble};
pub use rng::RngStream;
