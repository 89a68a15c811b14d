//! Dense states, density matrices, unitaries and the closed-form swap test.

mod density;
mod linalg;
mod state;
mod swap;
mod unitary;

pub use density::{dm_overlap, partial_trace_operator, partial_trace_pair, DensityMatrix, Keep};
pub use linalg::{cmatmul, hermitian_eigen, HermitianEigen};
pub use state::{overlap, StateVector};
pub use swap::{swap_test_exact, swap_test_probability};
pub use unitary::{apply_unitary, UnitaryMatrix};
