//! Numeric tolerances shared by every validating constructor.

use serde::{Deserialize, Serialize};

/// Tolerances used when validating states, density matrices and unitaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericPolicy {
    /// Allowed deviation of squared norms and traces from 1.
    pub norm_tol: f64,
    /// Allowed max-entry deviation of `U^dagger U` from the identity.
    pub unitary_tol: f64,
    /// Allowed entrywise deviation from Hermiticity.
    pub hermitian_tol: f64,
    /// Eigenvalues above `-psd_floor` count as non-negative.
    pub psd_floor: f64,
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy =
        NumericPolicy { norm_tol: 1e-9, unitary_tol: 1e-8, hermitian_tol: 1e-9, psd_floor: 1e-9 };
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// `Some(k)` when `dim == 2^k` with `k >= 1`.
pub fn log2_exact(dim: usize) -> Option<usize> {
    if dim >= 2 && dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}
