use crate::qcore::{dm_overlap, swap_test_exact, DensityMatrix, StateVector};
use crate::{Error, Result};

/// A register state the distillation loop can pair up.
pub trait DistillRegister: Clone + Send + Sync {
    /// What overlaps are measured against.
    type Target: Sync + ?Sized;

    /// Qubits held by the register, used for the automatic round count.
    fn n_qubits(&self) -> usize;

    /// Outcome-0 probability of the swap test and the post-selected state.
    fn swap(&self, other: &Self) -> Result<(f64, Self)>;

    /// Overlap with the target.
    fn overlap(&self, target: &Self::Target) -> Result<f64>;
}

impl DistillRegister for DensityMatrix {
    type Target = StateVector;

    fn n_qubits(&self) -> usize {
        DensityMatrix::n_qubits(self)
    }

    fn swap(&self, other: &Self) -> Result<(f64, Self)> {
        swap_test_exact(self, other)
    }

    fn overlap(&self, target: &StateVector) -> Result<f64> {
        dm_overlap(self, target)
    }
}

/// A register whose component orthogonal to the target never overlaps any other
/// register's.
///
/// When the noise supports of two registers are disjoint, `tr(rho1 rho2) = a1 a2`, and the
/// post-selected state again has noise disjoint from every untouched register. The whole
/// procedure is then determined by the scalar overlaps:
/// `p = (1 + a1 a2) / 2` and `a' = (a1 + a2 + 2 a1 a2) / (2 (1 + a1 a2))`.
/// This makes registers of any dimension (and any count) cheap to simulate exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalNoiseRegister {
    n_qubits: usize,
    overlap: f64,
}

impl OrthogonalNoiseRegister {
    pub fn new(n_qubits: usize, overlap: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&overlap) {
            return Err(Error::invalid(format!("overlap must lie in [0, 1], got {overlap}")));
        }
        if n_qubits == 0 {
            return Err(Error::invalid("register needs at least one qubit"));
        }
        Ok(OrthogonalNoiseRegister { n_qubits, overlap })
    }

    pub fn value(&self) -> f64 {
        self.overlap
    }
}

impl DistillRegister for OrthogonalNoiseRegister {
    type Target = ();

    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn swap(&self, other: &Self) -> Result<(f64, Self)> {
        let (a1, a2) = (self.overlap, other.overlap);
        let prod = a1 * a2;
        let p = (1.0 + prod) / 2.0;
        let next = ((a1 + a2 + 2.0 * prod) / (2.0 * (1.0 + prod))).clamp(0.0, 1.0);
        Ok((p, OrthogonalNoiseRegister { n_qubits: self.n_qubits, overlap: next }))
    }

    fn overlap(&self, _target: &()) -> Result<f64> {
        Ok(self.overlap)
    }
}

/// `sqrt(a) |tau> + sqrt(1 - a) |noise>` for a unit `noise` orthogonal to `tau`.
pub fn mix_with_target(tau: &StateVector, noise: &StateVector, a: f64) -> Result<StateVector> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::invalid(format!("overlap must lie in [0, 1], got {a}")));
    }
    if tau.dim() != noise.dim() {
        return Err(Error::DimensionMismatch { expected: tau.dim(), found: noise.dim() });
    }
    let (s, c) = (a.sqrt(), (1.0 - a).sqrt());
    let amps = tau.amplitudes().iter().zip(noise.amplitudes()).map(|(t, e)| t * s + e * c).collect();
    StateVector::normalize(amps)
}
