use crate::numeric::{log2_exact, NumericPolicy};
use crate::{Error, Result, C64};

/// A unit vector of `2^n` complex amplitudes.
///
/// Basis index `x` is read with qubit 0 as the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Validates length (a power of two, at least 2) and norm.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::with_policy(amplitudes, &NumericPolicy::DEFAULT)
    }

    pub fn with_policy(amplitudes: Vec<C64>, policy: &NumericPolicy) -> Result<Self> {
        let n_qubits = log2_exact(amplitudes.len()).ok_or(Error::NotPowerOfTwo(amplitudes.len()))?;
        let norm_sq = norm_sq(&amplitudes);
        if (norm_sq - 1.0).abs() > policy.norm_tol {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(StateVector { n_qubits, amplitudes })
    }

    /// Rescales an arbitrary nonzero vector onto the unit sphere.
    pub fn normalize(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = log2_exact(amplitudes.len()).ok_or(Error::NotPowerOfTwo(amplitudes.len()))?;
        let norm = norm_sq(&amplitudes).sqrt();
        if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let inv = 1.0 / norm;
        amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(StateVector { n_qubits, amplitudes })
    }

    /// Builds from real amplitudes, normalizing.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::normalize(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// Skips validation; callers guarantee length and norm.
    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1usize << n_qubits);
        StateVector { n_qubits, amplitudes }
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::invalid(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amplitudes: amps })
    }

    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Equal superposition `H^{(x)n} |0...0>`.
    pub fn uniform(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = C64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(StateVector { n_qubits, amplitudes: vec![a; dim] })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_dims(self.dim(), other.dim())?;
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// `self (x) other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            amps.extend(other.amplitudes.iter().map(|b| a * b));
        }
        StateVector { n_qubits: self.n_qubits + other.n_qubits, amplitudes: amps }
    }

    /// `self (x) |0>^extra`.
    pub fn pad_zeros(&self, extra: usize) -> StateVector {
        let stride = 1usize << extra;
        let mut amps = vec![C64::new(0.0, 0.0); self.dim() * stride];
        for (x, a) in self.amplitudes.iter().enumerate() {
            amps[x * stride] = *a;
        }
        StateVector { n_qubits: self.n_qubits + extra, amplitudes: amps }
    }

    /// `|self><self|` as a density matrix.
    pub fn density(&self) -> crate::qcore::DensityMatrix {
        crate::qcore::DensityMatrix::from_pure(self)
    }

    /// Largest amplitude-wise distance to `other` (no phase alignment).
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

/// `|<psi|tau>|^2`.
pub fn overlap(psi: &StateVector, tau: &StateVector) -> Result<f64> {
    Ok(psi.inner(tau)?.norm_sqr().min(1.0))
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm_sq(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > 30 {
        return Err(Error::invalid(format!("n_qubits must be in 1..=30, got {n_qubits}")));
    }
    Ok(())
}
