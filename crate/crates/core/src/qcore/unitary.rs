use nalgebra::DMatrix;

use super::linalg::cmatmul;
use super::state::{check_dims, StateVector};
use crate::numeric::{log2_exact, NumericPolicy};
use crate::{Error, Result, C64};

/// A dense unitary on `2^n` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    entries: DMatrix<C64>,
}

impl UnitaryMatrix {
    /// Validates `U^dagger U = I` in max-entry norm.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        Self::with_policy(entries, &NumericPolicy::DEFAULT)
    }

    pub fn with_policy(entries: DMatrix<C64>, policy: &NumericPolicy) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        log2_exact(rows).ok_or(Error::NotPowerOfTwo(rows))?;
        let u = UnitaryMatrix { entries };
        let max_dev = u.unitarity_defect();
        if max_dev > policy.unitary_tol {
            return Err(Error::NotUnitary { max_dev });
        }
        Ok(u)
    }

    pub(crate) fn from_raw(entries: DMatrix<C64>) -> Self {
        UnitaryMatrix { entries }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        log2_exact(dim).ok_or(Error::NotPowerOfTwo(dim))?;
        Ok(UnitaryMatrix { entries: DMatrix::identity(dim, dim) })
    }

    /// `H^{(x)n}`.
    pub fn hadamard_all(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 14 {
            return Err(Error::invalid(format!("hadamard_all needs 1..=14 qubits, got {n_qubits}")));
        }
        let d = 1usize << n_qubits;
        let s = (d as f64).sqrt().recip();
        let entries = DMatrix::from_fn(d, d, |i, j| {
            let sign = if (i & j).count_ones() % 2 == 0 { s } else { -s };
            C64::new(sign, 0.0)
        });
        Ok(UnitaryMatrix { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        UnitaryMatrix { entries: self.entries.adjoint() }
    }

    /// `self * other`.
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        check_dims(self.dim(), other.dim())?;
        Ok(UnitaryMatrix { entries: cmatmul(&self.entries, &other.entries) })
    }

    /// Max-entry deviation of `U^dagger U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let g = cmatmul(&self.entries.adjoint(), &self.entries);
        let n = g.nrows();
        let mut dev = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                dev = dev.max((g[(i, j)] - target).norm());
            }
        }
        dev
    }

    /// Column `j`, i.e. `U |j>`.
    pub fn column(&self, j: usize) -> Vec<C64> {
        self.entries.column(j).iter().copied().collect()
    }

    /// `U v` on raw amplitudes.
    pub fn apply_slice(&self, v: &[C64]) -> Vec<C64> {
        let m = &self.entries;
        let mut out = vec![C64::new(0.0, 0.0); m.nrows()];
        for (j, &vj) in v.iter().enumerate() {
            if vj == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, &mij) in out.iter_mut().zip(m.column(j).iter()) {
                *o += mij * vj;
            }
        }
        out
    }

    /// `U^dagger v` on raw amplitudes, without forming the adjoint.
    pub fn apply_adjoint_slice(&self, v: &[C64]) -> Vec<C64> {
        let m = &self.entries;
        (0..m.ncols()).map(|j| m.column(j).iter().zip(v).map(|(a, b)| a.conj() * b).sum()).collect()
    }

    /// `U^dagger psi`.
    pub fn apply_adjoint(&self, psi: &StateVector) -> Result<StateVector> {
        check_dims(self.dim(), psi.dim())?;
        Ok(StateVector::from_raw(psi.n_qubits(), self.apply_adjoint_slice(psi.amplitudes())))
    }
}

/// `U psi`.
pub fn apply_unitary(u: &UnitaryMatrix, psi: &StateVector) -> Result<StateVector> {
    check_dims(u.dim(), psi.dim())?;
    Ok(StateVector::from_raw(psi.n_qubits(), u.apply_slice(psi.amplitudes())))
}
