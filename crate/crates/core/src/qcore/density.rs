use std::sync::OnceLock;

use nalgebra::DMatrix;

use super::linalg::hermitian_eigen;
use super::state::{check_dims, StateVector};
use crate::numeric::{log2_exact, NumericPolicy};
use crate::{Error, Result, C64};

/// A Hermitian positive semidefinite matrix, normally of unit trace.
///
/// Pure states remember their vector: products against them take an `O(d^2)` route, and
/// the dense matrix is only built when something asks for it.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    entries: OnceLock<DMatrix<C64>>,
    normalized: bool,
    pure: Option<StateVector>,
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.matrix() == other.matrix() && self.normalized == other.normalized
    }
}

fn dense(entries: DMatrix<C64>) -> OnceLock<DMatrix<C64>> {
    let cell = OnceLock::new();
    let _ = cell.set(entries);
    cell
}

impl DensityMatrix {
    /// Validates shape, Hermiticity, positivity and unit trace.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        Self::validate(entries, true, &NumericPolicy::DEFAULT)
    }

    /// Like [`DensityMatrix::new`] but accepts any positive trace.
    pub fn new_unnormalized(entries: DMatrix<C64>) -> Result<Self> {
        Self::validate(entries, false, &NumericPolicy::DEFAULT)
    }

    pub fn with_policy(entries: DMatrix<C64>, policy: &NumericPolicy) -> Result<Self> {
        Self::validate(entries, true, policy)
    }

    fn validate(entries: DMatrix<C64>, unit_trace: bool, policy: &NumericPolicy) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        log2_exact(rows).ok_or(Error::NotPowerOfTwo(rows))?;
        let max_dev = hermitian_deviation(&entries);
        if max_dev > policy.hermitian_tol {
            return Err(Error::NotHermitian { max_dev });
        }
        let min_eigenvalue = hermitian_eigen(&entries).values[0];
        if min_eigenvalue < -policy.psd_floor {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        let trace = entries.trace().re;
        if unit_trace && (trace - 1.0).abs() > policy.norm_tol {
            return Err(Error::BadTrace { trace });
        }
        Ok(DensityMatrix { entries: dense(entries), normalized: unit_trace, pure: None })
    }

    /// Trusted constructor for matrices produced by exact arithmetic inside the crate.
    pub(crate) fn from_raw(entries: DMatrix<C64>) -> Self {
        DensityMatrix { entries: dense(entries), normalized: true, pure: None }
    }

    /// `|psi><psi|`.
    pub fn from_pure(psi: &StateVector) -> Self {
        DensityMatrix { entries: OnceLock::new(), normalized: true, pure: Some(psi.clone()) }
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        log2_exact(dim).ok_or(Error::NotPowerOfTwo(dim))?;
        let entries = DMatrix::from_diagonal_element(dim, dim, C64::new(1.0 / dim as f64, 0.0));
        Ok(DensityMatrix::from_raw(entries))
    }

    pub fn dim(&self) -> usize {
        match &self.pure {
            Some(p) => p.dim(),
            None => self.matrix().nrows(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        self.entries.get_or_init(|| {
            let a = self.pure.as_ref().expect("density matrix without entries must be pure").amplitudes();
            let d = a.len();
            DMatrix::from_fn(d, d, |i, j| a[i] * a[j].conj())
        })
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix();
        self.entries.into_inner().expect("initialized above")
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// The vector this matrix was built from, if it was built from one.
    pub fn pure_state(&self) -> Option<&StateVector> {
        self.pure.as_ref()
    }

    pub fn trace(&self) -> f64 {
        match &self.pure {
            Some(p) => p.norm_sq(),
            None => self.matrix().trace().re,
        }
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        match &self.pure {
            Some(p) => p.norm_sq().powi(2),
            None => hs_inner(self.matrix(), self.matrix()),
        }
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(self.matrix()).values
    }

    /// `<v| rho |v>` for an arbitrary (not necessarily normalized) vector.
    pub fn expectation_vec(&self, v: &[C64]) -> f64 {
        if let Some(p) = &self.pure {
            return super::state::inner(p.amplitudes(), v).norm_sqr();
        }
        let m = self.matrix();
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..m.ncols() {
            let col = m.column(j);
            let s: C64 = v.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
            acc += s * v[j];
        }
        acc.re
    }

    /// `rho (x) sigma`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        if let (Some(x), Some(y)) = (&self.pure, &other.pure) {
            return DensityMatrix::from_pure(&x.tensor(y));
        }
        let a = self.matrix();
        let b = other.matrix();
        let (da, db) = (a.nrows(), b.nrows());
        let entries = DMatrix::from_fn(da * db, da * db, |r, c| a[(r / db, c / db)] * b[(r % db, c % db)]);
        DensityMatrix { entries: dense(entries), normalized: self.normalized && other.normalized, pure: None }
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.matrix().iter().zip(other.matrix().iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Reduced state on the leading `keep_qubits` qubits.
    pub fn reduce_leading(&self, keep_qubits: usize) -> Result<DensityMatrix> {
        let n = self.n_qubits();
        if keep_qubits == 0 || keep_qubits > n {
            return Err(Error::invalid(format!("cannot keep {keep_qubits} of {n} qubits")));
        }
        if keep_qubits == n {
            return Ok(self.clone());
        }
        let dk = 1usize << keep_qubits;
        let dr = 1usize << (n - keep_qubits);
        if let Some(psi) = &self.pure {
            // rho_A[i, j] = sum_z psi[i dr + z] conj(psi[j dr + z]), without forming |psi><psi|.
            let a = psi.amplitudes();
            let m = DMatrix::from_fn(dk, dk, |i, j| (0..dr).map(|z| a[i * dr + z] * a[j * dr + z].conj()).sum::<C64>());
            return Ok(DensityMatrix::from_raw(m));
        }
        Ok(DensityMatrix::from_raw(trace_out(self.matrix(), dk, dr, Keep::First)))
    }
}

/// `tr(rho |tau><tau|)`.
pub fn dm_overlap(rho: &DensityMatrix, tau: &StateVector) -> Result<f64> {
    check_dims(rho.dim(), tau.dim())?;
    if let Some(psi) = &rho.pure {
        return Ok(psi.inner(tau)?.norm_sqr());
    }
    Ok(rho.expectation_vec(tau.amplitudes()))
}

/// Which tensor factor survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Partial trace of a state on two equal-size registers.
///
/// The joint index is `i * d + k` with `i` on the first register.
pub fn partial_trace_pair(joint: &DensityMatrix, keep: Keep) -> Result<DensityMatrix> {
    let dim = joint.dim();
    let d = (dim as f64).sqrt().round() as usize;
    if d * d != dim || log2_exact(d).is_none() {
        return Err(Error::invalid(format!("joint dimension {dim} is not the square of a power of two")));
    }
    let entries = trace_out(joint.matrix(), d, d, keep);
    Ok(DensityMatrix { entries: dense(entries), normalized: joint.normalized, pure: None })
}

/// Partial trace of an arbitrary operator on two equal-size registers, such as `S (rho1 (x) rho2)`.
pub fn partial_trace_operator(m: &DMatrix<C64>, keep: Keep) -> Result<DMatrix<C64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let dim = m.nrows();
    let d = (dim as f64).sqrt().round() as usize;
    if d * d != dim || log2_exact(d).is_none() {
        return Err(Error::invalid(format!("joint dimension {dim} is not the square of a power of two")));
    }
    Ok(trace_out(m, d, d, keep))
}

fn trace_out(m: &DMatrix<C64>, d1: usize, d2: usize, keep: Keep) -> DMatrix<C64> {
    match keep {
        Keep::First => DMatrix::from_fn(d1, d1, |i, j| (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()),
        Keep::Second => DMatrix::from_fn(d2, d2, |i, j| (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum()),
    }
}

/// `tr(A B)` for Hermitian `A`, `B`, as `sum_ij A_ij conj(B_ij)`.
pub(crate) fn hs_inner(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}
