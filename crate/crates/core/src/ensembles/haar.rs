use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::clifford::random_clifford;
use crate::numeric::log2_exact;
use crate::qcore::{StateVector, UnitaryMatrix};
use crate::{Error, Result, C64};

/// A standard complex Gaussian: real and imaginary parts i.i.d. `N(0, 1/2)`, so `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn check_dim(dim: usize) -> Result<usize> {
    if dim < 2 {
        return Err(Error::invalid(format!("dimension must be at least 2, got {dim}")));
    }
    log2_exact(dim).ok_or(Error::NotPowerOfTwo(dim))
}

/// A Haar-random unit vector: i.i.d. complex Gaussians, normalized.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<StateVector> {
    check_dim(dim)?;
    loop {
        let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if let Ok(s) = StateVector::normalize(v) {
            return Ok(s);
        }
    }
}

/// A Haar-random unit vector orthogonal to `tau`.
pub fn haar_orthogonal_to<R: Rng + ?Sized>(tau: &StateVector, rng: &mut R) -> StateVector {
    let t = tau.amplitudes();
    loop {
        let mut v: Vec<C64> = (0..t.len()).map(|_| complex_gaussian(rng)).collect();
        // Two passes of projection keep the residual overlap at rounding level.
        for _ in 0..2 {
            let c: C64 = t.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(t).for_each(|(x, a)| *x -= c * a);
        }
        if let Ok(s) = StateVector::normalize(v) {
            return s;
        }
    }
}

/// A Haar-random unitary from the QR factorization of a Ginibre matrix.
///
/// The phases of `R`'s diagonal are folded back into `Q`, which makes the law exactly Haar.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    check_dim(dim)?;
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let phase = if n > 0.0 { rjj / n } else { C64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(UnitaryMatrix::from_raw(q))
}

/// Which 2-design a "random Clifford" site draws from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwirlEnsemble {
    #[default]
    Clifford,
    Haar,
}

impl TwirlEnsemble {
    /// A dense unitary drawn from this ensemble.
    pub fn sample<R: Rng + ?Sized>(self, n_qubits: usize, rng: &mut R) -> Result<UnitaryMatrix> {
        match self {
            TwirlEnsemble::Clifford => random_clifford(n_qubits, rng)?.dense(),
            TwirlEnsemble::Haar => haar_unitary(1usize << n_qubits, rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::RngStream;

    #[test]
    fn haar_state_is_normalized() {
        let mut rng = RngStream::new(1, 0);
        for _ in 0..20 {
            assert!((haar_state(16, &mut rng).unwrap().norm_sq() - 1.0).abs() < 1e-12);
        }
        assert!(haar_state(1, &mut rng).is_err());
        assert!(matches!(haar_state(6, &mut rng), Err(Error::NotPowerOfTwo(6))));
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = RngStream::new(2, 0);
        let u = haar_unitary(16, &mut rng).unwrap();
        assert!(u.unitarity_defect() < 1e-12);
        for j in 0..16 {
            let n: f64 = u.column(j).iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_sample_is_orthogonal() {
        let mut rng = RngStream::new(3, 0);
        let tau = haar_state(32, &mut rng).unwrap();
        let r = haar_orthogonal_to(&tau, &mut rng);
        assert!(tau.inner(&r).unwrap().norm() < 1e-14);
    }
}
