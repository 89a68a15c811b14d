//! Phase oracles, phase states and the l1-overlap identities.
//!
//! A phase state is `2^{-n/2} sum_x (-1)^{f(x)} |x>`. For a real vector `a`, choosing
//! `f(x) = [a_x < 0]` gives `|<a|p_f>| = ||a||_1 / sqrt(d)`, and no other sign pattern does
//! better. The sign of zero is taken to be `+`.

use crate::numeric::{log2_exact, NumericPolicy};
use crate::qcore::StateVector;
use crate::{Error, Result, C64};

/// Largest truth table accepted, in input bits.
pub const MAX_ORACLE_BITS: usize = 24;

/// A boolean function on `n`-bit strings, stored as a dense truth table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhaseOracle {
    n_bits: usize,
    table: Vec<bool>,
}

impl PhaseOracle {
    pub fn from_table(table: Vec<bool>) -> Result<Self> {
        let n_bits = log2_exact(table.len()).ok_or(Error::NotPowerOfTwo(table.len()))?;
        check_bits(n_bits)?;
        Ok(PhaseOracle { n_bits, table })
    }

    pub fn from_fn(n_bits: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        check_bits(n_bits)?;
        Ok(PhaseOracle { n_bits, table: (0..1usize << n_bits).map(f).collect() })
    }

    /// The constant-zero function.
    pub fn zero(n_bits: usize) -> Result<Self> {
        Self::from_fn(n_bits, |_| false)
    }

    /// `f(x) = x . d` over GF(2).
    pub fn linear(n_bits: usize, d: usize) -> Result<Self> {
        Self::from_fn(n_bits, |x| (x & d).count_ones() % 2 == 1)
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn eval(&self, x: usize) -> bool {
        self.table[x]
    }

    /// `(-1)^{f(x)}`.
    pub fn sign(&self, x: usize) -> f64 {
        if self.table[x] {
            -1.0
        } else {
            1.0
        }
    }
}

fn check_bits(n_bits: usize) -> Result<()> {
    if n_bits > MAX_ORACLE_BITS {
        return Err(Error::CapExceeded { what: "oracle bits", value: n_bits as u64, cap: MAX_ORACLE_BITS as u64 });
    }
    Ok(())
}

/// `2^{-n/2} sum_x (-1)^{f(x)} |x>`.
pub fn build_phase_state(f: &PhaseOracle) -> StateVector {
    let amp = (f.table.len() as f64).sqrt().recip();
    let amps = (0..f.table.len()).map(|x| C64::new(amp * f.sign(x), 0.0)).collect();
    StateVector::from_raw(f.n_bits, amps)
}

/// `f(x) = 1` exactly when `values[x] < 0`.
pub fn sign_oracle(values: &[f64]) -> Result<PhaseOracle> {
    PhaseOracle::from_table(values.iter().map(|&v| v < 0.0).collect())
}

/// The sign pattern of the real vector `a` and the overlap `||a||_1 / sqrt(d)` it achieves.
pub fn best_phase_oracle(a: &[f64]) -> Result<(PhaseOracle, f64)> {
    let f = sign_oracle(a)?;
    let overlap = l1_norm_real(a) / (a.len() as f64).sqrt();
    Ok((f, overlap))
}

pub fn l1_norm_real(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

pub fn l1_norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm()).sum()
}

/// `1 / ||a||_4^2`, a lower bound on `||a||_1` for unit vectors.
pub fn l4_lower_bound(a: &[C64]) -> Result<f64> {
    let norm_sq: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > NumericPolicy::DEFAULT.norm_tol {
        return Err(Error::NotNormalized { norm_sq });
    }
    let fourth: f64 = a.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum();
    Ok(fourth.sqrt().recip())
}
