use std::f64::consts::TAU;

use crate::{Error, Result, C64};

/// Largest supported phase register.
pub const MAX_PHASE_BITS: u32 = 52;

/// The pair of oracles `f(x) = (phi(x), sigma(x))` and `g(y) = (sigma^{-1}(y), phi(sigma^{-1}(y)))`.
///
/// Phases are stored as integers `k` meaning `2 pi k / 2^phase_bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermPhaseOracle {
    n_bits: usize,
    phase_bits: u32,
    sigma: Vec<usize>,
    sigma_inverse: Vec<usize>,
    phases: Vec<u64>,
}

impl PermPhaseOracle {
    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn phase_bits(&self) -> u32 {
        self.phase_bits
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn sigma_inverse(&self) -> &[usize] {
        &self.sigma_inverse
    }

    /// Fixed-point phase codes.
    pub fn phase_codes(&self) -> &[u64] {
        &self.phases
    }

    /// `phi(x)` in radians.
    pub fn phase(&self, x: usize) -> f64 {
        TAU * self.phases[x] as f64 / (1u64 << self.phase_bits) as f64
    }

    /// `f(x) = (phi code, sigma(x))`.
    pub fn f(&self, x: usize) -> (u64, usize) {
        (self.phases[x], self.sigma[x])
    }

    /// `g(y) = (sigma^{-1}(y), phi code of sigma^{-1}(y))`.
    pub fn g(&self, y: usize) -> (usize, u64) {
        let x = self.sigma_inverse[y];
        (x, self.phases[x])
    }

    /// `sum_x e^{i phi(x)} u_x |sigma(x)>`.
    pub fn reconstruct(&self, u: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); u.len()];
        for (x, &ux) in u.iter().enumerate() {
            out[self.sigma[x]] = ux * C64::from_polar(1.0, self.phase(x));
        }
        out
    }
}

/// Indices sorted by descending magnitude; ties keep index order.
fn rank_order(a: &[C64]) -> Vec<usize> {
    let mags: Vec<f64> = a.iter().map(|z| z.norm()).collect();
    let mut idx: Vec<usize> = (0..a.len()).collect();
    idx.sort_by(|&i, &j| mags[j].total_cmp(&mags[i]));
    idx
}

/// Matches ranks of `|u|` and `|v|` and quantizes the aligning phase to `phase_bits`.
pub fn build_perm_phase_oracle(u: &[C64], v: &[C64], phase_bits: u32) -> Result<PermPhaseOracle> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
    }
    let n_bits = crate::numeric::log2_exact(u.len()).ok_or(Error::NotPowerOfTwo(u.len()))?;
    if !(1..=MAX_PHASE_BITS).contains(&phase_bits) {
        return Err(Error::invalid(format!("phase_bits must be in 1..={MAX_PHASE_BITS}, got {phase_bits}")));
    }
    let d = u.len();
    let (ru, rv) = (rank_order(u), rank_order(v));
    let mut sigma = vec![0usize; d];
    let mut sigma_inverse = vec![0usize; d];
    for (&x, &y) in ru.iter().zip(&rv) {
        sigma[x] = y;
        sigma_inverse[y] = x;
    }
    let scale = (1u64 << phase_bits) as f64;
    let modulus = 1u64 << phase_bits;
    let phases = (0..d)
        .map(|x| {
            let (a, b) = (u[x], v[sigma[x]]);
            if a.norm() == 0.0 || b.norm() == 0.0 {
                return 0;
            }
            let theta = (b.arg() - a.arg()).rem_euclid(TAU);
            ((theta / TAU * scale).round() as u64) % modulus
        })
        .collect();
    Ok(PermPhaseOracle { n_bits, phase_bits, sigma, sigma_inverse, phases })
}

/// `|| sort(|u|) - sort(|v|) ||` with both sorted in descending order.
pub fn sorted_abs_distance(u: &[C64], v: &[C64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
    }
    let sorted = |a: &[C64]| {
        let mut m: Vec<f64> = a.iter().map(|z| z.norm()).collect();
        m.sort_by(|x, y| y.total_cmp(x));
        m
    };
    let (su, sv) = (sorted(u), sorted(v));
    Ok(su.iter().zip(&sv).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}
