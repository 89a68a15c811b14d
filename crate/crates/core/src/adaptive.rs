//! The O(n)-query adaptive baseline: build the QSample state `sum_x sqrt(p(x)) |x>` one
//! qubit at a time from conditional marginals, then apply the phases `theta_x`.
//!
//! Each oracle answer is a fixed-point number. Stage `k` asks for the pair
//! `Pr[X_{k+1} = b | X_{<=k} = y]`, rounded to `prob_bits`, and renormalizes the pair so the
//! partial state stays a unit vector. The phase pass asks for `theta_x / 2pi` rounded to
//! `phase_bits`. Every stage is one compute query plus one uncompute query, which gives
//! `2n` queries for the QSample and `2` for the phases.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::qcore::StateVector;
use crate::{Error, Result, C64};

/// Bits of precision in oracle answers. `None` means exact answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    prob_bits: Option<u32>,
    phase_bits: Option<u32>,
}

impl PrecisionPolicy {
    /// Both widths must lie in `1..=52`.
    pub fn bits(prob_bits: u32, phase_bits: u32) -> Result<Self> {
        for (name, b) in [("prob_bits", prob_bits), ("phase_bits", phase_bits)] {
            if !(1..=52).contains(&b) {
                return Err(Error::invalid(format!("{name} must be in 1..=52, got {b}")));
            }
        }
        Ok(PrecisionPolicy { prob_bits: Some(prob_bits), phase_bits: Some(phase_bits) })
    }

    /// Unrounded oracle answers.
    pub fn exact() -> Self {
        PrecisionPolicy { prob_bits: None, phase_bits: None }
    }

    pub fn prob_bits(&self) -> Option<u32> {
        self.prob_bits
    }

    pub fn phase_bits(&self) -> Option<u32> {
        self.phase_bits
    }
}

fn round_to(x: f64, bits: Option<u32>) -> f64 {
    match bits {
        Some(b) => {
            let scale = (1u64 << b) as f64;
            (x * scale).round() / scale
        }
        None => x,
    }
}

/// Output of [`synthesize_adaptive`].
#[derive(Debug, Clone)]
pub struct AdaptiveOutcome {
    pub output: StateVector,
    pub query_count: usize,
}

/// Rebuilds `target` with `2n + 2` finite-precision oracle queries.
pub fn synthesize_adaptive(target: &StateVector, policy: PrecisionPolicy) -> AdaptiveOutcome {
    let n = target.n_qubits();
    let amps = target.amplitudes();

    // levels[k][y] = Pr[X_{<=k} = y] with y the k-bit prefix (qubit 0 most significant).
    let mut levels: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
    levels[n] = amps.iter().map(|z| z.norm_sqr()).collect();
    for k in (0..n).rev() {
        let next = &levels[k + 1];
        levels[k] = (0..1usize << k).map(|y| next[2 * y] + next[2 * y + 1]).collect();
    }

    let mut queries = 0;
    let mut mags = vec![1.0f64];
    for k in 0..n {
        queries += 2;
        let marg = &levels[k];
        let next = &levels[k + 1];
        let mut grown = vec![0.0; 2 * mags.len()];
        for (y, &m) in mags.iter().enumerate() {
            let (p0, p1) = if marg[y] > 0.0 { (next[2 * y] / marg[y], next[2 * y + 1] / marg[y]) } else { (0.5, 0.5) };
            let (r0, r1) = (round_to(p0, policy.prob_bits), round_to(p1, policy.prob_bits));
            let s = r0 + r1;
            let (q0, q1) = if s > 0.0 { (r0 / s, r1 / s) } else { (0.5, 0.5) };
            grown[2 * y] = m * q0.sqrt();
            grown[2 * y + 1] = m * q1.sqrt();
        }
        mags = grown;
    }

    queries += 2;
    let out: Vec<C64> = mags
        .iter()
        .zip(amps)
        .map(|(&r, t)| {
            let theta = if t.norm() > 0.0 { t.arg().rem_euclid(TAU) } else { 0.0 };
            let turns = round_to(theta / TAU, policy.phase_bits);
            C64::from_polar(r, turns * TAU)
        })
        .collect();
    let output = StateVector::normalize(out).expect("QSample amplitudes have unit norm");
    AdaptiveOutcome { output, query_count: queries }
}
