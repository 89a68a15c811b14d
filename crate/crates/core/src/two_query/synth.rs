use rand::Rng;
use serde::{Deserialize, Serialize};

use super::oracle::{build_perm_phase_oracle, sorted_abs_distance, PermPhaseOracle};
use crate::ensembles::{haar_orthogonal_to, haar_state, haar_unitary};
use crate::qcore::{DensityMatrix, StateVector};
use crate::{Error, Result, C64};

/// How `U` and `V` are realized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoQueryMode {
    /// Dense up to 8 register qubits, implicit above.
    #[default]
    Auto,
    /// Dense Haar unitaries.
    Dense,
    /// Only `u = U|0>` and `v = V tau'` are sampled (both Haar states), and `V^dagger w` is
    /// drawn as `<v|w> tau' + ||w - <v|w> v|| r` with `r` uniform orthogonal to `tau'`.
    /// Given `v`, the rest of `V` is a Haar isometry independent of `w`, so this has the
    /// same law as the dense route.
    Implicit,
}

/// Test hooks that pin the random unitaries.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoQueryHook {
    #[default]
    None,
    /// `V = U` (dense only).
    SameUnitary,
    /// `u = v` exactly.
    UEqualsV,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoQueryConfig {
    pub n_expanded: usize,
    pub phase_bits: u32,
    pub mode: TwoQueryMode,
    pub hook: TwoQueryHook,
}

impl TwoQueryConfig {
    /// `n_expanded = n_target + 4`, 32 phase bits.
    pub fn new(n_target: usize) -> Self {
        TwoQueryConfig { n_expanded: n_target + 4, phase_bits: 32, mode: TwoQueryMode::Auto, hook: TwoQueryHook::None }
    }
}

/// State of the three registers through the two queries.
#[derive(Debug, Clone)]
pub struct QuerySimulation {
    /// Register C after uncomputation: `sum_x e^{i phi(x)} u_x |sigma(x)>`.
    pub register_c: Vec<C64>,
    /// Branches whose A or B register is not `|0>` after uncomputation.
    pub ancilla_residual_branches: usize,
    /// Total weight on those branches.
    pub ancilla_residual_mass: f64,
    /// Whether `|register_c[sigma(x)]| == |u_x|` for every `x`, up to one rounding of the
    /// phase multiplication (relative `1e-14`).
    pub magnitudes_preserved: bool,
}

/// Runs steps (2)-(5) on the amplitudes `u`, one branch per basis state `x`.
pub fn simulate_queries(u: &[C64], oracle: &PermPhaseOracle) -> QuerySimulation {
    // Branch = (a, b, c, amplitude) for registers A (x), B (phase code), C (y).
    let mut branches: Vec<(usize, u64, usize, C64)> =
        u.iter().enumerate().map(|(x, &a)| (x, 0u64, 0usize, a)).collect();
    // (3) f writes (phi, sigma(x)) into B and C.
    for br in branches.iter_mut() {
        let (k, y) = oracle.f(br.0);
        br.1 ^= k;
        br.2 ^= y;
    }
    // (4) phase kickback from B.
    let scale = std::f64::consts::TAU / (1u64 << oracle.phase_bits()) as f64;
    for br in branches.iter_mut() {
        br.3 *= C64::from_polar(1.0, scale * br.1 as f64);
    }
    // (5) g, controlled on C, XORs (x, phi) back out of A and B.
    for br in branches.iter_mut() {
        let (x, k) = oracle.g(br.2);
        br.0 ^= x;
        br.1 ^= k;
    }
    let mut register_c = vec![C64::new(0.0, 0.0); u.len()];
    let mut residual_branches = 0;
    let mut residual_mass = 0.0;
    for &(a, b, c, amp) in &branches {
        if a != 0 || b != 0 {
            residual_branches += 1;
            residual_mass += amp.norm_sqr();
        } else {
            register_c[c] += amp;
        }
    }
    let magnitudes_preserved = u.iter().enumerate().all(|(x, ux)| {
        let (got, want) = (register_c[oracle.sigma()[x]].norm(), ux.norm());
        (got - want).abs() <= 1e-14 * want
    });
    QuerySimulation {
        register_c,
        ancilla_residual_branches: residual_branches,
        ancilla_residual_mass: residual_mass,
        magnitudes_preserved,
    }
}

#[derive(Debug, Clone)]
pub struct TwoQueryOutcome {
    /// Register C at the end, on `n_expanded` qubits.
    pub output: StateVector,
    /// Reduced state on the leading `n_target` qubits.
    pub reduced: DensityMatrix,
    /// `<tau| reduced |tau>`.
    pub fidelity: f64,
    pub sorted_distance: f64,
    /// `|| sum_x e^{i phi(x)} u_x |sigma(x)> - v ||^2`.
    pub reconstruction_error_sq: f64,
    /// `2 ||sort|u| - sort|v|||^2 + d' 2^{3 - 2 phase_bits}`, which bounds the line above.
    pub reconstruction_bound: f64,
    pub ancilla_residual_branches: usize,
    pub magnitudes_preserved: bool,
}

impl TwoQueryOutcome {
    pub fn infidelity(&self) -> f64 {
        (1.0 - self.fidelity).max(0.0)
    }
}

/// Runs the two-query algorithm on `target`.
pub fn two_query_synthesize<R: Rng + ?Sized>(
    target: &StateVector,
    config: &TwoQueryConfig,
    rng: &mut R,
) -> Result<TwoQueryOutcome> {
    let n = target.n_qubits();
    let np = config.n_expanded;
    if np < n {
        return Err(Error::invalid(format!("n_expanded ({np}) must be at least the target size ({n})")));
    }
    if np > 16 {
        return Err(Error::CapExceeded { what: "n_expanded", value: np as u64, cap: 16 });
    }
    let tau_p = target.pad_zeros(np - n);
    let d = tau_p.dim();
    let dense = match (config.mode, config.hook) {
        (_, TwoQueryHook::SameUnitary) => true,
        (TwoQueryMode::Dense, _) => true,
        (TwoQueryMode::Implicit, _) => false,
        (TwoQueryMode::Auto, _) => np <= 8,
    };

    let (u, v, v_unitary) = if dense {
        let uu = haar_unitary(d, rng)?;
        let vv = if config.hook == TwoQueryHook::SameUnitary { uu.clone() } else { haar_unitary(d, rng)? };
        (uu.column(0), vv.apply_slice(tau_p.amplitudes()), Some(vv))
    } else {
        let uu = haar_state(d, rng)?.into_amplitudes();
        let vv = haar_state(d, rng)?.into_amplitudes();
        (uu, vv, None)
    };
    let u = if config.hook == TwoQueryHook::UEqualsV { v.clone() } else { u };

    let oracle = build_perm_phase_oracle(&u, &v, config.phase_bits)?;
    let sim = simulate_queries(&u, &oracle);
    let w = &sim.register_c;

    let sorted_distance = sorted_abs_distance(&u, &v)?;
    let reconstruction_error_sq = w.iter().zip(&v).map(|(a, b)| (a - b).norm_sqr()).sum();
    let reconstruction_bound =
        2.0 * sorted_distance * sorted_distance + d as f64 * 2f64.powi(3 - 2 * config.phase_bits as i32);

    let out = match &v_unitary {
        Some(vv) => vv.apply_adjoint_slice(w),
        None => {
            let c: C64 = v.iter().zip(w).map(|(a, b)| a.conj() * b).sum();
            let perp: f64 = w.iter().zip(&v).map(|(b, a)| (b - c * a).norm_sqr()).sum::<f64>().sqrt();
            let r = haar_orthogonal_to(&tau_p, rng);
            tau_p.amplitudes().iter().zip(r.amplitudes()).map(|(t, x)| t * c + x * perp).collect()
        }
    };
    let output = StateVector::normalize(out)?;
    let reduced = DensityMatrix::from_pure(&output).reduce_leading(n)?;
    let fidelity = leading_fidelity(&output, target).min(1.0);
    Ok(TwoQueryOutcome {
        output,
        reduced,
        fidelity,
        sorted_distance,
        reconstruction_error_sq,
        reconstruction_bound,
        ancilla_residual_branches: sim.ancilla_residual_branches,
        magnitudes_preserved: sim.magnitudes_preserved,
    })
}

/// `<tau| tr_rest(|psi><psi|) |tau>` with `tau` on the leading qubits of `psi`.
fn leading_fidelity(psi: &StateVector, tau: &StateVector) -> f64 {
    let stride = psi.dim() / tau.dim();
    let a = psi.amplitudes();
    (0..stride)
        .map(|z| {
            let s: C64 = tau.amplitudes().iter().enumerate().map(|(i, t)| t.conj() * a[i * stride + z]).sum();
            s.norm_sqr()
        })
        .sum()
}
