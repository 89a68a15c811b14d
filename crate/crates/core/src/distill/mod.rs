//! Swap-test distillation.
//!
//! Registers are paired `(1, 2), (3, 4), ...` each round. A pair is swap-tested and, on
//! outcome 0, the first register is kept in the post-selected state. Because a post-selected
//! pair lies in the symmetric subspace, both registers of the pair hold the same reduced
//! state, so choosing which one to keep only changes its label.
//!
//! Two modes are available. [`DistillMode::Sampled`] draws every test outcome.
//! [`DistillMode::ExactConditional`] conditions on every test passing and multiplies the
//! pass probabilities into [`DistillationReport::all_success_probability`].

mod bounds;
mod register;

pub use bounds::{
    auto_rounds, check_conditions, gram_schmidt_diagnostic, no_overlap_rounds, overlap_bound, overlap_recurrence,
    relaxed_extra_rounds, survival_bound, GramSchmidtReport,
};
pub use register::{mix_with_target, DistillRegister, OrthogonalNoiseRegister};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::{Error, Result};

/// Round count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rounds {
    /// The largest `l` with `n 6^l <= m`, clamped to at least 1.
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistillMode {
    #[default]
    Sampled,
    ExactConditional,
}

/// Which register of a passing pair carries the survivor forward.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurvivorSelection {
    #[default]
    First,
    Random,
}

/// What happens to the last register of a round with an odd count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum OddPolicy {
    /// Discard it, so that `m_k <= floor(m_{k-1} / 2)`.
    #[default]
    Drop,
    /// Carry it into the next round untested.
    PassThrough,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistillationConfig {
    pub rounds: Rounds,
    pub mode: DistillMode,
    pub selection: SurvivorSelection,
    pub odd: OddPolicy,
    pub execution: Execution,
}

impl Default for DistillationConfig {
    fn default() -> Self {
        DistillationConfig {
            rounds: Rounds::Auto,
            mode: DistillMode::Sampled,
            selection: SurvivorSelection::First,
            odd: OddPolicy::Drop,
            execution: Execution::Parallel,
        }
    }
}

impl DistillationConfig {
    pub fn with_rounds(rounds: usize) -> Self {
        DistillationConfig { rounds: Rounds::Fixed(rounds), ..Default::default() }
    }

    pub fn mode(mut self, mode: DistillMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn selection(mut self, selection: SurvivorSelection) -> Self {
        self.selection = selection;
        self
    }

    pub fn odd(mut self, odd: OddPolicy) -> Self {
        self.odd = odd;
        self
    }

    /// Rounds to run for `m` registers of `n_qubits` qubits.
    pub fn resolve_rounds(&self, m: usize, n_qubits: usize) -> Result<usize> {
        match self.rounds {
            Rounds::Auto => Ok(auto_rounds(m, n_qubits).max(1)),
            Rounds::Fixed(0) => Err(Error::invalid("explicit rounds must be at least 1")),
            Rounds::Fixed(r) => Ok(r),
        }
    }
}

/// One swap test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairRecord {
    /// 1-based round.
    pub round: usize,
    /// Original input indices of the two registers.
    pub left: usize,
    pub right: usize,
    pub left_overlap: f64,
    pub right_overlap: f64,
    pub p_success: f64,
    pub passed: bool,
    pub survivor_overlap: f64,
}

#[derive(Debug, Clone)]
pub struct DistillationReport<R> {
    pub rounds_requested: usize,
    /// Rounds actually run; fewer than requested when under two registers remain.
    pub rounds_completed: usize,
    /// `m_0 = m`, then the survivor count after each completed round.
    pub survivor_counts: Vec<usize>,
    /// Overlaps of every live register: inputs first, then after each completed round.
    pub survivor_overlaps: Vec<Vec<f64>>,
    /// Registers alive at the end.
    pub survivor_states: Vec<R>,
    /// Original input index of each final register.
    pub survivor_labels: Vec<usize>,
    pub pairs: Vec<PairRecord>,
    /// Probability that every test passes (meaningful in exact-conditional mode).
    pub all_success_probability: f64,
    pub aborted: bool,
}

impl<R> DistillationReport<R> {
    /// Overlap of the first surviving register, the procedure's output.
    pub fn final_overlap(&self) -> Option<f64> {
        if self.aborted {
            return None;
        }
        self.survivor_overlaps.last().and_then(|v| v.first().copied())
    }

    /// Mean overlap across the final survivors.
    pub fn mean_final_overlap(&self) -> Option<f64> {
        if self.aborted {
            return None;
        }
        self.survivor_overlaps.last().map(|v| crate::stats::mean(v))
    }

    pub fn output(&self) -> Option<&R> {
        self.survivor_states.first()
    }
}

/// Runs the distillation loop.
///
/// All randomness is drawn from `rng` up front for each round, in pair order, so the result
/// does not depend on `config.execution`.
pub fn distill<R, G>(
    inputs: Vec<R>,
    target: &R::Target,
    config: &DistillationConfig,
    rng: &mut G,
) -> Result<DistillationReport<R>>
where
    R: DistillRegister,
    G: Rng + ?Sized,
{
    let m = inputs.len();
    if m < 2 {
        return Err(Error::invalid(format!("distillation needs at least 2 registers, got {m}")));
    }
    let n = inputs[0].n_qubits();
    if let Some(bad) = inputs.iter().find(|r| r.n_qubits() != n) {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: 1 << bad.n_qubits() });
    }
    let rounds = config.resolve_rounds(m, n)?;
    let exec = config.execution;

    let first_overlaps = exec.map_slice(&inputs, |r| r.overlap(target)).into_iter().collect::<Result<Vec<f64>>>()?;
    let mut live: Vec<(usize, R, f64)> =
        inputs.into_iter().enumerate().zip(first_overlaps.iter()).map(|((i, r), &a)| (i, r, a)).collect();

    let mut report = DistillationReport {
        rounds_requested: rounds,
        rounds_completed: 0,
        survivor_counts: vec![m],
        survivor_overlaps: vec![first_overlaps],
        survivor_states: Vec::new(),
        survivor_labels: Vec::new(),
        pairs: Vec::new(),
        all_success_probability: 1.0,
        aborted: false,
    };

    for round in 1..=rounds {
        if live.len() < 2 {
            break;
        }
        let n_pairs = live.len() / 2;
        let draws: Vec<(f64, bool)> = (0..n_pairs).map(|_| (rng.random::<f64>(), rng.random::<bool>())).collect();
        let mut iter = live.into_iter();
        let mut jobs = Vec::with_capacity(n_pairs);
        for &draw in &draws {
            let l = iter.next().expect("pair left");
            let r = iter.next().expect("pair right");
            jobs.push((l, r, draw));
        }
        let leftover: Vec<(usize, R, f64)> = iter.collect();

        let mode = config.mode;
        let selection = config.selection;
        let outcomes = exec.map_vec(jobs, |((li, lr, la), (ri, rr, ra), (u, coin))| -> Result<_> {
            let (p, survivor) = lr.swap(&rr)?;
            let passed = match mode {
                DistillMode::Sampled => u < p,
                DistillMode::ExactConditional => true,
            };
            let overlap = if passed { survivor.overlap(target)? } else { f64::NAN };
            let label = match selection {
                SurvivorSelection::First => li,
                SurvivorSelection::Random if coin => ri,
                SurvivorSelection::Random => li,
            };
            let record = PairRecord {
                round,
                left: li,
                right: ri,
                left_overlap: la,
                right_overlap: ra,
                p_success: p,
                passed,
                survivor_overlap: overlap,
            };
            Ok((record, passed.then_some((label, survivor, overlap))))
        });

        let mut next = Vec::with_capacity(n_pairs + 1);
        for outcome in outcomes {
            let (record, kept) = outcome?;
            if mode == DistillMode::ExactConditional {
                report.all_success_probability *= record.p_success;
            }
            report.pairs.push(record);
            if let Some(k) = kept {
                next.push(k);
            }
        }
        if config.odd == OddPolicy::PassThrough {
            next.extend(leftover);
        }
        report.rounds_completed = round;
        report.survivor_counts.push(next.len());
        report.survivor_overlaps.push(next.iter().map(|(_, _, a)| *a).collect());
        live = next;
        if live.is_empty() {
            report.aborted = true;
            break;
        }
    }

    for (label, state, _) in live {
        report.survivor_labels.push(label);
        report.survivor_states.push(state);
    }
    Ok(report)
}
