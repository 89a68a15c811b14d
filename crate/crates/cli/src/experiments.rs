//! One runner per subcommand. Trial `i` owns `RngStream::new(seed, i)`.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};
use statesynth::adaptive::{synthesize_adaptive, PrecisionPolicy};
use statesynth::classical::{CnfFormula, Extractor, SearchConfig};
use statesynth::distill::{
    distill, mix_with_target, overlap_bound, overlap_recurrence, DistillMode, DistillationConfig, OddPolicy,
    OrthogonalNoiseRegister, Rounds, SurvivorSelection,
};
use statesynth::ensembles::{haar_orthogonal_to, haar_state, random_clifford, RngStream, TwirlEnsemble};
use statesynth::exec::Execution;
use statesynth::one_query::{one_query_synthesize, OneQueryConfig, UnitarySampling};
use statesynth::qcore::{overlap, DensityMatrix, StateVector};
use statesynth::qma::{FilterMethod, LocalHamiltonian, QmaConfig, QmaSolver};
use statesynth::stats::{mean, median, std_error};
use statesynth::two_query::{
    empirical_wasserstein2_squared, two_query_synthesize, Rayleigh, TwoQueryConfig, TwoQueryMode,
};

use crate::args::*;
use crate::report::{finite, num, opt, Record};

/// A problem with the invocation rather than with the run.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(UsageError(msg()).into())
    }
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())).into())
}

/// Runs `f` for every trial on the worker pool, in trial order.
fn per_trial<T: Send>(
    seed: u64,
    trials: u64,
    f: impl Fn(u64, &mut RngStream) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    Execution::Parallel
        .map_range(trials as usize, |i| f(i as u64, &mut RngStream::new(seed, i as u64)))
        .into_iter()
        .collect()
}

fn bool_cell(b: bool) -> String {
    u8::from(b).to_string()
}

pub fn run(command: &Command, seed: u64, trials: u64) -> Result<Record> {
    match command {
        Command::SynthAdaptive(a) => synth_adaptive(a, seed, trials),
        Command::SynthOne(a) => synth_one(a, seed, trials),
        Command::SynthTwo(a) => synth_two(a, seed, trials),
        Command::Distill(a) => distill_run(a, seed, trials),
        Command::Qma(a) => qma(a, seed, trials),
        Command::QmaExp(a) => qma_exp(a, seed, trials),
        Command::Extract(a) => extract(a, seed, trials),
        Command::EnsemblesCheck(a) => ensembles_check(a, seed, trials),
        Command::WassersteinCheck(a) => wasserstein_check(a, seed, trials),
    }
}

fn check_qubits(n: usize, cap: usize) -> Result<()> {
    require((1..=cap).contains(&n), || format!("n must lie in 1..={cap}, got {n}"))
}

fn synth_adaptive(args: &AdaptiveArgs, seed: u64, trials: u64) -> Result<Record> {
    check_qubits(args.n, 12)?;
    let policy =
        if args.exact { PrecisionPolicy::exact() } else { PrecisionPolicy::bits(args.prob_bits, args.phase_bits)? };
    let rows = per_trial(seed, trials, |_, rng| {
        let target = haar_state(1 << args.n, rng)?;
        let out = synthesize_adaptive(&target, policy);
        Ok((1.0 - overlap(&out.output, &target)?, out.query_count))
    })?;
    let mut rec = Record::new(&["trial", "infidelity", "queries"]);
    for (i, (inf, q)) in rows.iter().enumerate() {
        rec.push(vec![i.to_string(), num(*inf), q.to_string()]);
    }
    let inf: Vec<f64> = rows.iter().map(|r| r.0).collect();
    rec.set("mean_infidelity", finite(mean(&inf)));
    rec.set("max_infidelity", finite(inf.iter().cloned().fold(0.0, f64::max)));
    rec.set("query_count", rows[0].1);
    rec.set("expected_query_count", 2 * args.n + 2);
    Ok(rec)
}

fn distill_base(rounds: Option<usize>, mode: Mode) -> DistillationConfig {
    let mut cfg = DistillationConfig::default().execution(Execution::Sequential).mode(match mode {
        Mode::Sampled => DistillMode::Sampled,
        Mode::Exact => DistillMode::ExactConditional,
    });
    cfg.rounds = rounds.map_or(Rounds::Auto, Rounds::Fixed);
    cfg
}

fn synth_one(args: &OneQueryArgs, seed: u64, trials: u64) -> Result<Record> {
    check_qubits(args.n, 12)?;
    let mut cfg = OneQueryConfig::new(args.n, args.m);
    if let Some(ne) = args.n_expanded {
        cfg.n_expanded = ne;
    }
    cfg.sampling = match args.sampling {
        Sampling::Dense => UnitarySampling::HaarDense,
        Sampling::Implicit => UnitarySampling::HaarImplicit,
    };
    cfg.distill = distill_base(args.rounds, args.mode);
    cfg.validate()?;
    let cross_cap = ((1usize << cfg.n_expanded) as f64).powf(-0.25);

    let outs = per_trial(seed, trials, |_, rng| {
        let target = haar_state(1 << args.n, rng)?;
        Ok(one_query_synthesize(&target, &cfg, rng)?)
    })?;
    let mut rec = Record::new(&[
        "trial",
        "aborted",
        "min_register_overlap",
        "max_cross_term",
        "mean_register_overlap",
        "rounds_completed",
        "final_overlap",
        "output_fidelity",
    ]);
    let mut pre = 0;
    let mut improved = 0;
    let mut fid = Vec::new();
    for (i, o) in outs.iter().enumerate() {
        let (lo, cross) = o.conditions;
        pre += usize::from(lo >= 0.125 && cross <= cross_cap);
        let fin = o.report.final_overlap();
        improved += usize::from(fin.is_some_and(|f| f > o.mean_register_overlap()));
        fid.extend(o.output_fidelity);
        rec.push(vec![
            i.to_string(),
            bool_cell(o.aborted()),
            num(lo),
            num(cross),
            num(o.mean_register_overlap()),
            o.report.rounds_completed.to_string(),
            opt(fin),
            opt(o.output_fidelity),
        ]);
    }
    let live = outs.iter().filter(|o| !o.aborted()).count();
    rec.set("n_expanded", cfg.n_expanded);
    rec.set("cross_term_cap", cross_cap);
    rec.set_rate("non_abort_rate", live, outs.len());
    rec.set_rate("preconditions_rate", pre, outs.len());
    rec.set_rate("improvement_rate", improved, live);
    rec.set("mean_output_fidelity", if fid.is_empty() { Value::Null } else { finite(mean(&fid)) });
    Ok(rec)
}

fn synth_two(args: &TwoQueryArgs, seed: u64, trials: u64) -> Result<Record> {
    check_qubits(args.n, 12)?;
    let mut cfg = TwoQueryConfig::new(args.n);
    if let Some(ne) = args.n_expanded {
        cfg.n_expanded = ne;
    }
    cfg.phase_bits = args.phase_bits;
    cfg.mode = match args.mode {
        TwoMode::Auto => TwoQueryMode::Auto,
        TwoMode::Dense => TwoQueryMode::Dense,
        TwoMode::Implicit => TwoQueryMode::Implicit,
    };
    let outs = per_trial(seed, trials, |_, rng| {
        let target = haar_state(1 << args.n, rng)?;
        Ok(two_query_synthesize(&target, &cfg, rng)?)
    })?;
    let mut rec = Record::new(&[
        "trial",
        "fidelity",
        "sorted_distance",
        "reconstruction_error_sq",
        "reconstruction_bound",
        "ancilla_residual_branches",
    ]);
    for (i, o) in outs.iter().enumerate() {
        rec.push(vec![
            i.to_string(),
            num(o.fidelity),
            num(o.sorted_distance),
            num(o.reconstruction_error_sq),
            num(o.reconstruction_bound),
            o.ancilla_residual_branches.to_string(),
        ]);
    }
    let inf: Vec<f64> = outs.iter().map(|o| o.infidelity()).collect();
    let dist: Vec<f64> = outs.iter().map(|o| o.sorted_distance).collect();
    rec.set("median_infidelity", finite(median(&inf)));
    rec.set("median_sorted_distance", finite(median(&dist)));
    rec.set("bound_violations", outs.iter().filter(|o| o.reconstruction_error_sq > o.reconstruction_bound).count());
    rec.set("ancilla_residual_branches", outs.iter().map(|o| o.ancilla_residual_branches).sum::<usize>());
    Ok(rec)
}

fn distill_run(args: &DistillArgs, seed: u64, trials: u64) -> Result<Record> {
    require((0.0..=1.0).contains(&args.a), || format!("a must lie in [0, 1], got {}", args.a))?;
    require(args.m >= 2, || format!("m must be at least 2, got {}", args.m))?;
    let mut cfg = distill_base(args.rounds, args.mode)
        .selection(match args.selection {
            Selection::First => SurvivorSelection::First,
            Selection::Random => SurvivorSelection::Random,
        })
        .odd(match args.odd {
            Odd::Drop => OddPolicy::Drop,
            Odd::PassThrough => OddPolicy::PassThrough,
        });
    match args.backend {
        Backend::Dense => check_qubits(args.n, 6)?,
        Backend::Scalar => check_qubits(args.n, 64)?,
    }
    let rounds = cfg.resolve_rounds(args.m, args.n)?;
    cfg.rounds = Rounds::Fixed(rounds);

    let reports = per_trial(seed, trials, |_, rng| {
        let r = match args.backend {
            Backend::Dense => {
                let tau = haar_state(1 << args.n, rng)?;
                let regs = (0..args.m)
                    .map(|_| Ok(mix_with_target(&tau, &haar_orthogonal_to(&tau, rng), args.a)?.density()))
                    .collect::<Result<Vec<DensityMatrix>>>()?;
                let rep = distill(regs, &tau, &cfg, rng)?;
                (
                    rep.aborted,
                    rep.rounds_completed,
                    rep.survivor_states.len(),
                    rep.final_overlap(),
                    rep.mean_final_overlap(),
                    rep.all_success_probability,
                )
            }
            Backend::Scalar => {
                let regs = vec![OrthogonalNoiseRegister::new(args.n, args.a)?; args.m];
                let rep = distill(regs, &(), &cfg, rng)?;
                (
                    rep.aborted,
                    rep.rounds_completed,
                    rep.survivor_states.len(),
                    rep.final_overlap(),
                    rep.mean_final_overlap(),
                    rep.all_success_probability,
                )
            }
        };
        Ok(r)
    })?;
    let mut rec = Record::new(&[
        "trial",
        "aborted",
        "rounds_completed",
        "survivors",
        "final_overlap",
        "mean_final_overlap",
        "all_success_probability",
    ]);
    for (i, r) in reports.iter().enumerate() {
        rec.push(vec![i.to_string(), bool_cell(r.0), r.1.to_string(), r.2.to_string(), opt(r.3), opt(r.4), num(r.5)]);
    }
    let aborts = reports.iter().filter(|r| r.0).count();
    let finals: Vec<f64> = reports.iter().filter_map(|r| r.3).collect();
    rec.set("rounds", rounds);
    rec.set_rate("abort_rate", aborts, reports.len());
    rec.set("abort_bound", 2.0 * (-(args.n as f64) / 12.0).exp());
    rec.set("mean_final_overlap", if finals.is_empty() { Value::Null } else { finite(mean(&finals)) });
    rec.set("recurrence_overlap", overlap_recurrence(args.a, rounds));
    rec.set("overlap_bound", overlap_bound(args.a, rounds).map_or(Value::Null, finite));
    Ok(rec)
}

fn solver(args: &HamiltonianArgs, m_bits: Option<u32>) -> Result<QmaSolver> {
    let text = read_input(&args.hamiltonian)?;
    let h = LocalHamiltonian::parse(&text).with_context(|| format!("parsing {}", args.hamiltonian.display()))?;
    let config = QmaConfig {
        twirl: match args.twirl {
            Ensemble::Clifford => TwirlEnsemble::Clifford,
            Ensemble::Haar => TwirlEnsemble::Haar,
        },
        filter: match args.filter {
            Filter::Squaring => FilterMethod::RepeatedSquaring,
            Filter::Spectral => FilterMethod::Spectral,
        },
        exponent: args.exponent,
        m_bits,
    };
    Ok(QmaSolver::new(&h, config)?)
}

fn describe_instance(rec: &mut Record, s: &QmaSolver) {
    let h = s.hamiltonian();
    rec.set("n_qubits", h.n_qubits());
    rec.set("a", h.a());
    rec.set("b", h.b());
    rec.set("ground_energy", s.eigen().values[0]);
    rec.set("exponent", s.exponent());
    rec.set("midpoint", s.midpoint());
}

fn qma(args: &QmaArgs, seed: u64, trials: u64) -> Result<Record> {
    let s = solver(&args.h, args.m_bits)?;
    require(s.m_bits().is_some(), || {
        "the gap is too small for an energy register; use `qma-exp` or pass --m-bits".into()
    })?;
    let runs = per_trial(seed, trials, |_, rng| Ok(s.search_one_query(rng)?))?;
    let mut rec = Record::new(&["trial", "aborted", "theta_code", "theta", "witness_energy"]);
    for (i, r) in runs.iter().enumerate() {
        rec.push(vec![
            i.to_string(),
            bool_cell(r.aborted()),
            r.estimate.theta_code.to_string(),
            num(r.estimate.theta),
            opt(r.witness_energy),
        ]);
    }
    let energies: Vec<f64> = runs.iter().filter_map(|r| r.witness_energy).collect();
    describe_instance(&mut rec, &s);
    rec.set("m_bits", s.m_bits());
    rec.set_rate("non_abort_rate", energies.len(), runs.len());
    rec.set("conditional_mean_energy", if energies.is_empty() { Value::Null } else { finite(mean(&energies)) });
    rec.set("max_witness_energy", energies.iter().cloned().reduce(f64::max).map_or(Value::Null, finite));
    rec.set("witnesses_above_midpoint", energies.iter().filter(|&&e| e > s.midpoint() + 1e-9).count());
    Ok(rec)
}

fn qma_exp(args: &QmaExpArgs, seed: u64, trials: u64) -> Result<Record> {
    require(args.gamma > 0.0 && args.gamma <= 1.0, || format!("gamma must lie in (0, 1], got {}", args.gamma))?;
    let s = solver(&args.h, None)?;
    let runs = per_trial(seed, trials, |_, rng| Ok(s.exp_search(rng)?))?;
    let mut rec = Record::new(&[
        "trial",
        "ground_overlap",
        "low_energy_mass",
        "filtered_overlap",
        "filtered_energy",
        "certified_overlap",
    ]);
    for (i, r) in runs.iter().enumerate() {
        rec.push(vec![
            i.to_string(),
            num(r.ground_overlap),
            num(r.low_energy_mass),
            num(r.filtered_overlap),
            opt(r.filtered_energy),
            num(r.certified_overlap),
        ]);
    }
    describe_instance(&mut rec, &s);
    let ground: Vec<f64> = runs.iter().map(|r| r.ground_overlap).collect();
    rec.set("gamma", args.gamma);
    rec.set("mean_ground_overlap", finite(mean(&ground)));
    rec.set_rate("certified_rate", runs.iter().filter(|r| r.certified_overlap >= args.gamma).count(), runs.len());
    Ok(rec)
}

fn extract(args: &ExtractArgs, seed: u64, trials: u64) -> Result<Record> {
    let text = read_input(&args.cnf)?;
    let base = CnfFormula::parse_dimacs(&text).with_context(|| format!("parsing {}", args.cnf.display()))?;
    let ex = Extractor::new(&base)?;
    let m = base.num_vars();
    let mut rec;
    let (wins, unsound);
    if let Some(t) = args.amplify_t {
        let outs = per_trial(seed, trials, |_, rng| Ok(ex.amplify(t, args.amplify_c, rng)?))?;
        rec = Record::new(&["trial", "success", "witness", "runs_used", "runs"]);
        for (i, o) in outs.iter().enumerate() {
            rec.push(vec![
                i.to_string(),
                bool_cell(o.witness.is_some()),
                o.witness.map(|w| w.to_string()).unwrap_or_default(),
                o.runs_used.to_string(),
                o.runs.to_string(),
            ]);
        }
        wins = outs.iter().filter(|o| o.witness.is_some()).count();
        unsound = outs.iter().filter(|o| o.witness.is_some_and(|w| !base.satisfied_by(w))).count();
        rec.set("t", t);
        rec.set("c", args.amplify_c);
        rec.set("runs_per_trial", outs[0].runs);
        rec.set("target_failure", 2f64.powi(-(t as i32)));
        let failures = outs.len() - wins;
        rec.set_rate("failure_rate", failures, outs.len());
    } else {
        let config = SearchConfig { isolate: !args.no_isolate };
        let outs = per_trial(seed, trials, |_, rng| Ok(ex.search(config, rng)?))?;
        rec = Record::new(&["trial", "success", "witness", "measured", "k", "surviving_witnesses"]);
        for (i, o) in outs.iter().enumerate() {
            rec.push(vec![
                i.to_string(),
                bool_cell(o.witness.is_some()),
                o.witness.map(|w| w.to_string()).unwrap_or_default(),
                o.measured.to_string(),
                o.k.to_string(),
                o.surviving_witnesses.to_string(),
            ]);
        }
        wins = outs.iter().filter(|o| o.witness.is_some()).count();
        unsound = outs.iter().filter(|o| o.witness.is_some_and(|w| !base.satisfied_by(w))).count();
        rec.set("fitted_c", wins as f64 / outs.len() as f64 * m as f64);
    }
    rec.set("num_vars", m);
    rec.set("num_clauses", base.clauses().len());
    rec.set("num_solutions", ex.solutions().len());
    rec.set_rate("success_rate", wins, trials as usize);
    rec.set("unsound_outputs", unsound);
    Ok(rec)
}

fn ensembles_check(args: &EnsemblesArgs, seed: u64, trials: u64) -> Result<Record> {
    check_qubits(args.n, 12)?;
    let d = 1usize << args.n;
    let zero = StateVector::zero(args.n)?;
    let weights = per_trial(seed, trials, |_, rng| {
        let v = match args.ensemble {
            Ensemble::Clifford => random_clifford(args.n, rng)?.apply(&zero)?,
            Ensemble::Haar => haar_state(d, rng)?,
        };
        Ok(v.amplitudes()[0].norm_sqr())
    })?;
    let mut rec = Record::new(&["trial", "weight"]);
    for (i, w) in weights.iter().enumerate() {
        rec.push(vec![i.to_string(), num(*w)]);
    }
    let sq: Vec<f64> = weights.iter().map(|w| w * w).collect();
    let df = d as f64;
    rec.set("dim", d);
    rec.set("mean_weight", mean(&weights));
    rec.set("mean_weight_std_error", finite(std_error(&weights)));
    rec.set("expected_mean_weight", 1.0 / df);
    rec.set("mean_weight_sq", mean(&sq));
    rec.set("mean_weight_sq_std_error", finite(std_error(&sq)));
    rec.set("expected_mean_weight_sq", 2.0 / (df * (df + 1.0)));
    rec.set_rate("paley_zygmund_rate", weights.iter().filter(|&&w| w >= 0.5 / df).count(), weights.len());
    rec.set("paley_zygmund_bound", (df + 1.0) / (8.0 * df));
    Ok(rec)
}

fn wasserstein_check(args: &WassersteinArgs, seed: u64, trials: u64) -> Result<Record> {
    check_qubits(args.n, 20)?;
    let d = 1usize << args.n;
    let reference = Rayleigh::complex_gaussian_modulus();
    let w = per_trial(seed, trials, |_, rng| {
        let xs: Vec<f64> = match args.source {
            Source::Iid => (0..d).map(|_| reference.sample(rng)).collect(),
            Source::Haar => {
                let s = (d as f64).sqrt();
                haar_state(d, rng)?.amplitudes().iter().map(|z| z.norm() * s).collect()
            }
        };
        Ok(empirical_wasserstein2_squared(&xs, &reference)?)
    })?;
    let scale = d as f64 / (d as f64).ln();
    let mut rec = Record::new(&["trial", "w2_sq", "scaled"]);
    for (i, x) in w.iter().enumerate() {
        rec.push(vec![i.to_string(), num(*x), num(x * scale)]);
    }
    rec.set("dim", d);
    rec.set("mean_w2_sq", mean(&w));
    rec.set("mean_w2_sq_std_error", finite(std_error(&w)));
    rec.set("constant", mean(&w) * scale);
    rec.set("constant_definition", json!("mean W2^2 * d / ln d"));
    Ok(rec)
}
