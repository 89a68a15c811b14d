use statesynth::distill::DistillationConfig;
use statesynth::ensembles::{haar_state, haar_unitary, RngStream};
use statesynth::exec::Execution;
use statesynth::one_query::*;
use statesynth::phase_states::{build_phase_state, PhaseOracle};
use statesynth::qcore::{overlap, StateVector, UnitaryMatrix};
use statesynth::stats::{mean, std_error};

#[test]
fn phase_target_with_identity_twirl() {
    let tau = build_phase_state(&PhaseOracle::from_fn(4, |x| x % 3 == 0).unwrap());
    let out = one_query_register(&tau, &UnitaryMatrix::identity(16).unwrap()).unwrap();
    assert!(out.max_abs_diff(&tau).unwrap() < 1e-14);

    let mut cfg = OneQueryConfig::new(4, 8);
    cfg.n_expanded = 4;
    cfg.sampling = UnitarySampling::Identity;
    let rep = one_query_synthesize(&tau, &cfg, &mut RngStream::new(60, 0)).unwrap();
    assert!(!rep.aborted());
    assert!((rep.output_fidelity.unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn zero_target_with_hadamard() {
    let tau = StateVector::zero(4).unwrap();
    let out = one_query_register(&tau, &UnitaryMatrix::hadamard_all(4).unwrap()).unwrap();
    assert!((overlap(&out, &tau).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn register_is_a_unit_vector_with_the_l1_overlap() {
    let mut rng = RngStream::new(61, 0);
    let tau = haar_state(64, &mut rng).unwrap();
    for _ in 0..50 {
        let u = haar_unitary(64, &mut rng).unwrap();
        let out = one_query_register(&tau, &u).unwrap();
        assert!((out.norm_sq() - 1.0).abs() < 1e-12);
        // Direct: |<tau|U^dagger p>|^2 = |<U tau|p>|^2 with p_x = sgn(Re(U tau)_x) / sqrt(d).
        let w = u.apply_slice(tau.amplitudes());
        let re: f64 = w.iter().map(|z| z.re.abs()).sum();
        let im: f64 = w.iter().map(|z| if z.re < 0.0 { -z.im } else { z.im }).sum();
        let want = (re * re + im * im) / 64.0;
        assert!(want >= re * re / 64.0);
        assert!((overlap(&out, &tau).unwrap() - want).abs() < 1e-10);
    }
    assert!(one_query_register(&tau, &UnitaryMatrix::identity(32).unwrap()).is_err());
}

#[test]
fn mean_overlap_is_about_one_over_pi() {
    let tau = StateVector::zero(8).unwrap();
    let exec = Execution::default();
    let implicit: Vec<f64> = exec.map_range(10_000, |i| {
        let r = one_query_register_implicit(&tau, &mut RngStream::new(62, i as u64)).unwrap();
        overlap(&r, &tau).unwrap()
    });
    let m = mean(&implicit);
    let se = std_error(&implicit);
    assert!((m - std::f64::consts::FRAC_1_PI).abs() <= 4.0 * se + 2e-3, "mean {m}");

    // The dense route draws from the same law.
    let dense: Vec<f64> = exec.map_range(300, |i| {
        let mut rng = RngStream::new(63, i as u64);
        let u = haar_unitary(256, &mut rng).unwrap();
        overlap(&one_query_register(&tau, &u).unwrap(), &tau).unwrap()
    });
    let gap = (mean(&dense) - m).abs();
    assert!(gap <= 4.0 * (std_error(&dense).powi(2) + se * se).sqrt());
}

#[test]
fn config_validation() {
    let tau = StateVector::zero(2).unwrap();
    let mut cfg = OneQueryConfig::new(2, 1);
    assert!(one_query_synthesize(&tau, &cfg, &mut RngStream::new(0, 0)).is_err());
    cfg.m = 4;
    cfg.n_expanded = 1;
    assert!(cfg.validate().is_err());
    cfg.n_expanded = 13;
    assert!(cfg.validate().is_err());
    let cfg = OneQueryConfig::new(3, 4);
    assert!(one_query_synthesize(&tau, &cfg, &mut RngStream::new(0, 0)).is_err());
}

#[test]
fn conditions_and_improvement_at_desk_scale() {
    let mut cfg = OneQueryConfig::new(4, 96);
    cfg.sampling = UnitarySampling::HaarImplicit;
    cfg.distill = DistillationConfig::default();
    let trials = 40;
    let dprime = 256.0f64;
    let outcomes: Vec<OneQueryOutcome> = (0..trials)
        .map(|i| {
            let mut rng = RngStream::new(64, i);
            let tau = haar_state(16, &mut rng).unwrap();
            one_query_synthesize(&tau, &cfg, &mut rng).unwrap()
        })
        .collect();
    let min_ok = outcomes.iter().filter(|o| o.conditions.0 >= 1.0 / 8.0).count();
    let cross_ok = outcomes.iter().filter(|o| o.conditions.1 <= dprime.powf(-0.25)).count();
    assert!(min_ok as f64 >= 0.95 * trials as f64);
    assert!(cross_ok as f64 >= 0.95 * trials as f64);
    let live: Vec<&OneQueryOutcome> = outcomes.iter().filter(|o| !o.aborted()).collect();
    assert!(!live.is_empty());
    let improved = live.iter().filter(|o| o.report.final_overlap().unwrap() > o.mean_register_overlap()).count();
    assert!(improved as f64 >= 0.9 * live.len() as f64);
    for o in &live {
        let rho = o.output.as_ref().unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-10);
        assert_eq!(rho.dim(), 16);
    }
}

#[test]
fn reproducible_across_execution_modes() {
    let tau = haar_state(4, &mut RngStream::new(65, 0)).unwrap();
    let mut cfg = OneQueryConfig::new(2, 16);
    cfg.n_expanded = 5;
    let run = |exec| {
        let mut c = cfg;
        c.distill = DistillationConfig::default().execution(exec);
        one_query_synthesize(&tau, &c, &mut RngStream::new(66, 3)).unwrap()
    };
    let a = run(Execution::Sequential);
    let b = run(Execution::Parallel);
    assert_eq!(a.register_overlaps, b.register_overlaps);
    assert_eq!(a.report.survivor_counts, b.report.survivor_counts);
    assert_eq!(a.output_fidelity, b.output_fidelity);
}
