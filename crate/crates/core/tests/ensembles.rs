mod common;

use common::{canonical_phase, same, single_qubit_cliffords, three_sigma};
use rand::Rng;
use statesynth::ensembles::*;
use statesynth::qcore::StateVector;
use statesynth::stats::{mean, std_error};
use statesynth::Error;

#[test]
fn streams_are_reproducible_and_distinct() {
    let draw = |seed, id| {
        let mut r = RngStream::new(seed, id);
        (0..8).map(|_| r.random::<u64>()).collect::<Vec<_>>()
    };
    assert_eq!(draw(1, 2), draw(1, 2));
    assert_ne!(draw(1, 2), draw(1, 3));
    assert_ne!(draw(1, 2), draw(2, 2));
    let parent = RngStream::new(5, 0);
    let a: u64 = parent.child(3).random();
    let b: u64 = parent.child(3).random();
    assert_eq!(a, b);
    let c: u64 = parent.child(4).random();
    assert_ne!(a, c);
}

#[test]
fn samplers_are_reproducible() {
    let a = haar_state(16, &mut RngStream::new(9, 1)).unwrap();
    let b = haar_state(16, &mut RngStream::new(9, 1)).unwrap();
    assert_eq!(a, b);
    let c1 = random_clifford(3, &mut RngStream::new(9, 2)).unwrap();
    let c2 = random_clifford(3, &mut RngStream::new(9, 2)).unwrap();
    assert_eq!(c1, c2);
}

#[test]
fn haar_state_moments() {
    let mut rng = RngStream::new(10, 0);
    let trials = 10_000;
    let mut second = Vec::with_capacity(trials);
    let mut fourth = Vec::with_capacity(trials);
    for _ in 0..trials {
        let psi = haar_state(8, &mut rng).unwrap();
        second.push(psi.amplitudes()[3].norm_sqr());
        fourth.push(psi.amplitudes().iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>());
    }
    assert!((mean(&second) - 1.0 / 8.0).abs() <= 3.0 * std_error(&second));
    assert!((mean(&fourth) - 2.0 / 9.0).abs() <= 3.0 * std_error(&fourth));
    assert!(matches!(haar_state(3, &mut rng), Err(Error::NotPowerOfTwo(3))));
}

#[test]
fn haar_unitary_first_column_matches_haar_state() {
    let mut rng = RngStream::new(11, 0);
    let trials = 4000;
    let mut second = Vec::new();
    let mut fourth = Vec::new();
    for _ in 0..trials {
        let u = haar_unitary(8, &mut rng).unwrap();
        assert!(u.unitarity_defect() < 1e-8);
        let col = u.column(0);
        second.push(col[5].norm_sqr());
        fourth.push(col.iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>());
    }
    assert!((mean(&second) - 1.0 / 8.0).abs() <= 3.0 * std_error(&second));
    assert!((mean(&fourth) - 2.0 / 9.0).abs() <= 3.0 * std_error(&fourth));
}

#[test]
fn single_qubit_cliffords_are_uniform() {
    let classes = single_qubit_cliffords();
    assert_eq!(classes.len(), 24);
    let mut counts = [0usize; 24];
    let mut rng = RngStream::new(12, 0);
    let trials = 100_000;
    for _ in 0..trials {
        let u = canonical_phase(random_clifford(1, &mut rng).unwrap().dense().unwrap().matrix());
        let idx = classes.iter().position(|g| same(g, &u)).expect("every draw is one of the 24 classes");
        counts[idx] += 1;
    }
    let p = 1.0 / 24.0;
    for &k in &counts {
        let freq = k as f64 / trials as f64;
        assert!((freq - p).abs() <= three_sigma(p, trials) * 1.5, "class frequency {freq}");
    }
    let expected = trials as f64 * p;
    let chi2: f64 = counts.iter().map(|&k| (k as f64 - expected).powi(2) / expected).sum();
    // 23 degrees of freedom; the 0.999 quantile is about 49.7.
    assert!(chi2 < 49.7, "chi-square {chi2}");
}

#[test]
fn clifford_conjugates_paulis_to_paulis() {
    let mut rng = RngStream::new(13, 0);
    for n in 1..=4 {
        let cl = random_clifford(n, &mut rng).unwrap();
        for j in 0..n {
            let img = cl.conjugate(Pauli::z_bit(j));
            assert!(img.x != 0 || img.z != 0, "image of Z must be a non-identity Pauli");
        }
    }
}

fn clifford_overlap_moments(n: usize, trials: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = RngStream::new(seed, 0);
    let tau = haar_state(1 << n, &mut rng).unwrap();
    let mut second = Vec::with_capacity(trials);
    let mut fourth = Vec::with_capacity(trials);
    for _ in 0..trials {
        let cl = random_clifford(n, &mut rng).unwrap();
        let v = cl.apply(&tau).unwrap();
        let w = v.amplitudes()[1].norm_sqr();
        second.push(w);
        fourth.push(w * w);
    }
    (second, fourth)
}

#[test]
fn two_qubit_clifford_is_a_two_design() {
    let d = 4.0;
    let (second, fourth) = clifford_overlap_moments(2, 20_000, 14);
    assert!((mean(&second) - 1.0 / d).abs() <= 3.0 * std_error(&second));
    let expected4 = 2.0 / (d * (d + 1.0));
    assert!((mean(&fourth) - expected4).abs() <= 3.0 * std_error(&fourth));
}

#[test]
fn paley_zygmund_lower_bound() {
    for n in [2usize, 3] {
        let d = (1usize << n) as f64;
        let (second, _) = clifford_overlap_moments(n, 10_000, 15 + n as u64);
        let hits = second.iter().filter(|&&w| w >= 0.5 / d).count();
        let freq = hits as f64 / second.len() as f64;
        let bound = 0.25 / 2.0;
        assert!(freq >= bound - three_sigma(bound, second.len()), "n = {n}: {freq}");
    }
}

#[test]
fn twirl_ensemble_switch() {
    let mut rng = RngStream::new(16, 0);
    for e in [TwirlEnsemble::Clifford, TwirlEnsemble::Haar] {
        let u = e.sample(3, &mut rng).unwrap();
        assert_eq!(u.dim(), 8);
        assert!(u.unitarity_defect() < 1e-8);
    }
    let psi = StateVector::zero(3).unwrap();
    let h = CliffordElement::hadamard_all(3).apply(&psi).unwrap();
    assert!(h.max_abs_diff(&StateVector::uniform(3).unwrap()).unwrap() < 1e-12);
}
