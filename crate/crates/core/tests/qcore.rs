mod common;

use common::{c, kron, random_density, random_unit_vector, swap_circuit};
use nalgebra::DMatrix;
use statesynth::ensembles::{haar_orthogonal_to, haar_state, haar_unitary, RngStream};
use statesynth::qcore::*;
use statesynth::{Error, C64};

fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn overlap_examples() {
    let zero = StateVector::basis(1, 0).unwrap();
    let one = StateVector::basis(1, 1).unwrap();
    let plus = StateVector::uniform(1).unwrap();
    assert_eq!(overlap(&zero, &zero).unwrap(), 1.0);
    assert_eq!(overlap(&zero, &one).unwrap(), 0.0);
    assert!((overlap(&plus, &zero).unwrap() - 0.5).abs() < 1e-15);
    assert!(matches!(overlap(&zero, &StateVector::zero(2).unwrap()), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn overlap_is_symmetric() {
    let mut rng = RngStream::new(1, 0);
    for _ in 0..50 {
        let a = haar_state(8, &mut rng).unwrap();
        let b = haar_state(8, &mut rng).unwrap();
        assert!((overlap(&a, &b).unwrap() - overlap(&b, &a).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn state_validation() {
    assert!(matches!(StateVector::new(vec![c(1.0), c(1.0)]), Err(Error::NotNormalized { .. })));
    assert!(matches!(StateVector::new(vec![c(1.0), c(0.0), c(0.0)]), Err(Error::NotPowerOfTwo(3))));
    assert!(matches!(StateVector::normalize(vec![c(0.0), c(0.0)]), Err(Error::ZeroVector)));
    let s = StateVector::normalize(vec![c(3.0), c(4.0)]).unwrap();
    assert!((s.amplitudes()[1].re - 0.8).abs() < 1e-15);
}

#[test]
fn dm_overlap_examples() {
    let zero = StateVector::basis(1, 0).unwrap();
    assert_eq!(dm_overlap(&zero.density(), &zero).unwrap(), 1.0);
    let mixed = DensityMatrix::maximally_mixed(2).unwrap();
    assert!((dm_overlap(&mixed, &zero).unwrap() - 0.5).abs() < 1e-15);
    let mut rng = RngStream::new(2, 0);
    for _ in 0..20 {
        let psi = haar_state(8, &mut rng).unwrap();
        let tau = haar_state(8, &mut rng).unwrap();
        let dense = DensityMatrix::new(psi.density().matrix().clone()).unwrap();
        let expected = overlap(&psi, &tau).unwrap();
        assert!((dm_overlap(&psi.density(), &tau).unwrap() - expected).abs() < 1e-14);
        assert!((dm_overlap(&dense, &tau).unwrap() - expected).abs() < 1e-14);
    }
}

#[test]
fn density_validation() {
    let not_herm = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.0), c(0.5)]);
    assert!(matches!(DensityMatrix::new(not_herm), Err(Error::NotHermitian { .. })));
    let negative = DMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
    assert!(matches!(DensityMatrix::new(negative), Err(Error::NotPositive { .. })));
    let trace2 = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(1.0)]);
    assert!(matches!(DensityMatrix::new(trace2.clone()), Err(Error::BadTrace { .. })));
    let unnorm = DensityMatrix::new_unnormalized(trace2).unwrap();
    assert!(!unnorm.is_normalized());
    assert!(matches!(DensityMatrix::new(DMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
}

#[test]
fn swap_test_examples() {
    let zero = StateVector::basis(1, 0).unwrap().density();
    let one = StateVector::basis(1, 1).unwrap().density();
    let (p, s) = swap_test_exact(&zero, &zero).unwrap();
    assert!((p - 1.0).abs() < 1e-15);
    assert!(max_diff(s.matrix(), zero.matrix()) < 1e-15);

    let (p, s) = swap_test_exact(&zero, &one).unwrap();
    let (p_ref, s_ref) = swap_circuit(zero.matrix(), one.matrix());
    assert!((p - 0.5).abs() < 1e-15 && (p_ref - 0.5).abs() < 1e-12);
    let half = DMatrix::from_diagonal_element(2, 2, c(0.5));
    assert!(max_diff(s.matrix(), &half) < 1e-15);
    assert!(max_diff(&s_ref, &half) < 1e-12);
}

#[test]
fn swap_test_matches_gate_level_circuit() {
    let mut rng = RngStream::new(3, 0);
    let mut worst = 0.0f64;
    for &dim in &[2usize, 4, 8] {
        for trial in 0..200 {
            // Alternate pure/pure, pure/mixed and mixed/mixed inputs.
            let make = |kind: usize, rng: &mut RngStream| -> DensityMatrix {
                if kind == 0 {
                    haar_state(dim, rng).unwrap().density()
                } else {
                    DensityMatrix::new(random_density(dim, 1 + kind % dim, rng)).unwrap()
                }
            };
            let r1 = make(trial % 3, &mut rng);
            let r2 = make((trial / 3) % 3, &mut rng);
            let (p, s) = swap_test_exact(&r1, &r2).unwrap();
            let (p_ref, s_ref) = swap_circuit(r1.matrix(), r2.matrix());
            worst = worst.max((p - p_ref).abs()).max(max_diff(s.matrix(), &s_ref));
            assert!((0.5..=1.0).contains(&p));
            assert!(DensityMatrix::new(s.matrix().clone()).is_ok(), "survivor must be a valid state");
            assert!((swap_test_probability(&r1, &r2).unwrap() - p).abs() < 1e-14);
        }
    }
    assert!(worst < 1e-10, "max deviation {worst:e}");
}

#[test]
fn swap_survivor_is_partial_trace_of_post_selected_joint() {
    // (I + S)(rho1 (x) rho2)(I + S) / 4, traced over register 2, normalized.
    let mut rng = RngStream::new(4, 0);
    let d = 4;
    let r1 = DensityMatrix::new(random_density(d, 2, &mut rng)).unwrap();
    let r2 = DensityMatrix::new(random_density(d, 3, &mut rng)).unwrap();
    let mut swap = DMatrix::<C64>::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            swap[(j * d + i, i * d + j)] = c(1.0);
        }
    }
    let proj = (DMatrix::identity(d * d, d * d) + &swap) * c(0.5);
    let joint = &proj * kron(r1.matrix(), r2.matrix()) * &proj;
    let tr: f64 = (0..d * d).map(|i| joint[(i, i)].re).sum();
    let joint = DensityMatrix::new(joint * c(1.0 / tr)).unwrap();
    let reduced = partial_trace_pair(&joint, Keep::First).unwrap();
    let (_, survivor) = swap_test_exact(&r1, &r2).unwrap();
    assert!(max_diff(reduced.matrix(), survivor.matrix()) < 1e-12);
}

#[test]
fn partial_trace_examples() {
    let mut rng = RngStream::new(5, 0);
    let rho = random_density(4, 2, &mut rng);
    let sigma = random_density(4, 4, &mut rng);
    let joint = DensityMatrix::new(kron(&rho, &sigma)).unwrap();
    assert!(max_diff(partial_trace_pair(&joint, Keep::First).unwrap().matrix(), &rho) < 1e-14);
    assert!(max_diff(partial_trace_pair(&joint, Keep::Second).unwrap().matrix(), &sigma) < 1e-14);

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = StateVector::new(vec![c(s), c(0.0), c(0.0), c(s)]).unwrap();
    let reduced = partial_trace_pair(&bell.density(), Keep::First).unwrap();
    assert!(max_diff(reduced.matrix(), &DMatrix::from_diagonal_element(2, 2, c(0.5))) < 1e-15);

    assert!(partial_trace_pair(&DensityMatrix::maximally_mixed(8).unwrap(), Keep::First).is_err());
}

#[test]
fn partial_trace_of_swapped_product() {
    // Oracle: (S (r1 (x) r2))[(i,k),(j,l)] = r1[k,j] r2[i,l], so summing k = l gives r2 r1.
    let mut rng = RngStream::new(6, 0);
    let d = 4;
    let r1 = random_density(d, 2, &mut rng);
    let r2 = random_density(d, 3, &mut rng);
    let mut sm = DMatrix::<C64>::zeros(d * d, d * d);
    for i in 0..d {
        for k in 0..d {
            for j in 0..d {
                for l in 0..d {
                    sm[(i * d + k, j * d + l)] = r1[(k, j)] * r2[(i, l)];
                }
            }
        }
    }
    let mut expected = DMatrix::<C64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                expected[(i, j)] += r2[(i, k)] * r1[(k, j)];
            }
        }
    }
    let traced = partial_trace_operator(&sm, Keep::First).unwrap();
    assert!(max_diff(&traced, &expected) < 1e-14);
    assert!(partial_trace_operator(&DMatrix::zeros(8, 8), Keep::First).is_err());
}

#[test]
fn unitary_application() {
    let mut rng = RngStream::new(7, 0);
    let psi = haar_state(8, &mut rng).unwrap();
    let id = UnitaryMatrix::identity(8).unwrap();
    assert!(apply_unitary(&id, &psi).unwrap().max_abs_diff(&psi).unwrap() < 1e-15);

    let h = UnitaryMatrix::hadamard_all(3).unwrap();
    let out = apply_unitary(&h, &StateVector::zero(3).unwrap()).unwrap();
    assert!(out.max_abs_diff(&StateVector::uniform(3).unwrap()).unwrap() < 1e-15);

    let u = haar_unitary(8, &mut rng).unwrap();
    let back = u.apply_adjoint(&apply_unitary(&u, &psi).unwrap()).unwrap();
    assert!(back.max_abs_diff(&psi).unwrap() < 1e-9);
    assert!((apply_unitary(&u, &psi).unwrap().norm_sq() - 1.0).abs() < 1e-9);
    assert!(matches!(apply_unitary(&u, &StateVector::zero(2).unwrap()), Err(Error::DimensionMismatch { .. })));

    let not_unitary = DMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)]);
    assert!(matches!(UnitaryMatrix::new(not_unitary), Err(Error::NotUnitary { .. })));
}

/// Two pure inputs `sqrt(a_i) tau + sqrt(1 - a_i) phi_i` with `phi_1 _|_ phi_2 _|_ tau`.
fn orthogonal_pair(a1: f64, a2: f64, rng: &mut RngStream) -> (StateVector, DensityMatrix, DensityMatrix) {
    let tau = haar_state(8, rng).unwrap();
    let phi1 = haar_orthogonal_to(&tau, rng);
    // Orthogonalize a second noise vector against both tau and phi1.
    let mut v = random_unit_vector(8, rng);
    for base in [&tau, &phi1] {
        let proj: C64 = base.amplitudes().iter().zip(&v).map(|(b, x)| b.conj() * x).sum();
        v.iter_mut().zip(base.amplitudes()).for_each(|(x, b)| *x -= proj * b);
    }
    let phi2 = StateVector::normalize(v).unwrap();
    let mix = |a: f64, phi: &StateVector| {
        let amps =
            tau.amplitudes().iter().zip(phi.amplitudes()).map(|(t, p)| t * a.sqrt() + p * (1.0 - a).sqrt()).collect();
        StateVector::normalize(amps).unwrap().density()
    };
    let r1 = mix(a1, &phi1);
    let r2 = mix(a2, &phi2);
    (tau, r1, r2)
}

#[test]
fn one_iteration_overlap_properties() {
    let mut rng = RngStream::new(8, 0);
    let (tau, r1, r2) = orthogonal_pair(0.5, 0.5, &mut rng);
    let (p, s) = swap_test_exact(&r1, &r2).unwrap();
    assert!((dm_overlap(&s, &tau).unwrap() - 0.6).abs() < 1e-12);
    assert!((p - 0.625).abs() < 1e-12);

    for i in 1..=9 {
        let a = i as f64 / 10.0;
        for j in i..=9 {
            let a2 = j as f64 / 10.0;
            let (tau, r1, r2) = orthogonal_pair(a, a2, &mut rng);
            let (_, s) = swap_test_exact(&r1, &r2).unwrap();
            let out = dm_overlap(&s, &tau).unwrap();
            assert!(out >= (a + a2) / 2.0 - 1e-12, "part 1 at ({a}, {a2})");
            assert!(out >= a * (1.0 + a) / (1.0 + a * a) - 1e-12, "part 2 at ({a}, {a2})");
        }
    }
}

#[test]
fn reduce_leading_matches_dense_route() {
    let mut rng = RngStream::new(9, 0);
    let psi = haar_state(32, &mut rng).unwrap();
    let fast = psi.density().reduce_leading(2).unwrap();
    let dense = DensityMatrix::new(psi.density().matrix().clone()).unwrap().reduce_leading(2).unwrap();
    assert!(max_diff(fast.matrix(), dense.matrix()) < 1e-14);
    assert!((fast.trace() - 1.0).abs() < 1e-12);
}
