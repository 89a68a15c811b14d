use nalgebra::DMatrix;

use super::density::{hs_inner, DensityMatrix};
use super::linalg::cmatmul;
use super::state::check_dims;
use crate::{Result, C64};

/// Outcome-0 probability of the swap test, `(1 + tr(rho1 rho2)) / 2`.
pub fn swap_test_probability(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    check_dims(rho1.dim(), rho2.dim())?;
    let t = match (rho1.pure_state(), rho2.pure_state()) {
        (Some(a), Some(b)) => a.inner(b)?.norm_sqr(),
        (Some(a), None) => rho2.expectation_vec(a.amplitudes()),
        (None, Some(b)) => rho1.expectation_vec(b.amplitudes()),
        (None, None) => hs_inner(rho1.matrix(), rho2.matrix()),
    };
    Ok(((1.0 + t) / 2.0).clamp(0.5, 1.0))
}

/// Swap test between two registers, post-selected on outcome 0.
///
/// Returns the outcome-0 probability and the state left on the first register:
/// `(rho1 + rho2 + rho1 rho2 + rho2 rho1) / (2 (1 + tr(rho1 rho2)))`.
pub fn swap_test_exact(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<(f64, DensityMatrix)> {
    check_dims(rho1.dim(), rho2.dim())?;
    let prod = product(rho1, rho2);
    let t = prod.trace().re;
    let p = ((1.0 + t) / 2.0).clamp(0.5, 1.0);
    let scale = 1.0 / (2.0 * (1.0 + t));
    let d = rho1.dim();
    let (a, b) = (rho1.matrix(), rho2.matrix());
    let survivor = DMatrix::from_fn(d, d, |i, j| (a[(i, j)] + b[(i, j)] + prod[(i, j)] + prod[(j, i)].conj()) * scale);
    Ok((p, DensityMatrix::from_raw(survivor)))
}

/// `rho1 rho2`, using the rank-one shortcut when either side is pure.
fn product(rho1: &DensityMatrix, rho2: &DensityMatrix) -> DMatrix<C64> {
    let d = rho1.dim();
    if let (Some(a), Some(b)) = (rho1.pure_state(), rho2.pure_state()) {
        let c = a.inner(b).expect("dimensions checked by caller");
        let (a, b) = (a.amplitudes(), b.amplitudes());
        return DMatrix::from_fn(d, d, |i, j| a[i] * b[j].conj() * c);
    }
    if let Some(a) = rho1.pure_state() {
        // |a><a| rho2 = |a> (rho2 a)^dagger
        let a = a.amplitudes();
        let w = mat_vec(rho2.matrix(), a);
        return DMatrix::from_fn(d, d, |i, j| a[i] * w[j].conj());
    }
    if let Some(b) = rho2.pure_state() {
        // rho1 |b><b| = (rho1 b) <b|
        let b = b.amplitudes();
        let w = mat_vec(rho1.matrix(), b);
        return DMatrix::from_fn(d, d, |i, j| w[i] * b[j].conj());
    }
    cmatmul(rho1.matrix(), rho2.matrix())
}

fn mat_vec(m: &DMatrix<C64>, v: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); m.nrows()];
    for (j, &vj) in v.iter().enumerate() {
        for (o, &mij) in out.iter_mut().zip(m.column(j).iter()) {
            *o += mij * vj;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{dm_overlap, StateVector};

    #[test]
    fn identical_pure_states_pass_unchanged() {
        let z0 = StateVector::basis(1, 0).unwrap().density();
        let (p, s) = swap_test_exact(&z0, &z0).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!(s.max_abs_diff(&z0) < 1e-15);
    }

    #[test]
    fn orthogonal_basis_states_mix() {
        let z0 = StateVector::basis(1, 0).unwrap().density();
        let z1 = StateVector::basis(1, 1).unwrap().density();
        let (p, s) = swap_test_exact(&z0, &z1).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!(s.max_abs_diff(&DensityMatrix::maximally_mixed(2).unwrap()) < 1e-15);
    }

    #[test]
    fn half_overlap_orthogonal_noise_gives_three_fifths() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |x: f64| C64::new(x, 0.0);
        let a = StateVector::new(vec![c(h), c(h), c(0.0), c(0.0)]).unwrap();
        let b = StateVector::new(vec![c(h), c(0.0), c(h), c(0.0)]).unwrap();
        let tau = StateVector::basis(2, 0).unwrap();
        let (p, s) = swap_test_exact(&a.density(), &b.density()).unwrap();
        assert!((p - 5.0 / 8.0).abs() < 1e-15);
        assert!((dm_overlap(&s, &tau).unwrap() - 0.6).abs() < 1e-15);
        assert!((swap_test_probability(&a.density(), &b.density()).unwrap() - p).abs() < 1e-15);
    }

    #[test]
    fn pure_shortcut_matches_dense_product() {
        let c = |x: f64, y: f64| C64::new(x, y);
        let a = StateVector::normalize(vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.7, 0.0), c(0.1, -0.4)]).unwrap();
        let b = StateVector::normalize(vec![c(0.1, 0.2), c(0.4, 0.0), c(-0.3, 0.3), c(0.2, 0.2)]).unwrap();
        let mixed =
            DensityMatrix::from_raw((a.density().into_matrix() + b.density().into_matrix()) * C64::new(0.5, 0.0));
        let dense_a = DensityMatrix::from_raw(a.density().into_matrix());
        let (p1, s1) = swap_test_exact(&a.density(), &mixed).unwrap();
        let (p2, s2) = swap_test_exact(&dense_a, &mixed).unwrap();
        let (p3, s3) = swap_test_exact(&mixed, &a.density()).unwrap();
        assert!((p1 - p2).abs() < 1e-14 && (p1 - p3).abs() < 1e-14);
        assert!(s1.max_abs_diff(&s2) < 1e-14 && s1.max_abs_diff(&s3) < 1e-14);
    }
}
