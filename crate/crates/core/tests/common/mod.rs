//! Independent reference computations shared by the integration suites.
//!
//! Nothing here calls the library's own formulas for the quantity being checked: the swap
//! test is simulated gate by gate, Cliffords are enumerated by group closure, Wasserstein
//! pieces are integrated numerically and Wilson bounds come from inverting the score test.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use statesynth::ensembles::complex_gaussian;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `G G^dagger / tr` for a `dim x rank` complex Gaussian `G`.
pub fn random_density<R: Rng>(dim: usize, rank: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, rank, |_, _| complex_gaussian(rng));
    let m = &g * g.adjoint();
    let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    m * c(1.0 / tr)
}

pub fn random_unit_vector<R: Rng>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    DMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Gate-level swap test on `|0><0| (x) rho1 (x) rho2`.
///
/// Applies `H` on the ancilla, the controlled swap, `H` again, projects the ancilla on `|0>`
/// and traces out the second register. Returns the outcome probability and the normalized
/// post-measurement state of the first register.
pub fn swap_circuit(rho1: &DMatrix<C64>, rho2: &DMatrix<C64>) -> (f64, DMatrix<C64>) {
    let d = rho1.nrows();
    let dd = d * d;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h1 = DMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)]);
    let h = kron(&h1, &DMatrix::identity(dd, dd));
    let mut cswap = DMatrix::<C64>::zeros(2 * dd, 2 * dd);
    for i in 0..d {
        for j in 0..d {
            cswap[(i * d + j, i * d + j)] = c(1.0);
            cswap[(dd + j * d + i, dd + i * d + j)] = c(1.0);
        }
    }
    let anc0 = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    let initial = kron(&anc0, &kron(rho1, rho2));
    let circuit = &h * &cswap * &h;
    let out = &circuit * initial * circuit.adjoint();
    // Ancilla 0 block: indices 0..dd.
    let block = out.view((0, 0), (dd, dd)).into_owned();
    let p: f64 = (0..dd).map(|i| block[(i, i)].re).sum();
    let mut reduced = DMatrix::<C64>::zeros(d, d);
    for i in 0..d {
        for k in 0..d {
            let mut acc = c(0.0);
            for j in 0..d {
                acc += block[(i * d + j, k * d + j)];
            }
            reduced[(i, k)] = acc;
        }
    }
    (p, reduced * c(1.0 / p))
}

/// The 24 single-qubit Cliffords modulo phase, by closing `{H, S}` under products.
///
/// Each element is normalized so that its first nonzero entry (column-major) is real and
/// positive.
pub fn single_qubit_cliffords() -> Vec<DMatrix<C64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = DMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)]);
    let sg = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), C64::new(0.0, 1.0)]);
    let mut group = vec![canonical_phase(&DMatrix::identity(2, 2))];
    let mut frontier = group.clone();
    while let Some(g) = frontier.pop() {
        for gen in [&h, &sg] {
            let next = canonical_phase(&(gen * &g));
            if !group.iter().any(|x| same(x, &next)) {
                group.push(next.clone());
                frontier.push(next);
            }
        }
    }
    group
}

pub fn canonical_phase(u: &DMatrix<C64>) -> DMatrix<C64> {
    let first = u.iter().find(|z| z.norm() > 1e-9).copied().unwrap_or(c(1.0));
    let phase = first.conj() / first.norm();
    u * phase
}

pub fn same(a: &DMatrix<C64>, b: &DMatrix<C64>) -> bool {
    (a - b).iter().all(|z| z.norm() < 1e-9)
}

/// `W_2^2` against the Rayleigh law of scale `sigma`, by Simpson quadrature in `r`.
///
/// Piece `i` couples the `i`-th order statistic with the quantile slab
/// `[Q((i-1)/N), Q(i/N)]`, written as an integral of `(x - r)^2 f(r) dr`. The last slab is cut
/// where the remaining tail mass is below `1e-300`.
pub fn wasserstein2_sq_quadrature(samples: &[f64], sigma: f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    let s2 = sigma * sigma;
    let quantile = |q: f64| sigma * (-2.0 * (1.0 - q).ln()).sqrt();
    let density = |r: f64| r / s2 * (-r * r / (2.0 * s2)).exp();
    let r_max = sigma * (2.0 * 300.0 * std::f64::consts::LN_10).sqrt();
    let mut total = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let lo = if i == 0 { 0.0 } else { quantile(i as f64 / n as f64) };
        let hi = if i + 1 == n { r_max } else { quantile((i + 1) as f64 / n as f64) };
        // Even step count, denser on the wide outer slabs.
        let steps = 2 * (200 + ((hi - lo) / sigma * 2000.0) as usize);
        let h = (hi - lo) / steps as f64;
        let g = |r: f64| (x - r) * (x - r) * density(r);
        let mut acc = g(lo) + g(hi);
        for k in 1..steps {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * g(lo + k as f64 * h);
        }
        total += acc * h / 3.0;
    }
    total
}

/// Wilson score interval by bisection on `(phat - p)^2 = z^2 p (1 - p) / n`.
pub fn wilson_by_inversion(k: usize, n: usize, z: f64) -> (f64, f64) {
    let phat = k as f64 / n as f64;
    let inside = |p: f64| (phat - p).powi(2) <= z * z * p * (1.0 - p) / n as f64;
    let bisect = |mut out: f64, mut inn: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (out + inn);
            if inside(mid) {
                inn = mid;
            } else {
                out = mid;
            }
        }
        0.5 * (out + inn)
    };
    let lo = if k == 0 { 0.0 } else { bisect(0.0, phat) };
    let hi = if k == n { 1.0 } else { bisect(1.0, phat) };
    (lo, hi)
}

/// All satisfying assignments by clause-by-clause evaluation, with variable 1 as the MSB.
pub fn brute_force_solutions(m: usize, clauses: &[Vec<i32>]) -> Vec<usize> {
    (0..1usize << m)
        .filter(|&d| {
            clauses.iter().all(|cl| {
                cl.iter().any(|&l| {
                    let v = l.unsigned_abs() as usize;
                    let bit = (d >> (m - v)) & 1 == 1;
                    if l > 0 {
                        bit
                    } else {
                        !bit
                    }
                })
            })
        })
        .collect()
}

/// One-sided lower `3 sigma` margin of a binomial proportion at `p` over `n` trials.
pub fn three_sigma(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}
