//! Preconditions and analytic guarantees for swap-test distillation.

use crate::qcore::StateVector;
use crate::{Error, Result, C64};

/// The largest `l` with `n 6^l <= m`; 0 when `m < n`.
pub fn auto_rounds(m: usize, n_qubits: usize) -> usize {
    if n_qubits == 0 {
        return 0;
    }
    let mut l = 0;
    let mut size = n_qubits as u128;
    while size * 6 <= m as u128 {
        size *= 6;
        l += 1;
    }
    l
}

/// `l = ceil(c log_{5/4}(2n) + 2 / a^2)`, the round count the no-overlap guarantee uses.
pub fn no_overlap_rounds(n: usize, a: f64, c: f64) -> Result<usize> {
    check_a(a)?;
    let l = c * (2.0 * n as f64).ln() / 1.25f64.ln() + 2.0 / (a * a);
    Ok(l.ceil() as usize)
}

/// `l' = ceil(log2(8 n (1 - a)^2 / a^2))`, the extra rounds that absorb random overlaps of
/// mean `a`; 0 when the argument is at most 1.
pub fn relaxed_extra_rounds(n: usize, a: f64) -> Result<usize> {
    check_a(a)?;
    let x = 8.0 * n as f64 * (1.0 - a).powi(2) / (a * a);
    Ok(if x <= 1.0 { 0 } else { x.log2().ceil() as usize })
}

/// `1 - (1/2) (4/5)^{l - 2/a^2}`, clamped to `[0, 1]`.
pub fn overlap_bound(a: f64, rounds: usize) -> Result<f64> {
    check_a(a)?;
    let v = 1.0 - 0.5 * 0.8f64.powf(rounds as f64 - 2.0 / (a * a));
    Ok(v.clamp(0.0, 1.0))
}

/// `l` iterations of `g <- g (1 + g) / (1 + g^2)` from `g = a`: the overlap reached when every
/// register starts at exactly `a` with orthogonal noise.
pub fn overlap_recurrence(a: f64, rounds: usize) -> f64 {
    (0..rounds).fold(a, |g, _| g * (1.0 + g) / (1.0 + g * g))
}

/// `2 exp(-n/12)`, the abort-probability bound for `m >= n` registers on `n >= 12` qubits.
pub fn survival_bound(m: usize, n: usize) -> Result<f64> {
    if n < 12 {
        return Err(Error::BoundNotApplicable(format!("needs n >= 12, got n = {n}")));
    }
    if m < n {
        return Err(Error::BoundNotApplicable(format!("needs m >= n, got m = {m}, n = {n}")));
    }
    Ok(2.0 * (-(n as f64) / 12.0).exp())
}

fn check_a(a: f64) -> Result<()> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::invalid(format!("overlap parameter must lie in (0, 1], got {a}")));
    }
    Ok(())
}

/// `(min_j |<psi_j|tau>|^2, max_{i != j} |<psi_i|(I - |tau><tau|)|psi_j>|^2)`.
pub fn check_conditions(inputs: &[StateVector], target: &StateVector) -> Result<(f64, f64)> {
    let mut proj = Vec::with_capacity(inputs.len());
    let mut min_overlap = f64::INFINITY;
    for psi in inputs {
        let c = target.inner(psi)?;
        min_overlap = min_overlap.min(c.norm_sqr());
        proj.push(c);
    }
    let mut max_cross = 0.0f64;
    for i in 0..inputs.len() {
        for j in (i + 1)..inputs.len() {
            let full = crate::qcore::StateVector::inner(&inputs[i], &inputs[j])?;
            let cross = full - proj[i].conj() * proj[j];
            max_cross = max_cross.max(cross.norm_sqr());
        }
    }
    if inputs.is_empty() {
        min_overlap = 1.0;
    }
    Ok((min_overlap, max_cross))
}

/// Residual masses after orthonormalizing the noise components.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSchmidtReport {
    /// `|bar beta_j|^2`: weight of the unit noise of input `j` inside the span of earlier noise.
    pub residuals: Vec<f64>,
    /// `max_{i != j} |<phi_i|phi_j>|^2` over the unit noise vectors.
    pub delta: f64,
    /// Whether `sqrt(delta) <= 1 / (8m)`.
    pub precondition_holds: bool,
    /// Whether `residuals[j-1] <= (2j - 1) delta` for every 1-based `j`.
    pub bound_holds: bool,
}

/// Orthonormalizes the components of the inputs orthogonal to `target`.
///
/// Inputs without a noise component get residual 0 and add nothing to the basis.
pub fn gram_schmidt_diagnostic(inputs: &[StateVector], target: &StateVector) -> Result<GramSchmidtReport> {
    let t = target.amplitudes();
    let mut noise: Vec<Option<Vec<C64>>> = Vec::with_capacity(inputs.len());
    for psi in inputs {
        let c = target.inner(psi)?;
        let v: Vec<C64> = psi.amplitudes().iter().zip(t).map(|(p, tt)| p - c * tt).collect();
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        noise.push((n > 1e-12).then(|| v.iter().map(|z| z / n).collect()));
    }

    let mut delta = 0.0f64;
    for i in 0..noise.len() {
        for j in (i + 1)..noise.len() {
            if let (Some(a), Some(b)) = (&noise[i], &noise[j]) {
                delta = delta.max(dot(a, b).norm_sqr());
            }
        }
    }

    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut residuals = Vec::with_capacity(noise.len());
    for phi in &noise {
        let Some(phi) = phi else {
            residuals.push(0.0);
            continue;
        };
        let coeffs: Vec<C64> = basis.iter().map(|e| dot(e, phi)).collect();
        residuals.push(coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().min(1.0));
        let mut rest = phi.clone();
        for (e, c) in basis.iter().zip(&coeffs) {
            rest.iter_mut().zip(e).for_each(|(r, x)| *r -= c * x);
        }
        let n: f64 = rest.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-12 {
            basis.push(rest.into_iter().map(|z| z / n).collect());
        }
    }

    let m = inputs.len() as f64;
    let precondition_holds = delta.sqrt() <= 1.0 / (8.0 * m);
    let bound_holds = residuals.iter().enumerate().all(|(j, &r)| r <= (2.0 * j as f64 + 1.0) * delta + 1e-15);
    Ok(GramSchmidtReport { residuals, delta, precondition_holds, bound_holds })
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
