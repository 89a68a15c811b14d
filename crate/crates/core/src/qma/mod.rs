//! One-query search-to-decision for the local Hamiltonian problem.
//!
//! Two Cliffords `C` and `D` are drawn. The oracle `f(x) = [Re <x| C (1-H)^p D |0^n> < 0]`
//! is queried once to prepare `|p_f>`, and `C^dagger |p_f>` is then sent through an energy
//! measurement. Readings above `a + (b - a)/4 + eps` abort; otherwise the post-measurement
//! state is the witness. [`QmaSolver::exp_search`] skips the measurement and never aborts.

mod hamiltonian;

pub use hamiltonian::{normalize_hamiltonian, HamiltonianTerm, LocalHamiltonian, MAX_QMA_QUBITS};

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::{haar_unitary, random_clifford, CliffordElement, RngStream, TwirlEnsemble};
use crate::phase_states::{build_phase_state, sign_oracle, PhaseOracle};
use crate::qcore::{cmatmul, HermitianEigen, StateVector, UnitaryMatrix};
use crate::{Error, Result, C64};

/// Largest exponent evaluated by repeated squaring.
pub const MAX_FILTER_POWER: u64 = 1 << 20;

/// Largest energy register, in bits.
pub const MAX_ENERGY_BITS: u32 = 40;

/// The smallest `p` with `(1 - delta/4)^{2p} <= delta / (2 * 2^n)`.
pub fn filter_exponent(n_qubits: usize, delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    let log_target = delta.ln() - (n_qubits as f64 + 1.0) * std::f64::consts::LN_2;
    let log_base = 2.0 * (-delta / 4.0).ln_1p();
    let holds = |p: u64| p as f64 * log_base <= log_target;
    let mut p = (log_target / log_base).ceil().max(0.0) as u64;
    while p > 0 && holds(p - 1) {
        p -= 1;
    }
    while !holds(p) {
        p += 1;
    }
    Ok(p)
}

/// Register size of the energy reading, `ceil(log2(1/delta)) + 5`.
pub fn default_energy_bits(delta: f64) -> Result<u32> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!("delta must be positive, got {delta}")));
    }
    let bits = (1.0 / delta).log2().ceil().max(0.0) as u32 + 5;
    if bits > MAX_ENERGY_BITS {
        return Err(Error::CapExceeded { what: "energy bits", value: bits as u64, cap: MAX_ENERGY_BITS as u64 });
    }
    Ok(bits)
}

/// Rounding slack `eps = 2 * 2^{-m}` of an `m`-bit energy reading.
pub fn rounding_slack(m_bits: u32) -> f64 {
    2.0 * 0.5f64.powi(m_bits as i32)
}

/// How `(1 - H)^p` is evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterMethod {
    /// Dense repeated squaring; `p` is capped at [`MAX_FILTER_POWER`].
    #[default]
    RepeatedSquaring,
    /// Powers of the eigenvalues; no cap on `p`.
    Spectral,
}

/// `(1 - H)^p` up to a positive scale, which leaves every sign unchanged.
#[derive(Debug, Clone)]
pub struct FilterOperator {
    p: u64,
    kind: FilterKind,
}

#[derive(Debug, Clone)]
enum FilterKind {
    Dense(DMatrix<C64>),
    Spectral { vectors: DMatrix<C64>, weights: Vec<f64> },
}

impl FilterOperator {
    pub fn new(h: &LocalHamiltonian, p: u64, method: FilterMethod) -> Result<Self> {
        require_normalized(h)?;
        match method {
            FilterMethod::RepeatedSquaring => Ok(FilterOperator { p, kind: FilterKind::Dense(dense_power(h, p)?) }),
            FilterMethod::Spectral => Ok(Self::spectral(&h.eigen(), p)),
        }
    }

    /// Spectral form from a precomputed eigendecomposition.
    pub fn spectral(eig: &HermitianEigen, p: u64) -> Self {
        let top = (1.0 - eig.values[0]).max(0.0);
        let weights = eig
            .values
            .iter()
            .map(|&l| {
                let s = (1.0 - l).max(0.0);
                if p == 0 {
                    1.0
                } else if top == 0.0 {
                    0.0
                } else {
                    (s / top).min(1.0).powf(p as f64)
                }
            })
            .collect();
        FilterOperator { p, kind: FilterKind::Spectral { vectors: eig.vectors.clone(), weights } }
    }

    pub fn exponent(&self) -> u64 {
        self.p
    }

    /// A positive multiple of `(1 - H)^p v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        match &self.kind {
            FilterKind::Dense(m) => (m * nalgebra::DVector::from_column_slice(v)).iter().copied().collect(),
            FilterKind::Spectral { vectors, weights } => {
                let dv = nalgebra::DVector::from_column_slice(v);
                let mut coeffs = vectors.adjoint() * dv;
                coeffs.iter_mut().zip(weights).for_each(|(c, &w)| *c *= w);
                (vectors * coeffs).iter().copied().collect()
            }
        }
    }
}

fn require_normalized(h: &LocalHamiltonian) -> Result<()> {
    if !h.is_normalized() {
        return Err(Error::invalid("the Hamiltonian must be normalized first"));
    }
    Ok(())
}

/// `(1 - H)^p` by repeated squaring, rescaled to unit max-entry after every product.
fn dense_power(h: &LocalHamiltonian, p: u64) -> Result<DMatrix<C64>> {
    if p > MAX_FILTER_POWER {
        return Err(Error::CapExceeded { what: "filter exponent", value: p, cap: MAX_FILTER_POWER });
    }
    let d = h.dim();
    let mut base = DMatrix::identity(d, d) - h.dense();
    let mut acc = DMatrix::<C64>::identity(d, d);
    let mut e = p;
    let rescale = |m: &mut DMatrix<C64>| {
        let top = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if top > 0.0 {
            *m *= C64::new(top.recip(), 0.0);
        }
    };
    while e > 0 {
        if e & 1 == 1 {
            acc = cmatmul(&acc, &base);
            rescale(&mut acc);
        }
        e >>= 1;
        if e > 0 {
            base = cmatmul(&base, &base);
            rescale(&mut base);
        }
    }
    Ok(acc)
}

/// One twirl unitary, either a Clifford tableau or a dense matrix.
#[derive(Debug, Clone)]
pub enum Twirl {
    Clifford(CliffordElement),
    Dense(UnitaryMatrix),
}

impl Twirl {
    pub fn sample<R: Rng + ?Sized>(ensemble: TwirlEnsemble, n_qubits: usize, rng: &mut R) -> Result<Self> {
        Ok(match ensemble {
            TwirlEnsemble::Clifford => Twirl::Clifford(random_clifford(n_qubits, rng)?),
            TwirlEnsemble::Haar => Twirl::Dense(haar_unitary(1 << n_qubits, rng)?),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Twirl::Clifford(c) => 1 << c.n_qubits(),
            Twirl::Dense(u) => u.dim(),
        }
    }

    pub fn unitary(&self) -> Result<UnitaryMatrix> {
        match self {
            Twirl::Clifford(c) => c.dense(),
            Twirl::Dense(u) => Ok(u.clone()),
        }
    }

    pub fn apply_slice(&self, v: &[C64]) -> Result<Vec<C64>> {
        Ok(self.unitary()?.apply_slice(v))
    }

    pub fn apply_adjoint_slice(&self, v: &[C64]) -> Result<Vec<C64>> {
        Ok(self.unitary()?.apply_adjoint_slice(v))
    }

    /// `U |0^n>`.
    pub fn first_column(&self) -> Result<Vec<C64>> {
        Ok(self.unitary()?.column(0))
    }
}

/// `f(x) = sgn Re <x| C (1 - H)^p D |0^n>`, with `sgn(0) = +` encoded as `f = 0`.
pub fn qma_oracle_fn(h: &LocalHamiltonian, c: &CliffordElement, d: &CliffordElement, p: u64) -> Result<PhaseOracle> {
    let filter = FilterOperator::new(h, p, FilterMethod::RepeatedSquaring)?;
    oracle_from_filter(&filter, &Twirl::Clifford(c.clone()), &Twirl::Clifford(d.clone()))
}

/// The same oracle for arbitrary twirls and a prebuilt filter.
pub fn oracle_from_filter(filter: &FilterOperator, c: &Twirl, d: &Twirl) -> Result<PhaseOracle> {
    let tau = filter.apply(&d.first_column()?);
    let u = c.apply_slice(&tau)?;
    sign_oracle(&u.iter().map(|z| z.re).collect::<Vec<_>>())
}

/// Outcome of one energy measurement.
#[derive(Debug, Clone)]
pub struct EnergyEstimateResult {
    /// Signed reading `k`, so that `theta = k / 2^m`.
    pub theta_code: i64,
    pub theta: f64,
    pub m_bits: u32,
    pub post_state: StateVector,
    pub accepted: bool,
}

/// Idealized energy measurement on an exact spectrum.
///
/// An eigenbranch `E` is chosen by the Born rule. With `x = 2^m E` the reading is `floor(x)`
/// with probability `1 - frac(x)` and `floor(x) - 1` otherwise, so on-grid energies read
/// exactly. The post-state applies the Kraus operator `sum_i sqrt(Pr[k | i]) |e_i><e_i|` for the
/// observed reading `k`.
#[derive(Debug, Clone)]
pub struct EnergyEstimator {
    values: Vec<f64>,
    vectors: DMatrix<C64>,
    m_bits: u32,
    accept_below: f64,
}

impl EnergyEstimator {
    /// Accepts readings at most `a + (b - a)/4 + 2 * 2^{-m}`.
    pub fn new(h: &LocalHamiltonian, m_bits: u32) -> Result<Self> {
        Self::from_eigen(h, &h.eigen(), m_bits)
    }

    pub fn from_eigen(h: &LocalHamiltonian, eig: &HermitianEigen, m_bits: u32) -> Result<Self> {
        require_normalized(h)?;
        if m_bits == 0 || m_bits > MAX_ENERGY_BITS {
            return Err(Error::invalid(format!("m_bits must be in 1..={MAX_ENERGY_BITS}, got {m_bits}")));
        }
        let accept_below = h.a() + h.gap() / 4.0 + rounding_slack(m_bits);
        Ok(EnergyEstimator { values: eig.values.clone(), vectors: eig.vectors.clone(), m_bits, accept_below })
    }

    pub fn m_bits(&self) -> u32 {
        self.m_bits
    }

    /// Largest accepted reading.
    pub fn accept_threshold(&self) -> f64 {
        self.accept_below
    }

    /// The two possible readings of energy `e` with their probabilities.
    pub fn reading_distribution(&self, e: f64) -> [(i64, f64); 2] {
        let x = e.clamp(0.0, 1.0) * (1u64 << self.m_bits) as f64;
        let fl = x.floor();
        let frac = x - fl;
        [(fl as i64, 1.0 - frac), (fl as i64 - 1, frac)]
    }

    pub fn measure<R: Rng + ?Sized>(&self, state: &StateVector, rng: &mut R) -> Result<EnergyEstimateResult> {
        if state.dim() != self.values.len() {
            return Err(Error::DimensionMismatch { expected: self.values.len(), found: state.dim() });
        }
        let coeffs = self.vectors.adjoint() * nalgebra::DVector::from_column_slice(state.amplitudes());
        let probs: Vec<f64> = coeffs.iter().map(|z| z.norm_sqr()).collect();
        let total: f64 = probs.iter().sum();
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut branch = probs.len() - 1;
        for (i, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                branch = i;
                break;
            }
        }
        let [(hi_code, hi_prob), (lo_code, _)] = self.reading_distribution(self.values[branch]);
        let code = if rng.random::<f64>() < hi_prob { hi_code } else { lo_code };
        let mut kraus = coeffs.clone();
        for (i, c) in kraus.iter_mut().enumerate() {
            let w = self
                .reading_distribution(self.values[i])
                .iter()
                .filter(|(k, _)| *k == code)
                .map(|(_, p)| *p)
                .sum::<f64>();
            *c *= w.sqrt();
        }
        let post = self.vectors.clone() * kraus;
        let post_state = StateVector::normalize(post.iter().copied().collect())?;
        let theta = code as f64 / (1u64 << self.m_bits) as f64;
        Ok(EnergyEstimateResult {
            theta_code: code,
            theta,
            m_bits: self.m_bits,
            post_state,
            accepted: theta <= self.accept_below,
        })
    }
}

/// One-shot energy measurement; diagonalizes `h` on every call.
pub fn energy_estimate<R: Rng + ?Sized>(
    state: &StateVector,
    h: &LocalHamiltonian,
    m_bits: u32,
    rng: &mut R,
) -> Result<EnergyEstimateResult> {
    EnergyEstimator::new(h, m_bits)?.measure(state, rng)
}

/// `<psi| H |psi>` for the dense matrix of `h`.
pub fn energy(state: &StateVector, h: &DMatrix<C64>) -> Result<f64> {
    if state.dim() != h.nrows() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), found: state.dim() });
    }
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    Ok((v.adjoint() * h * &v)[(0, 0)].re)
}

/// Weight of `state` on eigenvectors of `h` with eigenvalue at most `cutoff`.
pub fn low_energy_mass(state: &StateVector, h: &LocalHamiltonian, cutoff: f64) -> Result<f64> {
    low_energy_mass_eig(state, &h.eigen(), cutoff)
}

fn low_energy_mass_eig(state: &StateVector, eig: &HermitianEigen, cutoff: f64) -> Result<f64> {
    if state.dim() != eig.values.len() {
        return Err(Error::DimensionMismatch { expected: eig.values.len(), found: state.dim() });
    }
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    Ok(eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l <= cutoff)
        .map(|(i, _)| eig.vectors.column(i).dotc(&v).norm_sqr())
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QmaConfig {
    pub twirl: TwirlEnsemble,
    pub filter: FilterMethod,
    /// Overrides the exponent from [`filter_exponent`].
    pub exponent: Option<u64>,
    /// Overrides [`default_energy_bits`].
    pub m_bits: Option<u32>,
}

impl Default for QmaConfig {
    fn default() -> Self {
        QmaConfig {
            twirl: TwirlEnsemble::Clifford,
            filter: FilterMethod::RepeatedSquaring,
            exponent: None,
            m_bits: None,
        }
    }
}

/// Everything drawn before the energy measurement.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub oracle: PhaseOracle,
    /// `C^dagger |p_f>`.
    pub state: StateVector,
    /// `(1 - H)^p D |0^n>` normalized, or `None` when it vanishes.
    pub filtered: Option<StateVector>,
}

#[derive(Debug, Clone)]
pub enum QmaResult {
    Abort,
    Witness(StateVector),
}

#[derive(Debug, Clone)]
pub struct QmaRun {
    pub result: QmaResult,
    pub pre_measurement: StateVector,
    pub estimate: EnergyEstimateResult,
    /// `<H>` of the witness in the normalized scale.
    pub witness_energy: Option<f64>,
}

impl QmaRun {
    pub fn aborted(&self) -> bool {
        matches!(self.result, QmaResult::Abort)
    }

    pub fn witness(&self) -> Option<&StateVector> {
        match &self.result {
            QmaResult::Witness(w) => Some(w),
            QmaResult::Abort => None,
        }
    }
}

/// Output of the abort-free variant with overlap diagnostics.
#[derive(Debug, Clone)]
pub struct QmaExpRun {
    pub output: StateVector,
    /// `|<lambda_1|psi>|^2` for the lowest eigenvector.
    pub ground_overlap: f64,
    /// Weight of the output on energies at most `(a + b)/2`.
    pub low_energy_mass: f64,
    /// `|<tau~|psi>|^2` for the normalized filtered state.
    pub filtered_overlap: f64,
    pub filtered_energy: Option<f64>,
    /// Best overlap certified with a state of energy at most `(a + b)/2`.
    ///
    /// Candidates are the normalized projection of the output onto energies at most
    /// `(a + b)/2`, whose overlap is [`Self::low_energy_mass`], and the filtered state when its
    /// energy qualifies.
    pub certified_overlap: f64,
}

/// A normalized instance with its spectrum, filter and energy register.
#[derive(Debug, Clone)]
pub struct QmaSolver {
    h: LocalHamiltonian,
    h_dense: DMatrix<C64>,
    eig: HermitianEigen,
    filter: FilterOperator,
    estimator: Option<EnergyEstimator>,
    config: QmaConfig,
}

impl QmaSolver {
    /// Normalizes `h` and precomputes everything that does not depend on the coins.
    ///
    /// The energy register is only built when its size fits under [`MAX_ENERGY_BITS`], so
    /// instances with exponentially small gaps still support [`Self::exp_search`].
    pub fn new(h: &LocalHamiltonian, config: QmaConfig) -> Result<Self> {
        let h = normalize_hamiltonian(h);
        let delta = h.gap();
        let p = match config.exponent {
            Some(p) => p,
            None => filter_exponent(h.n_qubits(), delta.min(1.0 - f64::EPSILON))?,
        };
        let eig = h.eigen();
        let filter = match config.filter {
            FilterMethod::RepeatedSquaring => FilterOperator::new(&h, p, FilterMethod::RepeatedSquaring)?,
            FilterMethod::Spectral => FilterOperator::spectral(&eig, p),
        };
        let estimator = match config.m_bits.map(Ok).unwrap_or_else(|| default_energy_bits(delta)) {
            Ok(m) => Some(EnergyEstimator::from_eigen(&h, &eig, m)?),
            Err(Error::CapExceeded { .. }) if config.m_bits.is_none() => None,
            Err(e) => return Err(e),
        };
        let h_dense = h.dense();
        Ok(QmaSolver { h, h_dense, eig, filter, estimator, config })
    }

    /// The normalized Hamiltonian.
    pub fn hamiltonian(&self) -> &LocalHamiltonian {
        &self.h
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eig
    }

    pub fn exponent(&self) -> u64 {
        self.filter.exponent()
    }

    pub fn m_bits(&self) -> Option<u32> {
        self.estimator.as_ref().map(|e| e.m_bits())
    }

    pub fn config(&self) -> &QmaConfig {
        &self.config
    }

    /// `a + (b - a)/4`, the edge of the low-energy space.
    pub fn low_cutoff(&self) -> f64 {
        self.h.a() + self.h.gap() / 4.0
    }

    /// `(a + b)/2`, the witness energy guarantee.
    pub fn midpoint(&self) -> f64 {
        (self.h.a() + self.h.b()) / 2.0
    }

    pub fn energy(&self, state: &StateVector) -> Result<f64> {
        energy(state, &self.h_dense)
    }

    pub fn low_energy_mass(&self, state: &StateVector, cutoff: f64) -> Result<f64> {
        low_energy_mass_eig(state, &self.eig, cutoff)
    }

    /// `(1 - H)^p D |0^n>` normalized, or `None` if it is zero.
    pub fn filtered_state(&self, d: &Twirl) -> Result<Option<StateVector>> {
        match StateVector::normalize(self.filter.apply(&d.first_column()?)) {
            Ok(s) => Ok(Some(s)),
            Err(Error::ZeroVector) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Draws `C` then `D`, queries the oracle and returns `C^dagger |p_f>`.
    pub fn prepare<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Prepared> {
        let n = self.h.n_qubits();
        let c = Twirl::sample(self.config.twirl, n, rng)?;
        let d = Twirl::sample(self.config.twirl, n, rng)?;
        let oracle = oracle_from_filter(&self.filter, &c, &d)?;
        let phase = build_phase_state(&oracle);
        let state = StateVector::normalize(c.apply_adjoint_slice(phase.amplitudes())?)?;
        let filtered = self.filtered_state(&d)?;
        Ok(Prepared { oracle, state, filtered })
    }

    /// The full pipeline: prepare, measure the energy, abort on a high reading.
    pub fn search_one_query<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<QmaRun> {
        let estimator = self.estimator.as_ref().ok_or(Error::CapExceeded {
            what: "energy bits",
            value: default_energy_bits(self.h.gap()).map(u64::from).unwrap_or(u64::MAX),
            cap: MAX_ENERGY_BITS as u64,
        })?;
        let prepared = self.prepare(rng)?;
        let estimate = estimator.measure(&prepared.state, rng)?;
        let (result, witness_energy) = if estimate.accepted {
            let e = self.energy(&estimate.post_state)?;
            (QmaResult::Witness(estimate.post_state.clone()), Some(e))
        } else {
            (QmaResult::Abort, None)
        };
        Ok(QmaRun { result, pre_measurement: prepared.state, estimate, witness_energy })
    }

    /// The abort-free variant. Its output is the pre-measurement state of
    /// [`Self::search_one_query`] under the same coins.
    pub fn exp_search<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<QmaExpRun> {
        let prepared = self.prepare(rng)?;
        let output = prepared.state;
        let ground = self.eig.vectors.column(0);
        let v = nalgebra::DVector::from_column_slice(output.amplitudes());
        let ground_overlap = ground.dotc(&v).norm_sqr();
        let mid = self.midpoint();
        let low = self.low_energy_mass(&output, mid)?;
        let (filtered_overlap, filtered_energy) = match &prepared.filtered {
            Some(t) => (crate::qcore::overlap(&output, t)?, Some(self.energy(t)?)),
            None => (0.0, None),
        };
        let filtered_ok = filtered_energy.is_some_and(|e| e <= mid + 1e-12);
        let certified_overlap = if filtered_ok { low.max(filtered_overlap) } else { low };
        Ok(QmaExpRun {
            output,
            ground_overlap,
            low_energy_mass: low,
            filtered_overlap,
            filtered_energy,
            certified_overlap,
        })
    }

    /// Reruns on independent child streams of `rng` until one run keeps its witness.
    ///
    /// Returns the winning run and the number of attempts used, or `None` after
    /// `repetitions` aborts.
    pub fn amplified(&self, repetitions: usize, rng: &mut RngStream) -> Result<(Option<QmaRun>, usize)> {
        let base = rng.split();
        for i in 0..repetitions {
            let run = self.search_one_query(&mut base.child(i as u64))?;
            if !run.aborted() {
                return Ok((Some(run), i + 1));
            }
        }
        Ok((None, repetitions))
    }
}

/// Normalizes `h` and runs the pipeline once with default settings.
pub fn qma_search_one_query<R: Rng + ?Sized>(h: &LocalHamiltonian, rng: &mut R) -> Result<QmaRun> {
    QmaSolver::new(h, QmaConfig::default())?.search_one_query(rng)
}

/// Normalizes `h` and runs the abort-free variant once with spectral powering.
pub fn qma_exp_search<R: Rng + ?Sized>(h: &LocalHamiltonian, rng: &mut R) -> Result<QmaExpRun> {
    let config = QmaConfig { filter: FilterMethod::Spectral, ..QmaConfig::default() };
    QmaSolver::new(h, config)?.exp_search(rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn projector_one() -> LocalHamiltonian {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        );
        normalize_hamiltonian(&LocalHamiltonian::from_dense(m, 0.1, 0.35).unwrap())
    }

    #[test]
    fn exponent_matches_direct_loop() {
        assert_eq!(filter_exponent(2, 0.5).unwrap(), 11);
        for n in 1..6 {
            for &delta in &[0.05, 0.1, 0.3, 0.9] {
                let p = filter_exponent(n, delta).unwrap();
                let target = delta / (2.0 * (1u64 << n) as f64);
                let f = |p: u64| (1.0 - delta / 4.0f64).powi(2 * p as i32);
                assert!(f(p) <= target && (p == 0 || f(p - 1) > target));
            }
        }
        assert!(filter_exponent(2, 0.0).is_err() && filter_exponent(2, 1.0).is_err());
    }

    #[test]
    fn repeated_squaring_matches_spectral() {
        let h = projector_one();
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.3, 0.0), C64::new(0.1, 0.2), C64::new(0.1, -0.2), C64::new(0.6, 0.0)],
        );
        let g = normalize_hamiltonian(&LocalHamiltonian::from_dense(m, 0.1, 0.3).unwrap());
        for h in [h, g] {
            for p in [0, 1, 5, 37] {
                let a = FilterOperator::new(&h, p, FilterMethod::RepeatedSquaring).unwrap();
                let b = FilterOperator::new(&h, p, FilterMethod::Spectral).unwrap();
                let v = vec![C64::new(0.6, 0.1), C64::new(-0.3, 0.7)];
                let (x, y) =
                    (StateVector::normalize(a.apply(&v)).unwrap(), StateVector::normalize(b.apply(&v)).unwrap());
                assert!(x.max_abs_diff(&y).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn power_cap_is_enforced() {
        let h = projector_one();
        assert!(matches!(
            FilterOperator::new(&h, MAX_FILTER_POWER + 1, FilterMethod::RepeatedSquaring),
            Err(Error::CapExceeded { .. })
        ));
        assert!(FilterOperator::new(&h, MAX_FILTER_POWER + 1, FilterMethod::Spectral).is_ok());
    }

    #[test]
    fn readings_on_and_off_grid() {
        let h = projector_one();
        let est = EnergyEstimator::new(&h, 3).unwrap();
        assert_eq!(est.reading_distribution(0.25), [(2, 1.0), (1, 0.0)]);
        let [(k0, p0), (k1, p1)] = est.reading_distribution(0.3);
        assert_eq!((k0, k1), (2, 1));
        assert!((p0 - 0.6).abs() < 1e-12 && (p1 - 0.4).abs() < 1e-12);
    }
}
