//! One-query witness extraction for classical-witness search problems.
//!
//! A random hash `A d = 0` with `k` uniform rows is added to the verifier. The oracle
//! `f(x) = [exists witness d of the hashed instance with x . d = 1]` is linear exactly when
//! the hashed instance has a single witness `d0`, and then one Bernstein-Vazirani query
//! returns `d0`. Every candidate is checked against the base formula before it is returned.
//!
//! Assignments are packed into integers with variable 1 in the most significant of the
//! `m` bits.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensembles::RngStream;
use crate::phase_states::PhaseOracle;
use crate::{Error, Result};

/// Largest witness length for exhaustive decision queries.
pub const MAX_WITNESS_BITS: usize = 24;

/// Largest witness length for which the hashed oracle's truth table is built.
pub const MAX_ORACLE_WITNESS_BITS: usize = 20;

/// Something that accepts or rejects `m`-bit classical witnesses.
pub trait WitnessVerifier: Sync {
    fn num_bits(&self) -> usize;
    fn accepts(&self, d: usize) -> bool;
}

/// A CNF formula over variables `1..=m`. Literals are signed variable indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
    masks: Vec<(usize, usize)>,
}

impl CnfFormula {
    /// Rejects out-of-range literals and empty clauses; see [`CnfFormula::unsat`].
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        if clauses.iter().any(|c| c.is_empty()) {
            return Err(Error::invalid("empty clause; use CnfFormula::unsat for an explicit contradiction"));
        }
        Self::build(num_vars, clauses)
    }

    /// The explicit contradiction: a single empty clause.
    pub fn unsat(num_vars: usize) -> Result<Self> {
        Self::build(num_vars, vec![Vec::new()])
    }

    fn build(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        if num_vars == 0 || num_vars > 63 {
            return Err(Error::invalid(format!("num_vars must be in 1..=63, got {num_vars}")));
        }
        for c in &clauses {
            if let Some(&lit) = c.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > num_vars) {
                return Err(Error::invalid(format!("literal {lit} out of range for {num_vars} variables")));
            }
        }
        let masks = clauses
            .iter()
            .map(|c| {
                c.iter().fold((0usize, 0usize), |(pos, neg), &l| {
                    let bit = 1usize << (num_vars - l.unsigned_abs() as usize);
                    if l > 0 {
                        (pos | bit, neg)
                    } else {
                        (pos, neg | bit)
                    }
                })
            })
            .collect();
        Ok(CnfFormula { num_vars, clauses, masks })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// Value of variable `var` (1-based) in the packed assignment `d`.
    pub fn var_value(&self, d: usize, var: usize) -> bool {
        d >> (self.num_vars - var) & 1 == 1
    }

    pub fn satisfied_by(&self, d: usize) -> bool {
        self.masks.iter().all(|&(pos, neg)| d & pos != 0 || !d & neg != 0)
    }

    /// Every satisfying assignment in increasing order; `m` must be at most 24.
    pub fn solutions(&self) -> Result<Vec<usize>> {
        check_bits(self.num_vars, MAX_WITNESS_BITS, "witness bits")?;
        Ok((0..1usize << self.num_vars).filter(|&d| self.satisfied_by(d)).collect())
    }

    /// Parses DIMACS CNF: `c` comments, one `p cnf V C` header, then clauses ended by `0`.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut clauses: Vec<Vec<i32>> = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let err = |message: String| Error::Parse { line: line_no, message };
            if line.starts_with('p') {
                if header.is_some() {
                    return Err(err("duplicate header".into()));
                }
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 4 || f[0] != "p" || f[1] != "cnf" {
                    return Err(err("header must read `p cnf <vars> <clauses>`".into()));
                }
                let v = f[2].parse::<usize>().map_err(|e| err(format!("bad variable count: {e}")))?;
                let c = f[3].parse::<usize>().map_err(|e| err(format!("bad clause count: {e}")))?;
                if v == 0 || v > 63 {
                    return Err(err(format!("variable count must be in 1..=63, got {v}")));
                }
                header = Some((line_no, v, c));
                continue;
            }
            let (_, vars, _) = header.ok_or_else(|| err("clause before the `p cnf` header".into()))?;
            let mut current = Vec::new();
            let mut open = false;
            for tok in line.split_whitespace() {
                let lit = tok.parse::<i32>().map_err(|e| err(format!("bad literal `{tok}`: {e}")))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                    open = false;
                } else {
                    if lit.unsigned_abs() as usize > vars {
                        return Err(err(format!("literal {lit} out of range for {vars} variables")));
                    }
                    current.push(lit);
                    open = true;
                }
            }
            if open {
                return Err(err("clause line must end with 0".into()));
            }
            last_line = line_no;
        }
        let (header_line, vars, count) =
            header.ok_or(Error::Parse { line: 0, message: "missing `p cnf` header".into() })?;
        if clauses.len() != count {
            return Err(Error::Parse {
                line: last_line.max(header_line),
                message: format!("header declares {count} clauses, found {}", clauses.len()),
            });
        }
        Self::build(vars, clauses).map_err(|e| Error::Parse { line: header_line, message: e.to_string() })
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&l.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

impl WitnessVerifier for CnfFormula {
    fn num_bits(&self) -> usize {
        self.num_vars
    }

    fn accepts(&self, d: usize) -> bool {
        self.satisfied_by(d)
    }
}

fn check_bits(m: usize, cap: usize, what: &'static str) -> Result<()> {
    if m > cap {
        return Err(Error::CapExceeded { what, value: m as u64, cap: cap as u64 });
    }
    Ok(())
}

fn parity(x: usize) -> bool {
    x.count_ones() % 2 == 1
}

/// Exhaustive decision query: is there a `d` accepted by `verifier` and by `predicate`?
pub fn witness_oracle<V: WitnessVerifier + ?Sized>(
    verifier: &V,
    predicate: Option<&(dyn Fn(usize) -> bool + Sync)>,
) -> Result<bool> {
    let m = verifier.num_bits();
    check_bits(m, MAX_WITNESS_BITS, "witness bits")?;
    Ok((0..1usize << m).any(|d| verifier.accepts(d) && predicate.is_none_or(|p| p(d))))
}

/// The base formula with `k` random parity constraints `A d = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashedInstance {
    pub base: CnfFormula,
    pub k: usize,
    /// Row `r` of `A`, packed like an assignment.
    pub rows: Vec<usize>,
}

impl HashedInstance {
    pub fn new(base: CnfFormula, rows: Vec<usize>) -> Result<Self> {
        let m = base.num_vars();
        if rows.is_empty() || rows.len() > m {
            return Err(Error::invalid(format!("k must be in 1..={m}, got {}", rows.len())));
        }
        if let Some(r) = rows.iter().find(|&&r| r >> m != 0) {
            return Err(Error::invalid(format!("row {r:#b} has more than {m} bits")));
        }
        Ok(HashedInstance { k: rows.len(), base, rows })
    }

    pub fn hash_passes(&self, d: usize) -> bool {
        self.rows.iter().all(|&r| !parity(r & d))
    }
}

impl WitnessVerifier for HashedInstance {
    fn num_bits(&self) -> usize {
        self.base.num_vars()
    }

    fn accepts(&self, d: usize) -> bool {
        self.hash_passes(d) && self.base.satisfied_by(d)
    }
}

/// `k` uniform in `1..=m`, then `A` uniform over `k x m` bit matrices.
pub fn vv_hash<R: Rng + ?Sized>(base: &CnfFormula, rng: &mut R) -> HashedInstance {
    let m = base.num_vars();
    let k = rng.random_range(1..=m);
    let mask = (1usize << m) - 1;
    let rows = (0..k).map(|_| rng.random::<u64>() as usize & mask).collect();
    HashedInstance { base: base.clone(), k, rows }
}

/// A basis of the GF(2) span of `vectors`, in reduced row-echelon form.
fn span_basis(vectors: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut basis: Vec<usize> = Vec::new();
    for mut v in vectors {
        for &b in &basis {
            let top = usize::BITS - 1 - b.leading_zeros();
            if v >> top & 1 == 1 {
                v ^= b;
            }
        }
        if v != 0 {
            let top = usize::BITS - 1 - v.leading_zeros();
            for b in basis.iter_mut() {
                if *b >> top & 1 == 1 {
                    *b ^= v;
                }
            }
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

/// `f(x) = 1` iff some witness `d` has `x . d = 1`, from the list of witnesses.
///
/// `x` is orthogonal to every witness exactly when it is orthogonal to a basis of their
/// span, so `f(x)` is the OR of `x . b` over that basis.
pub fn oracle_from_witnesses(m: usize, witnesses: &[usize]) -> Result<PhaseOracle> {
    check_bits(m, MAX_ORACLE_WITNESS_BITS, "oracle witness bits")?;
    let basis = span_basis(witnesses.iter().copied());
    PhaseOracle::from_fn(m, |x| basis.iter().any(|&b| parity(x & b)))
}

/// The oracle of the hashed instance; `m` must be at most 20.
pub fn qcma_oracle_fn(hashed: &HashedInstance) -> Result<PhaseOracle> {
    let m = hashed.num_bits();
    check_bits(m, MAX_ORACLE_WITNESS_BITS, "oracle witness bits")?;
    let witnesses: Vec<usize> = (0..1usize << m).filter(|&d| hashed.accepts(d)).collect();
    oracle_from_witnesses(m, &witnesses)
}

/// Amplitudes of `H^m O_f H^m |0^m>`, by a fast Walsh-Hadamard transform.
pub fn bv_amplitudes(f: &PhaseOracle) -> Vec<f64> {
    let mut a: Vec<f64> = (0..f.table().len()).map(|x| f.sign(x)).collect();
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, t) = (*u + *v, *u - *v);
                *u = s;
                *v = t;
            }
        }
        h *= 2;
    }
    let scale = (a.len() as f64).recip();
    a.iter_mut().for_each(|v| *v *= scale);
    a
}

fn measure(amps: &[f64], u: f64) -> usize {
    let total: f64 = amps.iter().map(|a| a * a).sum();
    let target = u * total;
    let mut acc = 0.0;
    for (y, a) in amps.iter().enumerate() {
        acc += a * a;
        if target < acc {
            return y;
        }
    }
    amps.iter().rposition(|a| *a != 0.0).unwrap_or(0)
}

/// One Bernstein-Vazirani query and a computational-basis measurement.
///
/// Returns `d` with certainty when `f(x) = x . d`; otherwise whatever string is measured.
pub fn bv_extract<R: Rng + ?Sized>(f: &PhaseOracle, rng: &mut R) -> usize {
    measure(&bv_amplitudes(f), rng.random::<f64>())
}

/// Options for [`search_to_decision_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Apply the random hash. Without it the oracle is built from the base formula.
    pub isolate: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { isolate: true }
    }
}

/// One run of the hash-query-verify pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// A verified witness, or `None` for an abort.
    pub witness: Option<usize>,
    /// The measured string before verification.
    pub measured: usize,
    /// Number of hash rows; 0 without isolation.
    pub k: usize,
    /// Number of witnesses that survived the hash.
    pub surviving_witnesses: usize,
}

/// A formula with its solution set enumerated once, for repeated extraction runs.
#[derive(Debug, Clone)]
pub struct Extractor {
    base: CnfFormula,
    solutions: Vec<usize>,
}

impl Extractor {
    /// Enumerates the solutions of `base`; `m` must be at most 20.
    pub fn new(base: &CnfFormula) -> Result<Self> {
        check_bits(base.num_vars(), MAX_ORACLE_WITNESS_BITS, "oracle witness bits")?;
        Ok(Extractor { base: base.clone(), solutions: base.solutions()? })
    }

    pub fn base(&self) -> &CnfFormula {
        &self.base
    }

    pub fn solutions(&self) -> &[usize] {
        &self.solutions
    }

    /// The oracle for `hashed`, which must share this extractor's base.
    pub fn oracle(&self, hashed: &HashedInstance) -> Result<PhaseOracle> {
        let surviving: Vec<usize> = self.solutions.iter().copied().filter(|&d| hashed.hash_passes(d)).collect();
        oracle_from_witnesses(self.base.num_vars(), &surviving)
    }

    pub fn search<R: Rng + ?Sized>(&self, config: SearchConfig, rng: &mut R) -> Result<SearchOutcome> {
        let m = self.base.num_vars();
        let (k, surviving): (usize, Vec<usize>) = if config.isolate {
            let hashed = vv_hash(&self.base, rng);
            (hashed.k, self.solutions.iter().copied().filter(|&d| hashed.hash_passes(d)).collect())
        } else {
            (0, self.solutions.clone())
        };
        let f = oracle_from_witnesses(m, &surviving)?;
        let measured = bv_extract(&f, rng);
        let witness = self.base.satisfied_by(measured).then_some(measured);
        Ok(SearchOutcome { witness, measured, k, surviving_witnesses: surviving.len() })
    }

    /// `ceil(c (m + t))` independent runs on child streams; the first verified witness wins.
    pub fn amplify(&self, t: u32, c: f64, rng: &mut RngStream) -> Result<AmplifyOutcome> {
        let runs = amplify_runs(self.base.num_vars(), t, c)?;
        let base = rng.split();
        for i in 0..runs {
            let out = self.search(SearchConfig::default(), &mut base.child(i as u64))?;
            if let Some(w) = out.witness {
                return Ok(AmplifyOutcome { witness: Some(w), runs_used: i + 1, runs });
            }
        }
        Ok(AmplifyOutcome { witness: None, runs_used: runs, runs })
    }
}

/// Hash, query once, measure, verify.
pub fn search_to_decision<R: Rng + ?Sized>(base: &CnfFormula, rng: &mut R) -> Result<SearchOutcome> {
    search_to_decision_with(base, SearchConfig::default(), rng)
}

pub fn search_to_decision_with<R: Rng + ?Sized>(
    base: &CnfFormula,
    config: SearchConfig,
    rng: &mut R,
) -> Result<SearchOutcome> {
    Extractor::new(base)?.search(config, rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmplifyOutcome {
    pub witness: Option<usize>,
    pub runs_used: usize,
    pub runs: usize,
}

/// `ceil(c (m + t))`, at least 1.
pub fn amplify_runs(m: usize, t: u32, c: f64) -> Result<usize> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("repetition constant must be positive, got {c}")));
    }
    Ok(((c * (m as f64 + t as f64)).ceil() as usize).max(1))
}

/// Parallel repetition of [`search_to_decision`].
pub fn amplify(base: &CnfFormula, t: u32, c: f64, rng: &mut RngStream) -> Result<AmplifyOutcome> {
    Extractor::new(base)?.amplify(t, c, rng)
}

/// The lexicographically first witness, found by bitwise decision queries and read out with
/// one query to `f(x) = x . d_lex`.
pub fn lex_first_extract(base: &CnfFormula) -> Result<usize> {
    let m = base.num_vars();
    check_bits(m, MAX_ORACLE_WITNESS_BITS, "oracle witness bits")?;
    if !witness_oracle(base, None)? {
        return Err(Error::NoWitness);
    }
    let mut prefix = 0usize;
    for i in 0..m {
        let shift = m - 1 - i;
        let fixed_mask = !((1usize << (shift + 1)) - 1) & ((1usize << m) - 1);
        let want = prefix;
        let zero_here = move |d: usize| d & fixed_mask == want && d >> shift & 1 == 0;
        if !witness_oracle(base, Some(&zero_here))? {
            prefix |= 1 << shift;
        }
    }
    let f = PhaseOracle::linear(m, prefix)?;
    // The amplitudes are a point mass, so any measurement coin gives the same string.
    Ok(measure(&bv_amplitudes(&f), 0.5))
}

/// A random 3-CNF with `n_clauses` clauses, all satisfied by a uniform planted assignment.
pub fn planted_3sat<R: Rng + ?Sized>(m: usize, n_clauses: usize, rng: &mut R) -> Result<(CnfFormula, usize)> {
    if m < 3 {
        return Err(Error::invalid(format!("planted 3-SAT needs at least 3 variables, got {m}")));
    }
    let planted = rng.random::<u64>() as usize & ((1usize << m) - 1);
    let mut clauses = Vec::with_capacity(n_clauses);
    while clauses.len() < n_clauses {
        let mut vars = [0usize; 3];
        let mut filled = 0;
        while filled < 3 {
            let v = rng.random_range(1..=m);
            if !vars[..filled].contains(&v) {
                vars[filled] = v;
                filled += 1;
            }
        }
        let clause: Vec<i32> =
            vars.iter().map(|&v| if rng.random::<bool>() { v as i32 } else { -(v as i32) }).collect();
        let sat = clause.iter().any(|&l| {
            let val = planted >> (m - l.unsigned_abs() as usize) & 1 == 1;
            (l > 0) == val
        });
        if sat {
            clauses.push(clause);
        }
    }
    Ok((CnfFormula::new(m, clauses)?, planted))
}
