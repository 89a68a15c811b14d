//! Local Hamiltonians with promise thresholds, their normalization and a text format.
//!
//! The text format is line oriented:
//!
//! ```text
//! # comment
//! n k a b
//! q1,...,qj : re+imj re+imj ...
//! ```
//!
//! Each term line lists the qubits it acts on, then the `2^j x 2^j` block in row-major order.
//! The first listed qubit is the most significant bit of the block index, and qubit 0 is the
//! most significant bit of the full basis index.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::numeric::NumericPolicy;
use crate::qcore::{hermitian_eigen, HermitianEigen};
use crate::{Error, Result, C64};

/// Largest register the dense QMA routines accept.
pub const MAX_QMA_QUBITS: usize = 12;

/// Slack allowed when deciding that a spectrum already lies in `[0, 1]`.
const SPECTRUM_TOL: f64 = 1e-9;

/// One few-qubit Hermitian term.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm {
    qubits: Vec<usize>,
    block: DMatrix<C64>,
}

impl HamiltonianTerm {
    pub fn new(qubits: Vec<usize>, block: DMatrix<C64>) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::invalid("a term must act on at least one qubit"));
        }
        let mut sorted = qubits.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("repeated qubit in term {qubits:?}")));
        }
        let dim = 1usize << qubits.len();
        if block.nrows() != block.ncols() {
            return Err(Error::NotSquare { rows: block.nrows(), cols: block.ncols() });
        }
        if block.nrows() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: block.nrows() });
        }
        let dev = (&block - block.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > NumericPolicy::DEFAULT.hermitian_tol {
            return Err(Error::NotHermitian { max_dev: dev });
        }
        Ok(HamiltonianTerm { qubits, block })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn block(&self) -> &DMatrix<C64> {
        &self.block
    }
}

/// `H = offset * I + sum_i H_i` with the promise that `lambda_min <= a` or `lambda_min > b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalHamiltonian {
    n_qubits: usize,
    locality: usize,
    terms: Vec<HamiltonianTerm>,
    offset: f64,
    a: f64,
    b: f64,
    normalized: bool,
    degenerate: bool,
}

impl LocalHamiltonian {
    pub fn new(n_qubits: usize, locality: usize, terms: Vec<HamiltonianTerm>, a: f64, b: f64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QMA_QUBITS {
            return Err(Error::CapExceeded {
                what: "Hamiltonian qubits",
                value: n_qubits as u64,
                cap: MAX_QMA_QUBITS as u64,
            });
        }
        if locality == 0 || locality > n_qubits {
            return Err(Error::invalid(format!("locality must be in 1..={n_qubits}, got {locality}")));
        }
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::invalid(format!("thresholds need b > a, got a = {a}, b = {b}")));
        }
        for t in &terms {
            if t.qubits.len() > locality {
                return Err(Error::invalid(format!("term on {:?} exceeds the declared locality {locality}", t.qubits)));
            }
            if let Some(&q) = t.qubits.iter().find(|&&q| q >= n_qubits) {
                return Err(Error::invalid(format!("qubit {q} out of range for {n_qubits} qubits")));
            }
        }
        Ok(LocalHamiltonian { n_qubits, locality, terms, offset: 0.0, a, b, normalized: false, degenerate: false })
    }

    /// A Hamiltonian given by a single term acting on all `n_qubits` qubits.
    pub fn from_dense(matrix: DMatrix<C64>, a: f64, b: f64) -> Result<Self> {
        let n = crate::numeric::log2_exact(matrix.nrows()).ok_or(Error::NotPowerOfTwo(matrix.nrows()))?;
        let term = HamiltonianTerm::new((0..n).collect(), matrix)?;
        LocalHamiltonian::new(n, n, vec![term], a, b)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn locality(&self) -> usize {
        self.locality
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    /// Multiple of the identity added to the terms.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// The same operator with new thresholds.
    pub fn with_thresholds(&self, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::invalid(format!("thresholds need b > a, got a = {a}, b = {b}")));
        }
        Ok(LocalHamiltonian { a, b, ..self.clone() })
    }

    /// The promise gap `b - a`.
    pub fn gap(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Set when normalization met a spectrum of zero width and could only shift it.
    pub fn degenerate_spectrum(&self) -> bool {
        self.degenerate
    }

    /// The full `2^n x 2^n` matrix.
    pub fn dense(&self) -> DMatrix<C64> {
        let n = self.n_qubits;
        let d = 1usize << n;
        let mut h = DMatrix::from_diagonal_element(d, d, C64::new(self.offset, 0.0));
        for t in &self.terms {
            let positions: Vec<usize> = t.qubits.iter().map(|&q| n - 1 - q).collect();
            let mask: usize = positions.iter().map(|&p| 1usize << p).sum();
            let j = positions.len();
            let scatter = |local: usize| -> usize {
                (0..j).filter(|&i| local >> (j - 1 - i) & 1 == 1).map(|i| 1usize << positions[i]).sum()
            };
            let spread: Vec<usize> = (0..1usize << j).map(scatter).collect();
            for x in 0..d {
                let rest = x & !mask;
                let row = spread.iter().position(|&s| s == x & mask).expect("scatter is a bijection");
                for (col, &s) in spread.iter().enumerate() {
                    let v = t.block[(row, col)];
                    if v != C64::new(0.0, 0.0) {
                        h[(x, rest | s)] += v;
                    }
                }
            }
        }
        h
    }

    /// Diagonalizes the dense matrix.
    pub fn eigen(&self) -> HermitianEigen {
        hermitian_eigen(&self.dense())
    }

    /// Applies `H -> (H - shift) / scale` to the operator and both thresholds.
    fn affine(&self, shift: f64, scale: f64) -> LocalHamiltonian {
        let inv = C64::new(scale.recip(), 0.0);
        let terms =
            self.terms.iter().map(|t| HamiltonianTerm { qubits: t.qubits.clone(), block: &t.block * inv }).collect();
        LocalHamiltonian {
            n_qubits: self.n_qubits,
            locality: self.locality,
            terms,
            offset: (self.offset - shift) / scale,
            a: (self.a - shift) / scale,
            b: (self.b - shift) / scale,
            normalized: true,
            degenerate: self.degenerate,
        }
    }

    /// Serializes to the text format. Identity offsets are written as a term on qubit 0.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {} {}", self.n_qubits, self.locality, self.a, self.b);
        for t in &self.terms {
            write_term(&mut out, &t.qubits, &t.block);
        }
        if self.offset != 0.0 {
            let block = DMatrix::from_diagonal_element(2, 2, C64::new(self.offset, 0.0));
            write_term(&mut out, &[0], &block);
        }
        out
    }

    /// Parses the text format; every malformed line is reported with its 1-based number.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize, usize, f64, f64)> = None;
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: line_no, message };
            match header {
                None => {
                    let fields: Vec<&str> = line.split_whitespace().collect();
                    if fields.len() != 4 {
                        return Err(err(format!("header needs `n k a b`, found {} fields", fields.len())));
                    }
                    let n = fields[0].parse::<usize>().map_err(|e| err(format!("bad n: {e}")))?;
                    let k = fields[1].parse::<usize>().map_err(|e| err(format!("bad k: {e}")))?;
                    let a = fields[2].parse::<f64>().map_err(|e| err(format!("bad a: {e}")))?;
                    let b = fields[3].parse::<f64>().map_err(|e| err(format!("bad b: {e}")))?;
                    header = Some((line_no, n, k, a, b));
                }
                Some(_) => {
                    let (lhs, rhs) =
                        line.split_once(':').ok_or_else(|| err("term line needs `qubits : entries`".into()))?;
                    let qubits = lhs
                        .split(',')
                        .map(|s| {
                            s.trim().parse::<usize>().map_err(|e| err(format!("bad qubit index `{}`: {e}", s.trim())))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if qubits.len() > 30 {
                        return Err(err(format!("term acts on {} qubits", qubits.len())));
                    }
                    let dim = 1usize << qubits.len();
                    let entries =
                        rhs.split_whitespace().map(|s| parse_complex(s).map_err(&err)).collect::<Result<Vec<_>>>()?;
                    if entries.len() != dim * dim {
                        return Err(err(format!(
                            "expected {} entries for a {dim}x{dim} block, found {}",
                            dim * dim,
                            entries.len()
                        )));
                    }
                    let block = DMatrix::from_row_slice(dim, dim, &entries);
                    terms.push((line_no, qubits, block));
                }
            }
        }
        let (header_line, n, k, a, b) = header.ok_or(Error::Parse { line: 0, message: "missing header".into() })?;
        let mut built = Vec::with_capacity(terms.len());
        for (line_no, qubits, block) in terms {
            if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
                return Err(Error::Parse { line: line_no, message: format!("qubit {q} out of range for {n} qubits") });
            }
            if qubits.len() > k {
                return Err(Error::Parse { line: line_no, message: format!("term exceeds locality {k}") });
            }
            let term = HamiltonianTerm::new(qubits, block)
                .map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
            built.push(term);
        }
        LocalHamiltonian::new(n, k, built, a, b).map_err(|e| Error::Parse { line: header_line, message: e.to_string() })
    }
}

fn write_term(out: &mut String, qubits: &[usize], block: &DMatrix<C64>) {
    let qs: Vec<String> = qubits.iter().map(|q| q.to_string()).collect();
    let _ = write!(out, "{} :", qs.join(","));
    for r in 0..block.nrows() {
        for c in 0..block.ncols() {
            let z = block[(r, c)];
            let _ = write!(out, " {}{:+}j", z.re, z.im);
        }
    }
    out.push('\n');
}

/// Parses `re+imj` or `re-imj`; both parts are mandatory.
fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let body = s.strip_suffix('j').ok_or_else(|| format!("complex entry `{s}` must end in `j`"))?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(|| format!("complex entry `{s}` needs the form re+imj"))?;
    let re = body[..split].parse::<f64>().map_err(|e| format!("bad real part in `{s}`: {e}"))?;
    let im = body[split..].parse::<f64>().map_err(|e| format!("bad imaginary part in `{s}`: {e}"))?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(format!("non-finite entry `{s}`"));
    }
    Ok(C64::new(re, im))
}

/// Rescales so the spectrum lies in `[0, 1]`, moving `a` and `b` with it.
///
/// A spectrum already inside `[0, 1]` (up to `1e-9`) is left alone. Otherwise
/// `H' = (H - lambda_min) / (lambda_max - lambda_min)`. If the spectrum has zero width the
/// operator is only shifted to `0` and the result is flagged with
/// [`LocalHamiltonian::degenerate_spectrum`].
pub fn normalize_hamiltonian(h: &LocalHamiltonian) -> LocalHamiltonian {
    let eig = h.eigen();
    let lo = eig.values[0];
    let hi = *eig.values.last().expect("nonempty spectrum");
    let spread = hi - lo;
    let width_zero = spread <= SPECTRUM_TOL * hi.abs().max(lo.abs()).max(1.0);
    if lo >= -SPECTRUM_TOL && hi <= 1.0 + SPECTRUM_TOL {
        let mut out = h.clone();
        out.normalized = true;
        out.degenerate = width_zero;
        return out;
    }
    if width_zero {
        let mut out = h.affine(lo, 1.0);
        out.degenerate = true;
        return out;
    }
    h.affine(lo, spread)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn dense_embedding_respects_qubit_order() {
        // Z on qubit 0 of two qubits: diag(1, 1, -1, -1).
        let z = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
        let h = LocalHamiltonian::new(2, 1, vec![HamiltonianTerm::new(vec![0], z.clone()).unwrap()], 0.0, 0.5).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| h.dense()[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
        // A block on (1, 0) swaps the roles of the block bits.
        let zi = DMatrix::from_fn(4, 4, |r, cc| if r == cc { c(if r < 2 { 1.0 } else { -1.0 }) } else { c(0.0) });
        let h = LocalHamiltonian::new(2, 2, vec![HamiltonianTerm::new(vec![1, 0], zi).unwrap()], 0.0, 0.5).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| h.dense()[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn normalization_cases() {
        let p1 = DMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(2.0)]);
        let h = LocalHamiltonian::from_dense(p1, 0.2, 0.6).unwrap();
        let n = normalize_hamiltonian(&h);
        assert!((n.a() - 0.1).abs() < 1e-15 && (n.b() - 0.3).abs() < 1e-15);
        assert!((n.dense()[(1, 1)].re - 1.0).abs() < 1e-15);
        assert!(!n.degenerate_spectrum());

        let half = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(0.25)]);
        let h = LocalHamiltonian::from_dense(half, 0.3, 0.4).unwrap();
        let n = normalize_hamiltonian(&h);
        assert_eq!(n.dense(), h.dense());
        assert!(n.is_normalized());

        let shifted = DMatrix::from_diagonal_element(2, 2, c(3.0));
        let n = normalize_hamiltonian(&LocalHamiltonian::from_dense(shifted, 3.0, 3.5).unwrap());
        assert!(n.degenerate_spectrum());
        assert!(n.dense().iter().all(|z| z.norm() < 1e-15));
        assert!(n.a().abs() < 1e-15 && (n.b() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let text = "# two qubits\n2 2 0.1 0.35\n0,1 : 1+0j 0+0j 0+0j 0-0.5j 0+0j 0+0j 0+0j 0+0j 0+0j 0+0j 0+0j 0+0j 0+0.5j 0+0j 0+0j 1e-3+0j\n1 : 0.25+0j 0+0j 0+0j -1.5E+1-0j\n";
        let h = LocalHamiltonian::parse(text).unwrap();
        assert_eq!(h.terms().len(), 2);
        assert_eq!(h.terms()[0].block()[(0, 3)], C64::new(0.0, -0.5));
        assert_eq!(h.terms()[1].block()[(1, 1)], C64::new(-15.0, 0.0));
        let again = LocalHamiltonian::parse(&h.to_text()).unwrap();
        assert_eq!(again, h);

        let bad = "1 1 0 1\n0 : 1+0j 0+0j 0+0j\n";
        assert!(matches!(LocalHamiltonian::parse(bad), Err(Error::Parse { line: 2, .. })));
        let bad = "1 1 0 1\n0 : 1+0j 0+0j 0+0j 1\n";
        assert!(matches!(LocalHamiltonian::parse(bad), Err(Error::Parse { line: 2, .. })));
        let bad = "1 1 0 1\n\n3 : 1+0j 0+0j 0+0j 1+0j\n";
        assert!(matches!(LocalHamiltonian::parse(bad), Err(Error::Parse { line: 3, .. })));
        let bad = "1 1 0.5 0.2\n";
        assert!(matches!(LocalHamiltonian::parse(bad), Err(Error::Parse { line: 1, .. })));
        let non_hermitian = "1 1 0 1\n0 : 0+0j 1+0j 0+0j 0+0j\n";
        assert!(matches!(LocalHamiltonian::parse(non_hermitian), Err(Error::Parse { line: 2, .. })));
    }
}
