use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::Rng;

use crate::qcore::{StateVector, UnitaryMatrix};
use crate::{Error, Result, C64};

/// Largest register for which a dense Clifford matrix is materialized.
const MAX_DENSE_QUBITS: usize = 12;

/// A Hermitian Pauli operator `(-1)^neg * i^{|x & z|} * X^x Z^z`.
///
/// Bit `j` of `x` and `z` acts on bit `j` of the basis index, so `X^x |e> = |e ^ x>` and
/// `Z^z |e> = (-1)^{|z & e|} |e>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pauli {
    pub x: u64,
    pub z: u64,
    pub neg: bool,
}

impl Pauli {
    pub fn x_bit(j: usize) -> Pauli {
        Pauli { x: 1 << j, z: 0, neg: false }
    }

    pub fn z_bit(j: usize) -> Pauli {
        Pauli { x: 0, z: 1 << j, neg: false }
    }

    /// Exponent `k` with `self = i^k X^x Z^z`.
    fn i_power(self) -> u32 {
        ((self.x & self.z).count_ones() + if self.neg { 2 } else { 0 }) % 4
    }

    /// Symplectic product: 0 when the two operators commute, 1 when they anticommute.
    pub fn symplectic(self, other: Pauli) -> u32 {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() % 2
    }

    pub fn commutes_with(self, other: Pauli) -> bool {
        self.symplectic(other) == 0
    }

    /// `self |v>` in place on a dense vector.
    pub fn apply_in_place(self, v: &mut [C64]) {
        let phase = i_pow(self.i_power());
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (e, &a) in v.iter().enumerate() {
            let sign = if (self.z & e as u64).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            out[e ^ self.x as usize] = a * phase * sign;
        }
        v.copy_from_slice(&out);
    }
}

fn i_pow(k: u32) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// `i^k X^x Z^z` accumulator used while conjugating.
#[derive(Clone, Copy)]
struct PhasedPauli {
    k: u32,
    x: u64,
    z: u64,
}

impl PhasedPauli {
    fn mul(self, p: Pauli) -> Self {
        // X^a Z^b X^c Z^d = (-1)^{|b & c|} X^{a^c} Z^{b^d}
        let swap = 2 * ((self.z & p.x).count_ones() % 2);
        PhasedPauli { k: (self.k + p.i_power() + swap) % 4, x: self.x ^ p.x, z: self.z ^ p.z }
    }

    fn into_hermitian(self) -> Pauli {
        let rest = (self.k + 4 - (self.x & self.z).count_ones() % 4) % 4;
        debug_assert!(rest.is_multiple_of(2), "conjugation produced a non-Hermitian Pauli");
        Pauli { x: self.x, z: self.z, neg: rest == 2 }
    }
}

/// A Clifford unitary, modulo global phase, stored as its action on Pauli generators.
///
/// `x_images[j] = C X_j C^dagger` and `z_images[j] = C Z_j C^dagger`.
#[derive(Debug)]
pub struct CliffordElement {
    n_qubits: usize,
    x_images: Vec<Pauli>,
    z_images: Vec<Pauli>,
    dense: OnceLock<UnitaryMatrix>,
}

impl Clone for CliffordElement {
    fn clone(&self) -> Self {
        let dense = OnceLock::new();
        if let Some(u) = self.dense.get() {
            let _ = dense.set(u.clone());
        }
        CliffordElement {
            n_qubits: self.n_qubits,
            x_images: self.x_images.clone(),
            z_images: self.z_images.clone(),
            dense,
        }
    }
}

impl PartialEq for CliffordElement {
    fn eq(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits && self.x_images == other.x_images && self.z_images == other.z_images
    }
}

impl CliffordElement {
    /// Builds from generator images, checking the symplectic relations.
    pub fn from_images(x_images: Vec<Pauli>, z_images: Vec<Pauli>) -> Result<Self> {
        let n = x_images.len();
        if n == 0 || n > 63 || z_images.len() != n {
            return Err(Error::invalid("need matching, nonempty X and Z image lists"));
        }
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let all: Vec<Pauli> = x_images.iter().chain(&z_images).copied().collect();
        if all.iter().any(|p| (p.x | p.z) & !mask != 0) {
            return Err(Error::invalid("Pauli image acts outside the register"));
        }
        for i in 0..2 * n {
            for j in (i + 1)..2 * n {
                let expect = u32::from(j == i + n);
                if all[i].symplectic(all[j]) != expect {
                    return Err(Error::invalid("images do not satisfy the Pauli commutation relations"));
                }
            }
        }
        Ok(CliffordElement { n_qubits: n, x_images, z_images, dense: OnceLock::new() })
    }

    pub fn identity(n_qubits: usize) -> Self {
        CliffordElement {
            n_qubits,
            x_images: (0..n_qubits).map(Pauli::x_bit).collect(),
            z_images: (0..n_qubits).map(Pauli::z_bit).collect(),
            dense: OnceLock::new(),
        }
    }

    /// `H` on every qubit.
    pub fn hadamard_all(n_qubits: usize) -> Self {
        CliffordElement {
            n_qubits,
            x_images: (0..n_qubits).map(Pauli::z_bit).collect(),
            z_images: (0..n_qubits).map(Pauli::x_bit).collect(),
            dense: OnceLock::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_images(&self) -> &[Pauli] {
        &self.x_images
    }

    pub fn z_images(&self) -> &[Pauli] {
        &self.z_images
    }

    /// `C P C^dagger`.
    pub fn conjugate(&self, p: Pauli) -> Pauli {
        // p = i^{k} prod_j X_j^{x_j} prod_j Z_j^{z_j}
        let mut acc = PhasedPauli { k: p.i_power(), x: 0, z: 0 };
        for j in 0..self.n_qubits {
            if p.x >> j & 1 == 1 {
                acc = acc.mul(self.x_images[j]);
            }
        }
        for j in 0..self.n_qubits {
            if p.z >> j & 1 == 1 {
                acc = acc.mul(self.z_images[j]);
            }
        }
        acc.into_hermitian()
    }

    /// Dense unitary, computed once and cached.
    pub fn dense(&self) -> Result<UnitaryMatrix> {
        if let Some(u) = self.dense.get() {
            return Ok(u.clone());
        }
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::CapExceeded {
                what: "dense Clifford qubits",
                value: self.n_qubits as u64,
                cap: MAX_DENSE_QUBITS as u64,
            });
        }
        let u = self.materialize();
        Ok(self.dense.get_or_init(|| u).clone())
    }

    fn materialize(&self) -> UnitaryMatrix {
        let d = 1usize << self.n_qubits;
        // C|0> is the joint +1 eigenvector of the images of the Z generators.
        let mut col0 = Vec::new();
        for e in 0..d {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[e] = C64::new(1.0, 0.0);
            for p in &self.z_images {
                let mut pv = v.clone();
                p.apply_in_place(&mut pv);
                v.iter_mut().zip(&pv).for_each(|(a, b)| *a = (*a + b) * 0.5);
            }
            let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if n > 1e-6 {
                let s = n.sqrt().recip();
                v.iter_mut().for_each(|z| *z *= s);
                col0 = v;
                break;
            }
        }
        debug_assert_eq!(col0.len(), d);
        // C|x> = prod_j (C X_j C^dagger)^{x_j} C|0>, filled along a Gray code.
        let mut columns = vec![Vec::new(); d];
        columns[0] = col0;
        let mut prev = 0usize;
        for t in 1..d {
            let g = t ^ (t >> 1);
            let bit = (g ^ prev).trailing_zeros() as usize;
            let mut v = columns[prev].clone();
            self.x_images[bit].apply_in_place(&mut v);
            columns[g] = v;
            prev = g;
        }
        UnitaryMatrix::from_raw(DMatrix::from_fn(d, d, |i, j| columns[j][i]))
    }

    /// `C psi`.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        crate::qcore::apply_unitary(&self.dense()?, psi)
    }

    /// `C^dagger psi`.
    pub fn apply_adjoint(&self, psi: &StateVector) -> Result<StateVector> {
        self.dense()?.apply_adjoint(psi)
    }
}

/// A uniformly random Clifford on `n_qubits` qubits, modulo global phase.
///
/// Picks a uniformly random ordered symplectic basis `(v_1, w_1, ..., v_n, w_n)` of
/// `F_2^{2n}` one pair at a time, then independent uniform signs for all `2n` images. Each
/// pair is drawn uniformly from the symplectic complement of the previous pairs, and the
/// number of choices at each step does not depend on earlier choices, so every Clifford
/// class is equally likely.
pub fn random_clifford<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<CliffordElement> {
    if n_qubits == 0 || n_qubits > 31 {
        return Err(Error::invalid(format!("random_clifford needs 1..=31 qubits, got {n_qubits}")));
    }
    let n = n_qubits;
    // Vectors of F_2^{2n} packed as (x bits) | (z bits) << n.
    let form = |a: u64, b: u64| -> u32 {
        let mask = (1u64 << n) - 1;
        let (ax, az, bx, bz) = (a & mask, a >> n, b & mask, b >> n);
        ((ax & bz) ^ (az & bx)).count_ones() % 2
    };
    // Spanning set of the current complement; starts as the standard basis.
    let mut span: Vec<u64> = (0..2 * n).map(|i| 1u64 << i).collect();
    let random_combo = |span: &[u64], rng: &mut R| -> u64 {
        span.iter().fold(0u64, |acc, &b| if rng.random::<bool>() { acc ^ b } else { acc })
    };
    let mut xs = Vec::with_capacity(n);
    let mut zs = Vec::with_capacity(n);
    for _ in 0..n {
        let v = loop {
            let c = random_combo(&span, rng);
            if c != 0 {
                break c;
            }
        };
        let w = loop {
            let c = random_combo(&span, rng);
            if form(v, c) == 1 {
                break c;
            }
        };
        for b in span.iter_mut() {
            let (bw, bv) = (form(*b, w), form(*b, v));
            if bw == 1 {
                *b ^= v;
            }
            if bv == 1 {
                *b ^= w;
            }
        }
        xs.push(v);
        zs.push(w);
    }
    let mask = (1u64 << n) - 1;
    let to_pauli = |packed: u64, neg: bool| Pauli { x: packed & mask, z: packed >> n, neg };
    let x_images = xs.iter().map(|&v| to_pauli(v, rng.random::<bool>())).collect();
    let z_images = zs.iter().map(|&w| to_pauli(w, rng.random::<bool>())).collect();
    Ok(CliffordElement { n_qubits, x_images, z_images, dense: OnceLock::new() })
}
