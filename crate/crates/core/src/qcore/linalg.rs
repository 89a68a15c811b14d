//! Dense complex kernels on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::C64;

/// Complex matrix product computed as four real products.
///
/// nalgebra routes `f64` products through a blocked kernel but complex products through a
/// generic loop; splitting into real and imaginary parts is several times faster at the
/// sizes used here and exact up to the usual floating-point reassociation.
pub fn cmatmul(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    assert_eq!(a.ncols(), b.nrows(), "cmatmul: inner dimensions differ");
    if a.nrows() * a.ncols() * b.ncols() < 4096 {
        return a * b;
    }
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    DMatrix::from_fn(a.nrows(), b.ncols(), |i, j| C64::new(re[(i, j)], im[(i, j)]))
}

fn split(m: &DMatrix<C64>) -> (DMatrix<f64>, DMatrix<f64>) {
    (m.map(|z| z.re), m.map(|z| z.im))
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector for `values[j]`.
    pub vectors: DMatrix<C64>,
}

/// Diagonalizes `m`, which is assumed Hermitian; only the Hermitian part is used.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> HermitianEigen {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}
