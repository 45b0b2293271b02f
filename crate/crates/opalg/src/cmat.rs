//! Complex matrix helpers shared by the algebra and modular modules.
//!
//! All inner products on matrix space are the *normalized* Hilbert-Schmidt
//! product `<a, b> = tr(a^dag b) / n`, so the identity has unit norm in every
//! ambient dimension.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

/// Vectors with residual norm below this after projection are treated as
/// linearly dependent and dropped during orthonormalization.
pub const RANK_DROP_TOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Normalized Hilbert-Schmidt inner product `tr(a^dag b) / n`.
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    (a.adjoint() * b).trace() / c(n as f64, 0.0)
}

pub fn hs_norm(a: &CMat) -> f64 {
    hs_inner(a, a).re.max(0.0).sqrt()
}

/// Eigendecomposition of a Hermitian matrix: `m = U diag(vals) U^dag`.
pub fn herm_eig(m: &CMat) -> (DVector<f64>, CMat) {
    let se = nalgebra::SymmetricEigen::new(m.clone());
    (se.eigenvalues, se.eigenvectors)
}

/// Applies a scalar function to a Hermitian matrix through its spectrum.
pub fn herm_func(m: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let (vals, vecs) = herm_eig(m);
    let d = CMat::from_diagonal(&vals.map(&f));
    &vecs * d * vecs.adjoint()
}

pub fn herm_min_eig(m: &CMat) -> f64 {
    let (vals, _) = herm_eig(m);
    vals.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Projects `m` onto the span of an HS-orthonormal family; returns the
/// projection and the norm of what is left over.
pub fn span_project(basis: &[CMat], m: &CMat) -> (CMat, f64) {
    let mut proj = CMat::zeros(m.nrows(), m.ncols());
    for b in basis {
        proj += b * hs_inner(b, m);
    }
    let residual = m - &proj;
    (proj, hs_norm(&residual))
}

pub fn span_residual(basis: &[CMat], m: &CMat) -> f64 {
    span_project(basis, m).1
}

/// Modified Gram-Schmidt over matrix space with a re-orthogonalization pass.
/// Directions that project to less than `drop_tol` are discarded.
pub fn orthonormalize(mats: impl IntoIterator<Item = CMat>, drop_tol: f64) -> Vec<CMat> {
    let mut basis: Vec<CMat> = Vec::new();
    for m in mats {
        let mut v = m;
        for _ in 0..2 {
            for b in &basis {
                let coeff = hs_inner(b, &v);
                v -= b * coeff;
            }
        }
        let norm = hs_norm(&v);
        if norm > drop_tol {
            basis.push(v / c(norm, 0.0));
        }
    }
    basis
}

/// Matrix unit `E_jk` in `M_n`.
pub fn matrix_unit(n: usize, j: usize, k: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(j, k)] = c(1.0, 0.0);
    m
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

pub fn from_real(m: &RMat) -> CMat {
    m.map(|x| c(x, 0.0))
}

/// Complex matrix with independent standard-normal real and imaginary parts.
pub fn random_cmat<R: Rng>(rng: &mut R, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        c(
            rng.sample(rand_distr::StandardNormal),
            rng.sample(rand_distr::StandardNormal),
        )
    })
}

/// Reinterprets a length-`n^2` vector as an `n x n` matrix (column-major).
pub fn unvec(v: &DVector<C64>, n: usize) -> CMat {
    CMat::from_iterator(n, n, v.iter().cloned())
}
