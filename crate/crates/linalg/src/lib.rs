//! Dense complex linear algebra used by every other crate of the workspace.
//!
//! Matrices are thin wrappers over `nalgebra::DMatrix<Complex64>`. The
//! Hermitian wrapper symmetrizes float noise at construction and refuses
//! genuinely non-Hermitian input.

use nalgebra::DMatrix;
pub use num_complex::Complex64;
use rand::Rng;
use std::fmt;

pub type C64 = Complex64;

/// Largest asymmetry absorbed when building a [`HermitianMatrix`].
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("entry count {got} does not match {rows}x{cols}")]
    Shape { rows: usize, cols: usize, got: usize },
    #[error("non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("dimension mismatch: {0}x{1} against {2}x{3}")]
    Mismatch(usize, usize, usize, usize),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("empty matrix")]
    Empty,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{:?}", self.0)
    }
}

fn check_finite(m: &DMatrix<C64>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(LinalgError::NonFinite(i, j));
            }
        }
    }
    Ok(())
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(LinalgError::Shape { rows, cols, got: entries.len() });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        check_finite(&m)?;
        Ok(Self(m))
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| re(x)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Self::from_dmatrix(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn diagonal(d: &[C64]) -> Self {
        let n = d.len();
        Self(DMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { C64::new(0.0, 0.0) }))
    }

    pub fn real_diagonal(d: &[f64]) -> Self {
        Self::diagonal(&d.iter().map(|&x| re(x)).collect::<Vec<_>>())
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    /// Row-major copy of the entries.
    pub fn entries(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                v.push(self.0[(i, j)]);
            }
        }
        v
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(self.mismatch(other));
        }
        Ok(Self(&self.0 * &other.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// Direct sum diag(self, other).
    pub fn direct_sum(&self, other: &Self) -> Self {
        block_diagonal(&[self.clone(), other.clone()])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Largest entrywise deviation from another matrix of the same shape.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows(), self.cols()), (other.rows(), other.cols()));
        self.0.iter().zip(other.0.iter()).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    fn mismatch(&self, other: &Self) -> LinalgError {
        LinalgError::Mismatch(self.rows(), self.cols(), other.rows(), other.cols())
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            Err(self.mismatch(other))
        } else {
            Ok(())
        }
    }
}

/// Block-diagonal assembly of arbitrary (possibly rectangular) blocks.
pub fn block_diagonal(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let r: usize = blocks.iter().map(|b| b.rows()).sum();
    let c: usize = blocks.iter().map(|b| b.cols()).sum();
    let mut m = DMatrix::zeros(r, c);
    let (mut i0, mut j0) = (0, 0);
    for b in blocks {
        m.view_mut((i0, j0), (b.rows(), b.cols())).copy_from(&b.0);
        i0 += b.rows();
        j0 += b.cols();
    }
    ComplexMatrix(m)
}

/// A square matrix equal to its adjoint.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<C64>);

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermitianMatrix{:?}", self.0)
    }
}

impl HermitianMatrix {
    /// Accepts `m` if `max|m - m*| <= 1e-12 * max(1, max|m|)` and stores `(m + m*)/2`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(LinalgError::NotSquare(m.rows(), m.cols()));
        }
        let adj = m.0.adjoint();
        let asym = m.0.iter().zip(adj.iter()).fold(0.0f64, |a, (x, y)| a.max((x - y).norm()));
        if asym > HERMITIAN_TOL * m.max_abs().max(1.0) {
            return Err(LinalgError::NotHermitian(asym));
        }
        Ok(Self((&m.0 + adj) * C64::new(0.5, 0.0)))
    }

    pub fn from_real_symmetric(n: usize, entries: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real(n, n, entries)?)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix(self.0.clone())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(LinalgError::Mismatch(self.dim(), self.dim(), other.dim(), other.dim()));
        }
        Ok(Self(&self.0 + &other.0))
    }

    /// u h u* for a square `u` of matching size.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.mul(&self.to_complex())?.mul(&u.adjoint())?;
        Self::new(m)
    }
}

/// Ascending eigenvalues.
pub fn hermitian_eigenvalues(h: &HermitianMatrix) -> Vec<f64> {
    hermitian_eigen(h).0
}

/// Ascending eigenvalues with the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(h: &HermitianMatrix) -> (Vec<f64>, DMatrix<C64>) {
    let n = h.dim();
    if n == 0 {
        return (vec![], DMatrix::zeros(0, 0));
    }
    let se = h.0.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, k| se.eigenvectors[(r, idx[k])]);
    (vals, vecs)
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    if m.max_abs() == 0.0 {
        return 0.0;
    }
    m.0.clone().singular_values().max()
}

/// `d a - a d`.
pub fn commutator(d: &HermitianMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() != d.dim() || a.cols() != d.dim() {
        return Err(LinalgError::Mismatch(d.dim(), d.dim(), a.rows(), a.cols()));
    }
    Ok(ComplexMatrix(&d.0 * &a.0 - &a.0 * &d.0))
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| C64::new(gauss(rng), gauss(rng)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix column phases so the distribution is Haar.
    let q = DMatrix::from_fn(n, n, |i, j| {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q[(i, j)] * ph
    });
    ComplexMatrix(q)
}

/// Random unit vector in C^n.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| C64::new(gauss(rng), gauss(rng))).collect();
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / nrm).collect()
}

/// Standard normal sample (Box-Muller).
pub fn gauss<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen::<f64>().max(1e-300);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}
