//! Univariate and bivariate real polynomials with resultants and root finding.

mod bivariate;
mod roots;

pub use bivariate::{dis_in_variable, BivariatePolynomial, Var};
pub use roots::{real_roots, RealRoot};

use nalgebra::DMatrix;
use std::fmt;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("resultant of two constants is undefined")]
    BothConstant,
    #[error("degree {0} is too small (need at least {1})")]
    DegreeTooLow(usize, usize),
    #[error("polynomial is identically zero in the eliminated variable")]
    Degenerate,
}

/// Real polynomial with ascending coefficients. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Default)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl fmt::Debug for RealPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealPolynomial{:?}", self.coeffs)
    }
}

/// Relative threshold below which trailing coefficients are dropped.
pub const TRIM_TOL: f64 = 1e-12;

impl RealPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        p.trim(TRIM_TOL);
        p
    }

    /// Keeps every coefficient, including tiny leading ones.
    pub fn new_exact(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new_exact(vec![c])
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    /// x - r for each root.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Self::constant(1.0), |p, &r| p.mul(&Self::new_exact(vec![-r, 1.0])))
    }

    fn trim(&mut self, rel: f64) {
        let m = self.max_abs();
        while let Some(&last) = self.coeffs.last() {
            if last.abs() <= rel * m || last == 0.0 {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: num_complex::Complex64) -> num_complex::Complex64 {
        self.coeffs.iter().rev().fold(num_complex::Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Σ|c_i||x|^i, the natural magnitude against which |p(x)| is judged.
    pub fn scale_at(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Self {
        Self::new_exact(self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| i as f64 * c).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new_exact((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new_exact(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new_exact(out)
    }

    /// Divided by its largest coefficient magnitude.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs();
        if m == 0.0 {
            self.clone()
        } else {
            self.scale(1.0 / m)
        }
    }
}

/// Sylvester matrix of p (degree m) and q (degree n), size (m+n), p rows first,
/// coefficients in descending order.
pub fn sylvester_matrix(p: &[f64], q: &[f64]) -> DMatrix<f64> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    let mut s = DMatrix::zeros(size, size);
    for r in 0..n {
        for (k, &c) in p.iter().rev().enumerate() {
            s[(r, r + k)] = c;
        }
    }
    for r in 0..m {
        for (k, &c) in q.iter().rev().enumerate() {
            s[(n + r, r + k)] = c;
        }
    }
    s
}

/// Determinant of the Sylvester matrix, via LU with partial pivoting.
pub fn resultant(p: &RealPolynomial, q: &RealPolynomial) -> Result<f64, PolyError> {
    if p.degree() == 0 && q.degree() == 0 {
        return Err(PolyError::BothConstant);
    }
    if p.is_zero() || q.is_zero() {
        return Ok(0.0);
    }
    let s = sylvester_matrix(p.coeffs(), q.coeffs());
    Ok(s.lu().determinant())
}

/// Res(p, p'), without normalization by the leading coefficient.
pub fn discriminant(p: &RealPolynomial) -> Result<f64, PolyError> {
    if p.degree() < 2 {
        return Err(PolyError::DegreeTooLow(p.degree(), 2));
    }
    resultant(p, &p.derivative())
}
