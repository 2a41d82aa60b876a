//! Finite commutative spaces ℂⁿ: the Dirac graph, closed-form distances, the
//! star-delta inverse, the four-point analysis and the metric realization.

mod four_point;
mod graph;
mod realize;

pub use four_point::{
    four_point_general, four_point_special, four_point_triple, n_alpha_beta, v_eff, Branch12, Branch13,
    FourPointCoeffs, FourPointResult, FourPointSource, NAlphaBeta, SpecialDistances,
};
pub use graph::{geodesic_length, graph_from_dirac, DiracGraph};
pub use realize::metric_to_triple;

use ncmetric_linalg::HermitianMatrix;
use ncmetric_triple::{DistanceValue, SpectralTriple};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CommutativeError {
    #[error("Dirac diagonal entry {0} is nonzero")]
    NonZeroDiagonal(usize),
    #[error("Dirac entry ({0}, {1}) is not real")]
    NotReal(usize, usize),
    #[error("invalid number of points {0}")]
    InvalidN(usize),
    #[error("coupling constant must be nonzero")]
    ZeroCoupling,
    #[error("squared triangle inequality violated: {0}")]
    SquaredTriangle(String),
    #[error("inputs must be positive and finite")]
    NonPositive,
    #[error("metric is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("metric entry ({0}, {1}) must be zero on the diagonal and positive elsewhere")]
    BadEntry(usize, usize),
    #[error("triangle inequality violated: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    Triangle { i: usize, j: usize, k: usize },
    #[error(transparent)]
    Triple(#[from] ncmetric_triple::TripleError),
    #[error(transparent)]
    Oracle(#[from] ncmetric_oracle::OracleError),
}

pub type Result<T> = std::result::Result<T, CommutativeError>;

/// Commutative triple on ℂⁿ with real symmetric couplings.
pub fn commutative_triple(n: usize, couplings: &[(usize, usize, f64)]) -> Result<SpectralTriple> {
    let mut v = vec![0.0; n * n];
    for &(i, j, k) in couplings {
        v[i * n + j] = k;
        v[j * n + i] = k;
    }
    let d = HermitianMatrix::from_real_symmetric(n, &v).map_err(ncmetric_triple::TripleError::from)?;
    Ok(SpectralTriple::commutative(d)?)
}

/// Regular space of constant k: (1/|k|)√(2/n), or (1/|k|)√(2/(n−2)) when the link itself is cut.
pub fn regular_distance(n: usize, k: f64, cut: bool) -> Result<f64> {
    if n < 2 || (cut && n < 3) {
        return Err(CommutativeError::InvalidN(n));
    }
    if k == 0.0 || !k.is_finite() {
        return Err(CommutativeError::ZeroCoupling);
    }
    let m = if cut { n - 2 } else { n } as f64;
    Ok((2.0 / m).sqrt() / k.abs())
}

/// Regular n-point triple (every pair coupled by k), optionally with the (i, j) link cut.
pub fn regular_triple(n: usize, k: f64, cut: Option<(usize, usize)>) -> Result<SpectralTriple> {
    let mut cs = vec![];
    for i in 0..n {
        for j in i + 1..n {
            if cut != Some((i, j)) && cut != Some((j, i)) {
                cs.push((i, j, k));
            }
        }
    }
    commutative_triple(n, &cs)
}

/// d(1,2) in a three-point space.
pub fn three_point_distance(d12: f64, d13: f64, d23: f64) -> DistanceValue {
    let (a, b, c) = (d12 * d12, d13 * d13, d23 * d23);
    if b + c == 0.0 {
        // point 3 is isolated
        return if a == 0.0 { DistanceValue::infinite() } else { DistanceValue::finite(1.0 / d12.abs()) };
    }
    let den = a * b + a * c + c * b;
    if den == 0.0 {
        return DistanceValue::infinite();
    }
    DistanceValue::finite(((b + c) / den).sqrt())
}

/// Couplings (D12, D13, D23) realizing d(1,2)=a, d(1,3)=b, d(2,3)=c.
pub fn three_point_inverse(a: f64, b: f64, c: f64) -> Result<(f64, f64, f64)> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) || !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(CommutativeError::NonPositive);
    }
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let checks = [
        (b2 + c2 - a2, "d(1,3)² + d(2,3)² ≥ d(1,2)²"),
        (a2 + c2 - b2, "d(1,2)² + d(2,3)² ≥ d(1,3)²"),
        (a2 + b2 - c2, "d(1,2)² + d(1,3)² ≥ d(2,3)²"),
    ];
    let scale = a2.max(b2).max(c2);
    for (v, name) in checks {
        if v < -1e-14 * scale {
            return Err(CommutativeError::SquaredTriangle(name.to_string()));
        }
    }
    let den = (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c);
    let coupling = |num: f64| (2.0 * num.max(0.0) / den).sqrt();
    Ok((coupling(checks[0].0), coupling(checks[1].0), coupling(checks[2].0)))
}
