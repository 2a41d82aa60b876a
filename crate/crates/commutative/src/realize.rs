use crate::{CommutativeError, Result};
use ncmetric_linalg::{block_diagonal, ComplexMatrix, HermitianMatrix};
use ncmetric_triple::{AlgebraBlock, FiniteAlgebra, Mode, RepresentationSlot, SpectralTriple};

fn validate(dist: &[Vec<f64>]) -> Result<()> {
    let n = dist.len();
    for (i, row) in dist.iter().enumerate() {
        if row.len() != n {
            return Err(CommutativeError::InvalidN(row.len()));
        }
        for (j, &v) in row.iter().enumerate() {
            if v != dist[j][i] {
                return Err(CommutativeError::Asymmetric(i, j));
            }
            let ok = if i == j { v == 0.0 } else { v > 0.0 && !v.is_nan() };
            if !ok {
                return Err(CommutativeError::BadEntry(i, j));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (a, b, c) = (dist[i][k], dist[i][j], dist[j][k]);
                if a > (b + c) * (1.0 + 1e-12) {
                    return Err(CommutativeError::Triangle { i, j, k });
                }
            }
        }
    }
    Ok(())
}

/// One three-dimensional slot per pair (i, j), carrying diag(a_i, a_j, a_j) and the
/// Dirac block with off-diagonal entries 1/d_ij (zero when d_ij = ∞). Then
/// ‖[D, π(a)]‖ = max |a_i − a_j| / d_ij and the triple's distances reproduce `dist`.
pub fn metric_to_triple(dist: &[Vec<f64>]) -> Result<SpectralTriple> {
    validate(dist)?;
    let n = dist.len();
    if n < 2 {
        return Err(CommutativeError::InvalidN(n));
    }
    let algebra = FiniteAlgebra::new(vec![AlgebraBlock::complex(); n])?;
    let mut slots = vec![];
    let mut blocks = vec![];
    for i in 0..n {
        for j in i + 1..n {
            slots.push(RepresentationSlot::new(i, Mode::Scalar, 1));
            slots.push(RepresentationSlot::new(j, Mode::Scalar, 2));
            let k = if dist[i][j].is_infinite() { 0.0 } else { 1.0 / dist[i][j] };
            blocks.push(ComplexMatrix::from_real(3, 3, &[0.0, k, 0.0, k, 0.0, k, 0.0, k, 0.0]).expect("finite"));
        }
    }
    let d = HermitianMatrix::new(block_diagonal(&blocks)).map_err(ncmetric_triple::TripleError::from)?;
    Ok(SpectralTriple::new(algebra, slots, d, None)?)
}
