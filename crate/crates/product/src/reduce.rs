use crate::{ProductError, Result};
use ncmetric_linalg::{c, operator_norm, ComplexMatrix};
use ncmetric_triple::{represent, BlockElement, BlockKind, DistanceValue, PureState, SpectralTriple};

/// Allowed ‖[D, π(p₁+p₂)]‖, relative to max(1, max|D_ij|).
pub const COMMUTATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Reduction {
    /// ‖π(p₁) D π(p₂)‖, the coupling between the two supports.
    pub coupling_norm: f64,
    pub distance: DistanceValue,
    /// ‖[D, π(p₁+p₂)]‖.
    pub residual: f64,
}

/// Support projector of a pure state, represented on H.
fn support(triple: &SpectralTriple, s: &PureState) -> Result<ComplexMatrix> {
    s.validate(&triple.algebra)?;
    let block = &triple.algebra.blocks[s.block_index];
    let e = match block.kind {
        BlockKind::RealLine => BlockElement::Real(1.0),
        BlockKind::ComplexLine => BlockElement::Complex(c(1.0, 0.0)),
        BlockKind::Quaternions => BlockElement::Quaternion([1.0, 0.0, 0.0, 0.0]),
        BlockKind::MatrixBlock => {
            let v = s.vector.clone().unwrap_or_else(|| vec![c(1.0, 0.0)]);
            let n = v.len();
            BlockElement::Matrix(ComplexMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()).expect("unit vector"))
        }
    };
    Ok(represent(&triple.algebra.embed(s.block_index, e), triple)?)
}

/// Reduces a pair of pure states with commuting support sum to a two-point space:
/// d = 1/‖M‖ with M the block of D between the supports.
pub fn reduce_pair(triple: &SpectralTriple, s1: &PureState, s2: &PureState) -> Result<Reduction> {
    let p1 = support(triple, s1)?;
    let p2 = support(triple, s2)?;
    if p1.mul(&p2).map_err(ncmetric_triple::TripleError::from)?.max_abs() > 1e-12 {
        return Err(ProductError::Overlap);
    }
    let d = triple.dirac.to_complex();
    let sum = p1.add(&p2).map_err(ncmetric_triple::TripleError::from)?;
    let comm = ncmetric_linalg::commutator(&triple.dirac, &sum).map_err(ncmetric_triple::TripleError::from)?;
    let residual = operator_norm(&comm);
    let scale = d.max_abs().max(1.0);
    if residual > COMMUTATION_TOL * scale {
        return Err(ProductError::Commutation(residual));
    }
    let m = p1.mul(&d).and_then(|x| x.mul(&p2)).map_err(ncmetric_triple::TripleError::from)?;
    let coupling_norm = operator_norm(&m);
    let distance = if coupling_norm <= 1e-12 * scale {
        DistanceValue::infinite()
    } else {
        DistanceValue::finite(1.0 / coupling_norm)
    };
    Ok(Reduction { coupling_norm, distance, residual })
}
