//! Products of finite spectral triples and the two-sheet constructions built on them.
//!
//! The assembled Dirac operator is D_E⊗I + Γ_E⊗D_I. Its Hilbert space is H_E⊗H_I
//! reordered so that every pair of factor slots becomes one contiguous product slot
//! in copy-major layout.

mod fluct;
mod reduce;
mod warp;

pub use fluct::{fluctuate, one_form_residual, ScalarFluctuation, ONE_FORM_TOL};
pub use reduce::{reduce_pair, Reduction, COMMUTATION_TOL};
pub use warp::{warped_geodesic, warped_geodesic_grid, warped_geodesic_path, GridOptions, WarpedGeodesic};

use ncmetric_linalg::{c, ComplexMatrix, HermitianMatrix, C64};
use ncmetric_oracle::{distance_numeric, OracleError, OracleOptions};
use ncmetric_triple::{
    AlgebraBlock, BlockKind, DistanceValue, FiniteAlgebra, Mode, PureState, RepresentationSlot, SpectralTriple,
    TripleError,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ProductError {
    #[error("the external triple has no grading")]
    MissingGrading,
    #[error("no tensor product for blocks {0:?} and {1:?} under modes {2:?}, {3:?}")]
    Unsupported(BlockKind, BlockKind, Mode, Mode),
    #[error("assembled Dirac operator deviates from D_E⊗I + Γ_E⊗D_I by {0:e}")]
    Assembly(f64),
    #[error("states are not a tensor pair of this product")]
    StatePair,
    #[error("support projectors are not orthogonal")]
    Overlap,
    #[error("sum of supports does not commute with D (residual {0:e})")]
    Commutation(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("perturbation is not Hermitian")]
    NotHermitian,
    #[error("perturbation is not an internal one-form (residual {0:e})")]
    NotOneForm(f64),
    #[error("warp sample {0} is not positive")]
    NonPositiveWarp(usize),
    #[error("invalid warp domain: {0}")]
    WarpDomain(&'static str),
    #[error(transparent)]
    Triple(#[from] TripleError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

pub type Result<T> = std::result::Result<T, ProductError>;

#[derive(Debug, Clone)]
pub struct ProductTriple {
    pub external: SpectralTriple,
    pub internal: SpectralTriple,
    pub assembled: SpectralTriple,
    /// Assembled block index of each pair (external block, internal block), if the pair exists.
    pub block_pairs: Vec<Vec<Option<usize>>>,
    /// Assembled basis index → index e·dim_I + i in H_E⊗H_I.
    pub permutation: Vec<usize>,
}

fn scalar_like(kind: BlockKind, mode: Mode) -> bool {
    kind == BlockKind::RealLine || mode == Mode::Scalar
}

fn tensor_block(e: AlgebraBlock, i: AlgebraBlock) -> Option<AlgebraBlock> {
    use BlockKind::*;
    Some(match (e.kind, i.kind) {
        (RealLine, _) => i,
        (_, RealLine) => e,
        (ComplexLine, ComplexLine) => AlgebraBlock::complex(),
        (ComplexLine, MatrixBlock) => i,
        (MatrixBlock, ComplexLine) => e,
        (ComplexLine, Quaternions) | (Quaternions, ComplexLine) => AlgebraBlock::matrix(2),
        (MatrixBlock, MatrixBlock) => AlgebraBlock::matrix(e.size * i.size),
        _ => return None,
    })
}

/// Mode of the product slot when `scalar` acts by a scalar and `other` by `mode`.
fn carried_mode(scalar: BlockKind, other: BlockKind, mode: Mode, result: BlockKind) -> Option<Mode> {
    if other == BlockKind::Quaternions && result == BlockKind::MatrixBlock {
        return Some(Mode::Fundamental);
    }
    match mode {
        Mode::Conjugate | Mode::ScalarConjugate if scalar != BlockKind::RealLine => None,
        m if other == BlockKind::RealLine || m == Mode::Scalar => {
            Some(if result == BlockKind::RealLine || result == BlockKind::ComplexLine { Mode::Scalar } else { m })
        }
        m => Some(m),
    }
}

fn tensor_mode(e: (BlockKind, Mode), i: (BlockKind, Mode), result: BlockKind) -> Option<Mode> {
    if scalar_like(e.0, e.1) {
        carried_mode(e.0, i.0, i.1, result)
    } else if scalar_like(i.0, i.1) {
        carried_mode(i.0, e.0, e.1, result)
    } else if e.1 == Mode::Fundamental && i.1 == Mode::Fundamental {
        Some(Mode::Fundamental)
    } else {
        None
    }
}

fn permute(m: &ComplexMatrix, perm: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(perm.len(), perm.len(), |a, b| m.get(perm[a], perm[b])).expect("finite entries")
}

/// The product triple (A_E⊗A_I, H_E⊗H_I, D_E⊗I + Γ_E⊗D_I).
pub fn tensor_product_triple(external: &SpectralTriple, internal: &SpectralTriple) -> Result<ProductTriple> {
    let gamma = external.grading.as_ref().ok_or(ProductError::MissingGrading)?;
    let (ae, ai) = (&external.algebra.blocks, &internal.algebra.blocks);
    let mut blocks = vec![];
    let mut block_pairs = vec![vec![None; ai.len()]; ae.len()];
    for (p, be) in ae.iter().enumerate() {
        for (q, bi) in ai.iter().enumerate() {
            if let Some(b) = tensor_block(*be, *bi) {
                block_pairs[p][q] = Some(blocks.len());
                blocks.push(b);
            }
        }
    }
    let ni = internal.dim();
    let (off_e, off_i) = (external.slot_offsets(), internal.slot_offsets());
    let mut slots = vec![];
    let mut perm = vec![];
    for (se, oe) in external.slots.iter().zip(&off_e) {
        for (si, oi) in internal.slots.iter().zip(&off_i) {
            let (be, bi) = (ae[se.block_index], ai[si.block_index]);
            let unsupported = || ProductError::Unsupported(be.kind, bi.kind, se.mode, si.mode);
            let k = block_pairs[se.block_index][si.block_index].ok_or_else(unsupported)?;
            let mode = tensor_mode((be.kind, se.mode), (bi.kind, si.mode), blocks[k].kind).ok_or_else(unsupported)?;
            slots.push(RepresentationSlot::new(k, mode, se.multiplicity * si.multiplicity));
            let (de, di) = (be.action_dim(), bi.action_dim());
            for ce in 0..se.multiplicity {
                for ci in 0..si.multiplicity {
                    for r in 0..de {
                        for s in 0..di {
                            perm.push((oe + ce * de + r) * ni + oi + ci * di + s);
                        }
                    }
                }
            }
        }
    }
    let de = external.dirac.to_complex();
    let di = internal.dirac.to_complex();
    let g = ComplexMatrix::real_diagonal(gamma);
    let kron = de.kron(&ComplexMatrix::identity(ni)).add(&g.kron(&di)).map_err(TripleError::from)?;
    let dirac = permute(&kron, &perm);
    let mut residual = 0.0f64;
    for a in 0..perm.len() {
        for b in 0..perm.len() {
            let (ea, ia, eb, ib) = (perm[a] / ni, perm[a] % ni, perm[b] / ni, perm[b] % ni);
            let mut want = c(0.0, 0.0);
            if ia == ib {
                want += de.get(ea, eb);
            }
            if ea == eb {
                want += di.get(ia, ib) * gamma[ea];
            }
            residual = residual.max((dirac.get(a, b) - want).norm());
        }
    }
    if residual > 1e-12 * (1.0 + kron.max_abs()) {
        return Err(ProductError::Assembly(residual));
    }
    let grading = internal.grading.as_ref().map(|gi| perm.iter().map(|&o| gamma[o / ni] * gi[o % ni]).collect());
    let assembled = SpectralTriple::new(
        FiniteAlgebra::new(blocks)?,
        slots,
        HermitianMatrix::new(dirac).map_err(TripleError::from)?,
        grading,
    )?;
    Ok(ProductTriple {
        external: external.clone(),
        internal: internal.clone(),
        assembled,
        block_pairs,
        permutation: perm,
    })
}

fn state_vector(s: &PureState) -> Vec<C64> {
    s.vector.clone().unwrap_or_else(|| vec![c(1.0, 0.0)])
}

impl ProductTriple {
    /// τ_E⊗τ_I as a pure state of the assembled algebra.
    pub fn product_state(&self, e: &PureState, i: &PureState) -> Result<PureState> {
        e.validate(&self.external.algebra)?;
        i.validate(&self.internal.algebra)?;
        let k = self
            .block_pairs
            .get(e.block_index)
            .and_then(|r| r.get(i.block_index).copied().flatten())
            .ok_or(ProductError::StatePair)?;
        let be = self.external.algebra.blocks[e.block_index].kind;
        let bi = self.internal.algebra.blocks[i.block_index].kind;
        if self.assembled.algebra.blocks[k].kind != BlockKind::MatrixBlock {
            return Ok(PureState::canonical(k));
        }
        use BlockKind::*;
        let v = match (be, bi) {
            (MatrixBlock, MatrixBlock) => {
                let (x, y) = (state_vector(e), state_vector(i));
                x.iter().flat_map(|a| y.iter().map(move |b| a * b)).collect()
            }
            (MatrixBlock, _) => state_vector(e),
            (_, MatrixBlock) => state_vector(i),
            // ℂ⊗ℍ ≅ M₂(ℂ); the quaternionic state reads the (1,1) entry.
            _ => vec![c(1.0, 0.0), c(0.0, 0.0)],
        };
        Ok(PureState::vector(k, v)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorDirection {
    /// External state fixed, internal states vary.
    Internal,
    /// Internal state fixed, external states vary.
    External,
}

#[derive(Debug, Clone)]
pub struct FactorEntry {
    pub assembled: DistanceValue,
    pub factor: DistanceValue,
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct FactorReport {
    pub entries: Vec<FactorEntry>,
    pub max_deviation: f64,
}

fn deviation(a: &DistanceValue, b: &DistanceValue) -> f64 {
    match (a.is_infinite(), b.is_infinite()) {
        (true, true) => 0.0,
        (false, false) => (a.value - b.value).abs() / b.value.max(1.0),
        _ => f64::INFINITY,
    }
}

/// Distances on the assembled triple between fixed⊗s₁ and fixed⊗s₂ (or s₁⊗fixed, s₂⊗fixed)
/// against the distance of the varying factor alone.
pub fn factor_distance_check(
    product: &ProductTriple,
    direction: FactorDirection,
    fixed: &PureState,
    pairs: &[(PureState, PureState)],
    opts: &OracleOptions,
) -> Result<FactorReport> {
    let mut entries = vec![];
    for (s1, s2) in pairs {
        let (p1, p2, factor) = match direction {
            FactorDirection::Internal => {
                (product.product_state(fixed, s1)?, product.product_state(fixed, s2)?, &product.internal)
            }
            FactorDirection::External => {
                (product.product_state(s1, fixed)?, product.product_state(s2, fixed)?, &product.external)
            }
        };
        let assembled = distance_numeric(&product.assembled, &p1, &p2, opts)?;
        let factor = distance_numeric(factor, s1, s2, opts)?;
        let deviation = deviation(&assembled, &factor);
        entries.push(FactorEntry { assembled, factor, deviation });
    }
    let max_deviation = entries.iter().map(|e| e.deviation).fold(0.0, f64::max);
    Ok(FactorReport { entries, max_deviation })
}

/// √(d_E² + d_I²).
pub fn pythagoras_cross(de: f64, di: f64) -> f64 {
    de.hypot(di)
}

#[derive(Debug, Clone)]
pub struct PythagorasReport {
    pub cross: DistanceValue,
    pub external: DistanceValue,
    pub internal: DistanceValue,
    /// Assembled cross distance minus √(d_E² + d_I²).
    pub deviation: f64,
}

/// Compares d(e⊗ω₁, e′⊗ω₂) on the assembled triple with the Pythagorean combination.
/// On a finite external factor this is an empirical comparison, not an identity.
pub fn pythagoras_check(
    product: &ProductTriple,
    e: (&PureState, &PureState),
    i: (&PureState, &PureState),
    opts: &OracleOptions,
) -> Result<PythagorasReport> {
    let a = product.product_state(e.0, i.0)?;
    let b = product.product_state(e.1, i.1)?;
    let cross = distance_numeric(&product.assembled, &a, &b, opts)?;
    let external = distance_numeric(&product.external, e.0, e.1, opts)?;
    let internal = distance_numeric(&product.internal, i.0, i.1, opts)?;
    let deviation = if cross.is_infinite() || external.is_infinite() || internal.is_infinite() {
        f64::NAN
    } else {
        cross.value - pythagoras_cross(external.value, internal.value)
    };
    Ok(PythagorasReport { cross, external, internal, deviation })
}
