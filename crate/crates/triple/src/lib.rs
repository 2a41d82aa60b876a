//! Finite spectral triples.
//!
//! An algebra is a direct sum of blocks (ℝ, ℂ, ℍ, Mₙ(ℂ)). The Hilbert space is a
//! concatenation of representation slots; a slot with multiplicity m carries
//! `I_m ⊗ ρ(a)` where ρ is the block action selected by the slot mode.

mod algebra;
mod kernel;

pub use algebra::{quaternion_matrix, AlgebraBlock, AlgebraElement, BlockElement, BlockKind, FiniteAlgebra, Field};
pub use kernel::{commutant_kernel_test, CommutatorMap, KernelVerdict, KERNEL_TOL};

use ncmetric_linalg::{block_diagonal, commutator, re, ComplexMatrix, HermitianMatrix, LinalgError, C64};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum TripleError {
    #[error("algebra has no blocks")]
    EmptyAlgebra,
    #[error("invalid block size")]
    BadBlockSize,
    #[error("slot {slot}: mode {mode:?} is incompatible with block kind {kind:?}")]
    IncompatibleMode { slot: usize, mode: Mode, kind: BlockKind },
    #[error("slot {0} refers to missing block {1}")]
    MissingBlock(usize, usize),
    #[error("slot {0} has zero multiplicity")]
    ZeroMultiplicity(usize),
    #[error("representation dimension {rep} does not match Dirac dimension {dirac}")]
    DimensionMismatch { rep: usize, dirac: usize },
    #[error("grading must be a ±1 diagonal of length {0}")]
    BadGrading(usize),
    #[error("grading does not commute with the representation (residual {0:e})")]
    GradingCommutation(f64),
    #[error("grading does not anticommute with the Dirac operator (residual {0:e})")]
    GradingAnticommutation(f64),
    #[error("element shape does not match the algebra")]
    ElementShape,
    #[error("state refers to missing block {0}")]
    StateBlock(usize),
    #[error("state vector has length {got}, expected {want}")]
    StateLength { got: usize, want: usize },
    #[error("state vector norm {0} is not 1")]
    StateNorm(f64),
    #[error("block {0} needs a state vector")]
    StateVectorMissing(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, TripleError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fundamental,
    Conjugate,
    Scalar,
    ScalarConjugate,
    Quaternion2x2,
}

impl Mode {
    fn compatible(self, kind: BlockKind) -> bool {
        match self {
            Mode::Fundamental | Mode::Conjugate => kind == BlockKind::MatrixBlock,
            Mode::Quaternion2x2 => kind == BlockKind::Quaternions,
            Mode::Scalar | Mode::ScalarConjugate => matches!(kind, BlockKind::RealLine | BlockKind::ComplexLine),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepresentationSlot {
    pub block_index: usize,
    pub mode: Mode,
    pub multiplicity: usize,
}

impl RepresentationSlot {
    pub fn new(block_index: usize, mode: Mode, multiplicity: usize) -> Self {
        Self { block_index, mode, multiplicity }
    }
}

/// Tolerance for the grading checks.
pub const GRADING_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SpectralTriple {
    pub algebra: FiniteAlgebra,
    pub slots: Vec<RepresentationSlot>,
    pub dirac: HermitianMatrix,
    pub grading: Option<Vec<f64>>,
    /// ℂ blocks are read as real algebras (state = real part).
    pub real_form: bool,
}

impl SpectralTriple {
    pub fn new(
        algebra: FiniteAlgebra,
        slots: Vec<RepresentationSlot>,
        dirac: HermitianMatrix,
        grading: Option<Vec<f64>>,
    ) -> Result<Self> {
        let mut dim = 0;
        for (i, s) in slots.iter().enumerate() {
            let b = algebra.blocks.get(s.block_index).ok_or(TripleError::MissingBlock(i, s.block_index))?;
            if !s.mode.compatible(b.kind) {
                return Err(TripleError::IncompatibleMode { slot: i, mode: s.mode, kind: b.kind });
            }
            if s.multiplicity == 0 {
                return Err(TripleError::ZeroMultiplicity(i));
            }
            dim += b.action_dim() * s.multiplicity;
        }
        if dim != dirac.dim() {
            return Err(TripleError::DimensionMismatch { rep: dim, dirac: dirac.dim() });
        }
        let real_form = slots.iter().any(|s| matches!(s.mode, Mode::Conjugate | Mode::ScalarConjugate));
        let t = Self { algebra, slots, dirac, grading, real_form };
        if let Some(g) = &t.grading {
            t.check_grading(g)?;
        }
        Ok(t)
    }

    /// ℂⁿ acting diagonally on ℂⁿ.
    pub fn commutative(dirac: HermitianMatrix) -> Result<Self> {
        let n = dirac.dim();
        let algebra = FiniteAlgebra::new(vec![AlgebraBlock::complex(); n])?;
        let slots = (0..n).map(|k| RepresentationSlot::new(k, Mode::Scalar, 1)).collect();
        Self::new(algebra, slots, dirac, None)
    }

    /// Mₙ(ℂ) acting on ℂⁿ.
    pub fn matrix_geometry(dirac: HermitianMatrix) -> Result<Self> {
        let n = dirac.dim();
        let algebra = FiniteAlgebra::new(vec![AlgebraBlock::matrix(n)])?;
        Self::new(algebra, vec![RepresentationSlot::new(0, Mode::Fundamental, 1)], dirac, None)
    }

    pub fn dim(&self) -> usize {
        self.dirac.dim()
    }

    /// Starting offset of every slot in the Hilbert space.
    pub fn slot_offsets(&self) -> Vec<usize> {
        let mut off = 0;
        self.slots
            .iter()
            .map(|s| {
                let o = off;
                off += self.algebra.blocks[s.block_index].action_dim() * s.multiplicity;
                o
            })
            .collect()
    }

    pub fn with_dirac(&self, dirac: HermitianMatrix) -> Result<Self> {
        Self::new(self.algebra.clone(), self.slots.clone(), dirac, self.grading.clone())
    }

    fn check_grading(&self, g: &[f64]) -> Result<()> {
        let n = self.dim();
        if g.len() != n || g.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(TripleError::BadGrading(n));
        }
        let gm = ComplexMatrix::real_diagonal(g);
        for b in self.algebra.full_basis() {
            let a = represent(&b, self)?;
            let r = gm.mul(&a)?.sub(&a.mul(&gm)?)?.max_abs();
            if r > GRADING_TOL {
                return Err(TripleError::GradingCommutation(r));
            }
        }
        let d = self.dirac.to_complex();
        let r = gm.mul(&d)?.add(&d.mul(&gm)?)?.max_abs();
        if r > GRADING_TOL * d.max_abs().max(1.0) {
            return Err(TripleError::GradingAnticommutation(r));
        }
        Ok(())
    }

    /// State value respecting `real_form`; complex-algebra ℂ blocks return b itself.
    pub fn evaluate(&self, s: &PureState, a: &AlgebraElement) -> C64 {
        match (&a.blocks[s.block_index], self.real_form) {
            (BlockElement::Complex(z), false) => *z,
            _ => evaluate_state(s, a),
        }
    }

    /// ‖[D, π(a)]‖.
    pub fn commutator_norm(&self, a: &AlgebraElement) -> Result<f64> {
        Ok(ncmetric_linalg::operator_norm(&commutator(&self.dirac, &represent(a, self)?)?))
    }
}

fn block_action(e: &BlockElement, mode: Mode) -> ComplexMatrix {
    match (e, mode) {
        (BlockElement::Matrix(m), Mode::Fundamental) => m.clone(),
        (BlockElement::Matrix(m), Mode::Conjugate) => m.conj(),
        (BlockElement::Complex(z), Mode::Scalar) => ComplexMatrix::diagonal(&[*z]),
        (BlockElement::Complex(z), Mode::ScalarConjugate) => ComplexMatrix::diagonal(&[z.conj()]),
        (BlockElement::Real(r), _) => ComplexMatrix::diagonal(&[re(*r)]),
        (BlockElement::Quaternion(q), _) => quaternion_matrix(*q),
        _ => unreachable!("mode compatibility is checked at construction"),
    }
}

/// π(a), assembled slot by slot.
pub fn represent(a: &AlgebraElement, triple: &SpectralTriple) -> Result<ComplexMatrix> {
    if !a.matches(&triple.algebra) {
        return Err(TripleError::ElementShape);
    }
    let mut parts = vec![];
    for s in &triple.slots {
        let blk = block_action(&a.blocks[s.block_index], s.mode);
        parts.push(ComplexMatrix::identity(s.multiplicity).kron(&blk));
    }
    Ok(block_diagonal(&parts))
}

/// A pure state of one block: a unit vector for Mₙ, the canonical state otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    pub block_index: usize,
    pub vector: Option<Vec<C64>>,
}

impl PureState {
    pub fn canonical(block_index: usize) -> Self {
        Self { block_index, vector: None }
    }

    pub fn vector(block_index: usize, v: Vec<C64>) -> Result<Self> {
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(TripleError::StateNorm(n));
        }
        Ok(Self { block_index, vector: Some(v) })
    }

    /// Normalizes a nonzero vector first.
    pub fn normalized(block_index: usize, v: Vec<C64>) -> Result<Self> {
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(TripleError::StateNorm(n));
        }
        Self::vector(block_index, v.into_iter().map(|z| z / n).collect())
    }

    pub fn validate(&self, alg: &FiniteAlgebra) -> Result<()> {
        let b = alg.blocks.get(self.block_index).ok_or(TripleError::StateBlock(self.block_index))?;
        match (b.kind, &self.vector) {
            (BlockKind::MatrixBlock, None) if b.size > 1 => Err(TripleError::StateVectorMissing(self.block_index)),
            (BlockKind::MatrixBlock, Some(v)) if v.len() != b.size => {
                Err(TripleError::StateLength { got: v.len(), want: b.size })
            }
            (BlockKind::MatrixBlock, _) => Ok(()),
            (_, Some(_)) => Err(TripleError::StateLength { got: 1, want: 0 }),
            _ => Ok(()),
        }
    }
}

/// ⟨ξ, aξ⟩ on a matrix block, Re(b) on ℂ, α on ℍ, r on ℝ.
pub fn evaluate_state(s: &PureState, a: &AlgebraElement) -> C64 {
    match &a.blocks[s.block_index] {
        BlockElement::Real(r) => re(*r),
        BlockElement::Complex(z) => re(z.re),
        BlockElement::Quaternion(q) => re(q[0]),
        BlockElement::Matrix(m) => match &s.vector {
            Some(v) => {
                let mut acc = re(0.0);
                for i in 0..v.len() {
                    for j in 0..v.len() {
                        acc += v[i].conj() * m.get(i, j) * v[j];
                    }
                }
                acc
            }
            None => m.get(0, 0),
        },
    }
}

/// Non-negative extended real with an optional optimizing element.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceValue {
    pub value: f64,
    pub witness: Option<AlgebraElement>,
}

impl DistanceValue {
    pub fn finite(value: f64) -> Self {
        assert!(value >= 0.0 && value.is_finite(), "distance must be finite and non-negative");
        Self { value, witness: None }
    }

    pub fn with_witness(value: f64, witness: AlgebraElement) -> Self {
        let mut d = Self::finite(value);
        d.witness = Some(witness);
        d
    }

    pub fn infinite() -> Self {
        Self { value: f64::INFINITY, witness: None }
    }

    /// +∞ when `value` is infinite, finite otherwise.
    pub fn from_value(value: f64) -> Self {
        if value.is_infinite() {
            Self::infinite()
        } else {
            Self::finite(value)
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

/// π(b) for every element of the self-adjoint basis.
pub fn self_adjoint_basis(triple: &SpectralTriple) -> Vec<ComplexMatrix> {
    triple
        .algebra
        .self_adjoint_basis()
        .iter()
        .map(|b| represent(b, triple).expect("basis matches algebra"))
        .collect()
}
