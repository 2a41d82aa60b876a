use ncmetric_linalg::{c, re, ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    RealLine,
    ComplexLine,
    Quaternions,
    MatrixBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
    Quaternion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlgebraBlock {
    pub kind: BlockKind,
    pub size: usize,
    pub field: Field,
}

impl AlgebraBlock {
    pub fn real() -> Self {
        Self { kind: BlockKind::RealLine, size: 1, field: Field::Real }
    }
    pub fn complex() -> Self {
        Self { kind: BlockKind::ComplexLine, size: 1, field: Field::Complex }
    }
    pub fn quaternions() -> Self {
        Self { kind: BlockKind::Quaternions, size: 1, field: Field::Quaternion }
    }
    pub fn matrix(n: usize) -> Self {
        Self { kind: BlockKind::MatrixBlock, size: n, field: Field::Complex }
    }

    /// Dimension of the complex space one copy of the block acts on.
    pub fn action_dim(&self) -> usize {
        match self.kind {
            BlockKind::MatrixBlock => self.size,
            BlockKind::Quaternions => 2,
            _ => 1,
        }
    }

    pub fn real_dim(&self) -> usize {
        match self.kind {
            BlockKind::RealLine => 1,
            BlockKind::ComplexLine => 2,
            BlockKind::Quaternions => 4,
            BlockKind::MatrixBlock => 2 * self.size * self.size,
        }
    }

    /// Real dimension of the self-adjoint part.
    pub fn self_adjoint_dim(&self) -> usize {
        match self.kind {
            BlockKind::MatrixBlock => self.size * self.size,
            _ => 1,
        }
    }

    pub fn identity(&self) -> BlockElement {
        match self.kind {
            BlockKind::RealLine => BlockElement::Real(1.0),
            BlockKind::ComplexLine => BlockElement::Complex(re(1.0)),
            BlockKind::Quaternions => BlockElement::Quaternion([1.0, 0.0, 0.0, 0.0]),
            BlockKind::MatrixBlock => BlockElement::Matrix(ComplexMatrix::identity(self.size)),
        }
    }

    pub fn zero(&self) -> BlockElement {
        match self.kind {
            BlockKind::RealLine => BlockElement::Real(0.0),
            BlockKind::ComplexLine => BlockElement::Complex(re(0.0)),
            BlockKind::Quaternions => BlockElement::Quaternion([0.0; 4]),
            BlockKind::MatrixBlock => BlockElement::Matrix(ComplexMatrix::zeros(self.size, self.size)),
        }
    }

    /// Orthonormal real basis of the self-adjoint part.
    pub fn self_adjoint_basis(&self) -> Vec<BlockElement> {
        match self.kind {
            BlockKind::MatrixBlock => {
                let n = self.size;
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let mut out = vec![];
                for i in 0..n {
                    out.push(unit(n, &[(i, i, re(1.0))]));
                }
                for i in 0..n {
                    for j in i + 1..n {
                        out.push(unit(n, &[(i, j, re(s)), (j, i, re(s))]));
                        out.push(unit(n, &[(i, j, c(0.0, s)), (j, i, c(0.0, -s))]));
                    }
                }
                out
            }
            _ => vec![self.identity()],
        }
    }

    /// Real basis of the whole block (used for commutation checks).
    pub fn full_basis(&self) -> Vec<BlockElement> {
        match self.kind {
            BlockKind::RealLine => vec![BlockElement::Real(1.0)],
            BlockKind::ComplexLine => vec![BlockElement::Complex(re(1.0)), BlockElement::Complex(c(0.0, 1.0))],
            BlockKind::Quaternions => (0..4)
                .map(|k| {
                    let mut q = [0.0; 4];
                    q[k] = 1.0;
                    BlockElement::Quaternion(q)
                })
                .collect(),
            BlockKind::MatrixBlock => {
                let n = self.size;
                let mut out = vec![];
                for i in 0..n {
                    for j in 0..n {
                        out.push(unit(n, &[(i, j, re(1.0))]));
                        out.push(unit(n, &[(i, j, c(0.0, 1.0))]));
                    }
                }
                out
            }
        }
    }
}

fn unit(n: usize, entries: &[(usize, usize, C64)]) -> BlockElement {
    let mut v = vec![re(0.0); n * n];
    for &(i, j, z) in entries {
        v[i * n + j] = z;
    }
    BlockElement::Matrix(ComplexMatrix::new(n, n, v).expect("finite entries"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteAlgebra {
    pub blocks: Vec<AlgebraBlock>,
}

impl FiniteAlgebra {
    pub fn new(blocks: Vec<AlgebraBlock>) -> Result<Self, crate::TripleError> {
        if blocks.is_empty() {
            return Err(crate::TripleError::EmptyAlgebra);
        }
        if blocks.iter().any(|b| b.size == 0 || (b.kind != BlockKind::MatrixBlock && b.size != 1)) {
            return Err(crate::TripleError::BadBlockSize);
        }
        Ok(Self { blocks })
    }

    pub fn real_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.real_dim()).sum()
    }

    pub fn identity(&self) -> AlgebraElement {
        AlgebraElement { blocks: self.blocks.iter().map(|b| b.identity()).collect() }
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement { blocks: self.blocks.iter().map(|b| b.zero()).collect() }
    }

    /// Element that is `e` on block `k` and zero elsewhere.
    pub fn embed(&self, k: usize, e: BlockElement) -> AlgebraElement {
        let mut z = self.zero();
        z.blocks[k] = e;
        z
    }

    /// Concatenated orthonormal bases of the self-adjoint parts of every block.
    pub fn self_adjoint_basis(&self) -> Vec<AlgebraElement> {
        let mut out = vec![];
        for (k, b) in self.blocks.iter().enumerate() {
            for e in b.self_adjoint_basis() {
                out.push(self.embed(k, e));
            }
        }
        out
    }

    pub fn full_basis(&self) -> Vec<AlgebraElement> {
        let mut out = vec![];
        for (k, b) in self.blocks.iter().enumerate() {
            for e in b.full_basis() {
                out.push(self.embed(k, e));
            }
        }
        out
    }
}

/// One block's component of an algebra element. Quaternions are α + βi + γj + δk.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockElement {
    Real(f64),
    Complex(C64),
    Quaternion([f64; 4]),
    Matrix(ComplexMatrix),
}

/// [[x, -ȳ], [y, x̄]] with x = α + iβ, y = γ + iδ.
pub fn quaternion_matrix(q: [f64; 4]) -> ComplexMatrix {
    let x = c(q[0], q[1]);
    let y = c(q[2], q[3]);
    ComplexMatrix::new(2, 2, vec![x, -y.conj(), y, x.conj()]).expect("finite quaternion")
}

fn quaternion_from_matrix(m: &ComplexMatrix) -> [f64; 4] {
    let x = m.get(0, 0);
    let y = m.get(1, 0);
    [x.re, x.im, y.re, y.im]
}

impl BlockElement {
    pub fn scale(&self, s: f64) -> Self {
        match self {
            Self::Real(r) => Self::Real(r * s),
            Self::Complex(z) => Self::Complex(z * s),
            Self::Quaternion(q) => Self::Quaternion(q.map(|v| v * s)),
            Self::Matrix(m) => Self::Matrix(m.scale(re(s))),
        }
    }

    pub fn add(&self, o: &Self) -> Option<Self> {
        Some(match (self, o) {
            (Self::Real(a), Self::Real(b)) => Self::Real(a + b),
            (Self::Complex(a), Self::Complex(b)) => Self::Complex(a + b),
            (Self::Quaternion(a), Self::Quaternion(b)) => Self::Quaternion([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]),
            (Self::Matrix(a), Self::Matrix(b)) => Self::Matrix(a.add(b).ok()?),
            _ => return None,
        })
    }

    pub fn mul(&self, o: &Self) -> Option<Self> {
        Some(match (self, o) {
            (Self::Real(a), Self::Real(b)) => Self::Real(a * b),
            (Self::Complex(a), Self::Complex(b)) => Self::Complex(a * b),
            (Self::Quaternion(a), Self::Quaternion(b)) => {
                Self::Quaternion(quaternion_from_matrix(&quaternion_matrix(*a).mul(&quaternion_matrix(*b)).ok()?))
            }
            (Self::Matrix(a), Self::Matrix(b)) => Self::Matrix(a.mul(b).ok()?),
            _ => return None,
        })
    }

    pub fn adjoint(&self) -> Self {
        match self {
            Self::Real(r) => Self::Real(*r),
            Self::Complex(z) => Self::Complex(z.conj()),
            Self::Quaternion(q) => Self::Quaternion([q[0], -q[1], -q[2], -q[3]]),
            Self::Matrix(m) => Self::Matrix(m.adjoint()),
        }
    }

    fn matches(&self, b: &AlgebraBlock) -> bool {
        match (self, b.kind) {
            (Self::Real(_), BlockKind::RealLine) => true,
            (Self::Complex(_), BlockKind::ComplexLine) => true,
            (Self::Quaternion(_), BlockKind::Quaternions) => true,
            (Self::Matrix(m), BlockKind::MatrixBlock) => m.rows() == b.size && m.cols() == b.size,
            _ => false,
        }
    }
}

/// Block-wise coordinates of an algebra element.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub blocks: Vec<BlockElement>,
}

impl AlgebraElement {
    pub fn scale(&self, s: f64) -> Self {
        Self { blocks: self.blocks.iter().map(|b| b.scale(s)).collect() }
    }

    pub fn add(&self, o: &Self) -> Option<Self> {
        if self.blocks.len() != o.blocks.len() {
            return None;
        }
        Some(Self { blocks: self.blocks.iter().zip(&o.blocks).map(|(a, b)| a.add(b)).collect::<Option<_>>()? })
    }

    pub fn mul(&self, o: &Self) -> Option<Self> {
        if self.blocks.len() != o.blocks.len() {
            return None;
        }
        Some(Self { blocks: self.blocks.iter().zip(&o.blocks).map(|(a, b)| a.mul(b)).collect::<Option<_>>()? })
    }

    pub fn adjoint(&self) -> Self {
        Self { blocks: self.blocks.iter().map(|b| b.adjoint()).collect() }
    }

    /// Σ v_k basis_k.
    pub fn combination(basis: &[AlgebraElement], v: &[f64]) -> Option<Self> {
        let mut it = basis.iter().zip(v);
        let (b0, v0) = it.next()?;
        let mut acc = b0.scale(*v0);
        for (b, vk) in it {
            acc = acc.add(&b.scale(*vk))?;
        }
        Some(acc)
    }

    pub fn matches(&self, alg: &FiniteAlgebra) -> bool {
        self.blocks.len() == alg.blocks.len() && self.blocks.iter().zip(&alg.blocks).all(|(e, b)| e.matches(b))
    }
}
