//! Mass sector of the standard-model internal triple.
//!
//! The algebra is ℂ ⊕ ℍ ⊕ M₃(ℂ). Per generation the particle space holds the
//! left-handed quark doublets (3 colors), the lepton doublet, and the right-handed
//! u, d (3 colors each) and e; there is no right-handed neutrino. The antiparticle
//! space mirrors it with conjugated Dirac blocks. The Higgs doublet (h₁, h₂) enters
//! as the quaternion q = [[1+h₁, −h̄₂], [h₂, 1+h̄₁]] acting on isospin, so the
//! left-right coupling becomes ΦM and ‖ΦM‖² = (|1+h₁|²+|h₂|²)‖M‖².

use ncmetric_linalg::{c, operator_norm, ComplexMatrix, HermitianMatrix, C64};
use ncmetric_triple::{
    commutant_kernel_test, AlgebraBlock, DistanceValue, FiniteAlgebra, KernelVerdict, Mode, PureState,
    RepresentationSlot, SpectralTriple, TripleError,
};

pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SmError {
    #[error("mass lists must have the same nonzero length (got {0}, {1}, {2})")]
    Generations(usize, usize, usize),
    #[error("{0} mass {1} is not positive")]
    NonPositiveMass(&'static str, f64),
    #[error("CKM matrix must be {0}×{0}")]
    CkmShape(usize),
    #[error("CKM matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("Higgs components must be finite")]
    NonFinite,
    #[error(transparent)]
    Triple(#[from] TripleError),
}

pub type Result<T> = std::result::Result<T, SmError>;

#[derive(Debug, Clone, PartialEq)]
pub struct FermionMasses {
    /// m_u, m_c, m_t, ...
    pub up: Vec<f64>,
    /// m_d, m_s, m_b, ...
    pub down: Vec<f64>,
    /// m_e, m_μ, m_τ, ...
    pub lepton: Vec<f64>,
    pub ckm: ComplexMatrix,
}

impl FermionMasses {
    pub fn new(up: Vec<f64>, down: Vec<f64>, lepton: Vec<f64>, ckm: ComplexMatrix) -> Result<Self> {
        let n = up.len();
        if n == 0 || down.len() != n || lepton.len() != n {
            return Err(SmError::Generations(up.len(), down.len(), lepton.len()));
        }
        for (name, list) in [("up-type", &up), ("down-type", &down), ("lepton", &lepton)] {
            if let Some(&m) = list.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
                return Err(SmError::NonPositiveMass(name, m));
            }
        }
        if ckm.rows() != n || ckm.cols() != n {
            return Err(SmError::CkmShape(n));
        }
        let dev = ckm.adjoint().mul(&ckm).map_err(TripleError::from)?.max_diff(&ComplexMatrix::identity(n));
        if !(dev <= UNITARY_TOL) {
            return Err(SmError::NotUnitary(dev));
        }
        Ok(Self { up, down, lepton, ckm })
    }

    /// Trivial mixing.
    pub fn diagonal(up: Vec<f64>, down: Vec<f64>, lepton: Vec<f64>) -> Result<Self> {
        let n = up.len();
        Self::new(up, down, lepton, ComplexMatrix::identity(n))
    }

    pub fn generations(&self) -> usize {
        self.up.len()
    }

    /// Heaviest up-type mass.
    pub fn top(&self) -> f64 {
        self.up.iter().copied().fold(0.0, f64::max)
    }

    pub fn heaviest(&self) -> f64 {
        self.up.iter().chain(&self.down).chain(&self.lepton).copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        let f = |v: &[f64]| v.iter().map(|m| m * s).collect();
        Self::new(f(&self.up), f(&self.down), f(&self.lepton), self.ckm.clone())
    }

    pub fn up_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::real_diagonal(&self.up)
    }

    /// C·diag(m_d)·C*.
    pub fn down_matrix(&self) -> ComplexMatrix {
        let d = ComplexMatrix::real_diagonal(&self.down);
        self.ckm.mul(&d).and_then(|x| x.mul(&self.ckm.adjoint())).expect("square shapes")
    }

    pub fn lepton_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::real_diagonal(&self.lepton)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiggsDoublet {
    pub h1: C64,
    pub h2: C64,
}

impl HiggsDoublet {
    pub fn new(h1: C64, h2: C64) -> Result<Self> {
        if !(h1.re.is_finite() && h1.im.is_finite() && h2.re.is_finite() && h2.im.is_finite()) {
            return Err(SmError::NonFinite);
        }
        Ok(Self { h1, h2 })
    }

    pub fn zero() -> Self {
        Self { h1: c(0.0, 0.0), h2: c(0.0, 0.0) }
    }

    /// |1+h₁|² + |h₂|².
    pub fn weight(&self) -> f64 {
        (c(1.0, 0.0) + self.h1).norm_sqr() + self.h2.norm_sqr()
    }

    /// The quaternion 1 + h as a 2×2 matrix.
    pub fn quaternion(&self) -> ComplexMatrix {
        let x = c(1.0, 0.0) + self.h1;
        let y = self.h2;
        ComplexMatrix::new(2, 2, vec![x, -y.conj(), y, x.conj()]).expect("finite")
    }
}

/// The 8N×7N left-right mass matrix.
///
/// Rows: quark doublets indexed (isospin, generation, color), then lepton doublets
/// (isospin, generation). Columns: u_R (generation, color), d_R (generation, color), e_R.
pub fn build_mass_matrix(masses: &FermionMasses) -> ComplexMatrix {
    let n = masses.generations();
    let (mu, md, me) = (masses.up_matrix(), masses.down_matrix(), masses.lepton_matrix());
    let mut m = ComplexMatrix::zeros(8 * n, 7 * n).into_dmatrix();
    for g in 0..n {
        for h in 0..n {
            for col in 0..3 {
                m[(g * 3 + col, h * 3 + col)] = mu.get(g, h);
                m[(3 * n + g * 3 + col, 3 * n + h * 3 + col)] = md.get(g, h);
            }
            m[(6 * n + n + g, 6 * n + h)] = me.get(g, h);
        }
    }
    ComplexMatrix::from_dmatrix(m).expect("finite masses")
}

/// Φ: the Higgs quaternion on the isospin index of every row of the mass matrix.
pub fn higgs_operator(h: &HiggsDoublet, generations: usize) -> ComplexMatrix {
    let q = h.quaternion();
    let quarks = q.kron(&ComplexMatrix::identity(3 * generations));
    let leptons = q.kron(&ComplexMatrix::identity(generations));
    quarks.direct_sum(&leptons)
}

/// ‖ΦM‖², computed numerically.
pub fn direct_gtt(h: &HiggsDoublet, masses: &FermionMasses) -> f64 {
    let pm = higgs_operator(h, masses.generations()).mul(&build_mass_matrix(masses)).expect("8N×8N times 8N×7N");
    operator_norm(&pm).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GttMethod {
    ClosedForm,
    DirectNorm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gtt {
    pub value: f64,
    pub method: GttMethod,
    pub diagnostic: Option<String>,
}

/// g^tt = (|1+h₁|²+|h₂|²)·m_t² when the top mass dominates; otherwise ‖ΦM‖² with a diagnostic.
pub fn sm_gtt(h: &HiggsDoublet, masses: &FermionMasses) -> Gtt {
    let (top, heaviest) = (masses.top(), masses.heaviest());
    if heaviest > top {
        return Gtt {
            value: direct_gtt(h, masses),
            method: GttMethod::DirectNorm,
            diagnostic: Some(format!(
                "heaviest fermion mass {heaviest} exceeds the top mass {top}; closed form replaced by ‖ΦM‖²"
            )),
        };
    }
    Gtt { value: h.weight() * top * top, method: GttMethod::ClosedForm, diagnostic: None }
}

/// 1/√g^tt, infinite when the Higgs factor vanishes.
pub fn sm_fiber_distance(h: &HiggsDoublet, masses: &FermionMasses) -> DistanceValue {
    let g = sm_gtt(h, masses).value;
    if g > 0.0 {
        DistanceValue::finite(1.0 / g.sqrt())
    } else {
        DistanceValue::infinite()
    }
}

/// Block indices of the SM algebra.
pub const BLOCK_C: usize = 0;
pub const BLOCK_H: usize = 1;
pub const BLOCK_M3: usize = 2;

/// The internal triple with its distinguished states.
#[derive(Debug, Clone)]
pub struct SmTriple {
    pub triple: SpectralTriple,
    pub generations: usize,
}

impl SmTriple {
    pub fn omega_c(&self) -> PureState {
        PureState::canonical(BLOCK_C)
    }

    pub fn omega_h(&self) -> PureState {
        PureState::canonical(BLOCK_H)
    }

    pub fn color(&self, v: Vec<C64>) -> Result<PureState> {
        Ok(PureState::normalized(BLOCK_M3, v)?)
    }
}

/// Index layout of the 30N-dimensional space.
struct Layout {
    n: usize,
}

impl Layout {
    fn quark_l(&self, g: usize, col: usize, iso: usize) -> usize {
        (g * 3 + col) * 2 + iso
    }
    fn lepton_l(&self, g: usize, iso: usize) -> usize {
        6 * self.n + g * 2 + iso
    }
    fn u_r(&self, g: usize, col: usize) -> usize {
        8 * self.n + g * 3 + col
    }
    fn d_r(&self, g: usize, col: usize) -> usize {
        11 * self.n + g * 3 + col
    }
    fn e_r(&self, g: usize) -> usize {
        14 * self.n + g
    }

    /// Mass-matrix row → particle index.
    fn row(&self, r: usize) -> usize {
        let n = self.n;
        if r < 6 * n {
            let (iso, rest) = (r / (3 * n), r % (3 * n));
            self.quark_l(rest / 3, rest % 3, iso)
        } else {
            let r = r - 6 * n;
            self.lepton_l(r % n, r / n)
        }
    }

    /// Mass-matrix column → particle index.
    fn col(&self, k: usize) -> usize {
        let n = self.n;
        if k < 3 * n {
            self.u_r(k / 3, k % 3)
        } else if k < 6 * n {
            let k = k - 3 * n;
            self.d_r(k / 3, k % 3)
        } else {
            self.e_r(k - 6 * n)
        }
    }

    /// Antiparticle index (relative to 15N) → particle index of the same fermion.
    fn mirror(&self, a: usize) -> usize {
        let n = self.n;
        if a < 12 * n {
            let (g, kind, col) = (a / 12, (a / 3) % 4, a % 3);
            match kind {
                0 => self.quark_l(g, col, 0),
                1 => self.quark_l(g, col, 1),
                2 => self.u_r(g, col),
                _ => self.d_r(g, col),
            }
        } else {
            let a = a - 12 * n;
            let (g, k) = (a / 3, a % 3);
            match k {
                0 => self.lepton_l(g, 0),
                1 => self.lepton_l(g, 1),
                _ => self.e_r(g),
            }
        }
    }

    fn left_handed(&self, p: usize) -> bool {
        p < 8 * self.n
    }
}

/// The internal triple (ℂ⊕ℍ⊕M₃, ℂ^{30N}, D) with left-right coupling ΦM on particles and its
/// conjugate on antiparticles.
pub fn sm_triple(masses: &FermionMasses, h: &HiggsDoublet) -> Result<SmTriple> {
    let n = masses.generations();
    let lay = Layout { n };
    let pm = higgs_operator(h, n).mul(&build_mass_matrix(masses)).map_err(TripleError::from)?;
    let mut dp = ComplexMatrix::zeros(15 * n, 15 * n).into_dmatrix();
    for r in 0..8 * n {
        for k in 0..7 * n {
            let v = pm.get(r, k);
            if v != c(0.0, 0.0) {
                let (i, j) = (lay.row(r), lay.col(k));
                dp[(i, j)] = v;
                dp[(j, i)] = v.conj();
            }
        }
    }
    let dim = 30 * n;
    let mut d = ComplexMatrix::zeros(dim, dim).into_dmatrix();
    for i in 0..15 * n {
        for j in 0..15 * n {
            d[(i, j)] = dp[(i, j)];
            d[(15 * n + i, 15 * n + j)] = dp[(lay.mirror(i), lay.mirror(j))].conj();
        }
    }
    let grading = (0..dim)
        .map(|i| {
            let (p, sign) = if i < 15 * n { (i, 1.0) } else { (lay.mirror(i - 15 * n), -1.0) };
            if lay.left_handed(p) {
                sign
            } else {
                -sign
            }
        })
        .collect();
    let algebra = FiniteAlgebra::new(vec![AlgebraBlock::complex(), AlgebraBlock::quaternions(), AlgebraBlock::matrix(3)])?;
    let slots = vec![
        RepresentationSlot::new(BLOCK_H, Mode::Quaternion2x2, 4 * n),
        RepresentationSlot::new(BLOCK_C, Mode::Scalar, 3 * n),
        RepresentationSlot::new(BLOCK_C, Mode::ScalarConjugate, 4 * n),
        RepresentationSlot::new(BLOCK_M3, Mode::Fundamental, 4 * n),
        RepresentationSlot::new(BLOCK_C, Mode::Scalar, 3 * n),
    ];
    let dirac = HermitianMatrix::new(ComplexMatrix::from_dmatrix(d).map_err(TripleError::from)?).map_err(TripleError::from)?;
    let triple = SpectralTriple::new(algebra, slots, dirac, Some(grading))?;
    Ok(SmTriple { triple, generations: n })
}

#[derive(Debug, Clone)]
pub struct SectorPair {
    pub first: String,
    pub second: String,
    pub verdict: KernelVerdict,
}

#[derive(Debug, Clone)]
pub struct InfiniteSectorReport {
    pub pairs: Vec<SectorPair>,
    /// Every pair involving a color state is Infinite.
    pub color_pairs_infinite: bool,
    /// (ω_h, ω_c) is FinitePossible.
    pub two_sheet_finite: bool,
}

/// Kernel-test classification of state pairs on the unfluctuated internal triple.
pub fn sm_infinite_sector_check(masses: &FermionMasses) -> Result<InfiniteSectorReport> {
    let sm = sm_triple(masses, &HiggsDoublet::zero())?;
    let colors: Vec<(String, PureState)> = [
        ("color e1", vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        ("color e2", vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        ("color e3", vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
        ("color mixed", vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.5)]),
    ]
    .into_iter()
    .map(|(name, v)| Ok((name.to_string(), sm.color(v)?)))
    .collect::<Result<_>>()?;
    let mut pairs = vec![];
    let mut push = |a: &str, sa: &PureState, b: &str, sb: &PureState| {
        pairs.push(SectorPair {
            first: a.to_string(),
            second: b.to_string(),
            verdict: commutant_kernel_test(&sm.triple, sa, sb),
        });
    };
    let (oh, oc) = (sm.omega_h(), sm.omega_c());
    for (name, s) in &colors {
        push("omega_h", &oh, name, s);
        push("omega_c", &oc, name, s);
    }
    for i in 0..colors.len() {
        for j in i + 1..colors.len() {
            push(&colors[i].0, &colors[i].1, &colors[j].0, &colors[j].1);
        }
    }
    push("omega_h", &oh, "omega_c", &oc);
    let color_pairs_infinite = pairs
        .iter()
        .filter(|p| p.first.starts_with("color") || p.second.starts_with("color"))
        .all(|p| p.verdict == KernelVerdict::Infinite);
    let two_sheet_finite = pairs.last().map(|p| p.verdict == KernelVerdict::FinitePossible).unwrap_or(false);
    Ok(InfiniteSectorReport { pairs, color_pairs_infinite, two_sheet_finite })
}
