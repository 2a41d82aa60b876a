//! Matrix geometries: the one-point space M₂(ℂ) on ℂ², whose pure states form a
//! sphere sliced into horizontal disks, and the two-point space Mₙ(ℂ) ⊕ ℂ on ℂⁿ⁺¹.

use ncmetric_linalg::{c, ComplexMatrix, HermitianMatrix, C64};
use ncmetric_triple::{
    AlgebraBlock, DistanceValue, FiniteAlgebra, Mode, PureState, RepresentationSlot, SpectralTriple, TripleError,
};

/// Altitude equality tolerance on the sphere.
pub const ALTITUDE_TOL: f64 = 1e-10;
/// Tolerance of the common-phase test in the two-point space.
pub const PHASE_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("zero vector")]
    ZeroVector,
    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("state has length {got}, expected {want}")]
    Length { got: usize, want: usize },
    #[error(transparent)]
    Triple(#[from] TripleError),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// 2√(1−|⟨a,b⟩|²) for unit vectors. Lagrange's identity gives ‖a‖²‖b‖²−|⟨a,b⟩|² without
/// cancellation; dividing by the computed norms removes their rounding.
fn chord(a: &[C64], b: &[C64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            s += (a[i] * b[j] - a[j] * b[i]).norm_sqr();
        }
    }
    let na: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    2.0 * (s / (na * nb)).min(1.0).sqrt()
}

fn check_unit(v: &[C64]) -> Result<()> {
    let n = norm(v);
    if n == 0.0 {
        return Err(GeometryError::ZeroVector);
    }
    if (n - 1.0).abs() > 1e-12 {
        return Err(GeometryError::NotNormalized(n));
    }
    Ok(())
}

/// Hopf projection ℂ² → S²; invariant under a global phase.
pub fn hopf(xi: [C64; 2]) -> Result<SpherePoint> {
    check_unit(&xi)?;
    let w = xi[0] * xi[1].conj();
    Ok(SpherePoint { x: 2.0 * w.re, y: 2.0 * w.im, z: xi[0].norm_sqr() - xi[1].norm_sqr() })
}

/// M₂(ℂ) on ℂ² with D = diag(D₁, D₂).
pub fn m2_triple(d1: f64, d2: f64) -> Result<SpectralTriple> {
    let d = HermitianMatrix::from_real_symmetric(2, &[d1, 0.0, 0.0, d2]).map_err(TripleError::from)?;
    Ok(SpectralTriple::matrix_geometry(d)?)
}

/// Distance between the pure states ω_ξ, ω_ζ of M₂(ℂ) for D = diag(D₁, D₂).
/// Finite only at equal altitude, where it is the chord length 2√(1−|⟨ξ,ζ⟩|²) scaled by 1/|D₁−D₂|.
pub fn m2_distance(xi: [C64; 2], zeta: [C64; 2], d1: f64, d2: f64) -> Result<DistanceValue> {
    let (p, q) = (hopf(xi)?, hopf(zeta)?);
    let chord = chord(&xi, &zeta);
    if chord == 0.0 {
        return Ok(DistanceValue::finite(0.0));
    }
    if (p.z - q.z).abs() > ALTITUDE_TOL || d1 == d2 {
        return Ok(DistanceValue::infinite());
    }
    Ok(DistanceValue::finite(chord / (d1 - d2).abs()))
}

/// A pure state of Mₙ(ℂ) ⊕ ℂ.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoPointState {
    /// ω_ξ for a unit vector ξ ∈ ℂⁿ.
    Matrix(Vec<C64>),
    /// ω_c, evaluation on the ℂ summand.
    Scalar,
}

impl TwoPointState {
    pub fn to_pure_state(&self) -> Result<PureState> {
        Ok(match self {
            TwoPointState::Matrix(v) => PureState::vector(0, v.clone())?,
            TwoPointState::Scalar => PureState::canonical(1),
        })
    }
}

/// Mₙ(ℂ) ⊕ ℂ on ℂⁿ⁺¹ with D = [[0, m], [m*, 0]].
pub fn two_point_triple(m: &[C64]) -> Result<SpectralTriple> {
    let n = m.len();
    if n == 0 || norm(m) == 0.0 {
        return Err(GeometryError::ZeroVector);
    }
    let d = ComplexMatrix::from_fn(n + 1, n + 1, |i, j| {
        if j == n && i < n {
            m[i]
        } else if i == n && j < n {
            m[j].conj()
        } else {
            c(0.0, 0.0)
        }
    })
    .map_err(TripleError::from)?;
    let algebra = FiniteAlgebra::new(vec![AlgebraBlock::matrix(n), AlgebraBlock::complex()])?;
    let slots = vec![RepresentationSlot::new(0, Mode::Fundamental, 1), RepresentationSlot::new(1, Mode::Scalar, 1)];
    Ok(SpectralTriple::new(algebra, slots, HermitianMatrix::new(d).map_err(TripleError::from)?, None)?)
}

/// Householder reflection v with v·m = ‖m‖e₁.
fn orient(m: &[C64]) -> ComplexMatrix {
    let n = m.len();
    let r = norm(m);
    let phase = if m[0].norm() > 0.0 { m[0] / m[0].norm() } else { c(1.0, 0.0) };
    // u = m − phase·r·e₁ and H = I − 2uu*/‖u‖² maps m to phase·r·e₁; the extra phase is removed after.
    let mut u: Vec<C64> = m.to_vec();
    u[0] -= phase * r;
    let un = norm(&u);
    let h = ComplexMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
        if un == 0.0 {
            id
        } else {
            id - u[i] * u[j].conj() * (2.0 / (un * un))
        }
    })
    .expect("finite");
    let mut fix = vec![c(1.0, 0.0); n];
    fix[0] = phase.conj();
    ComplexMatrix::diagonal(&fix).mul(&h).expect("square")
}

fn apply(v: &ComplexMatrix, x: &[C64]) -> Vec<C64> {
    (0..x.len()).map(|i| (0..x.len()).map(|j| v.get(i, j) * x[j]).sum()).collect()
}

/// Distance between pure states of Mₙ(ℂ) ⊕ ℂ with D = [[0, m], [m*, 0]]; vectors are
/// given in the basis where D has this form and are rotated internally so that m ↦ ‖m‖e₁.
pub fn two_point_distance(m: &[C64], s1: &TwoPointState, s2: &TwoPointState) -> Result<DistanceValue> {
    let n = m.len();
    let r = norm(m);
    if n == 0 || r == 0.0 {
        return Err(GeometryError::ZeroVector);
    }
    let v = orient(m);
    let rotate = |s: &TwoPointState| -> Result<Option<Vec<C64>>> {
        match s {
            TwoPointState::Scalar => Ok(None),
            TwoPointState::Matrix(x) => {
                if x.len() != n {
                    return Err(GeometryError::Length { got: x.len(), want: n });
                }
                check_unit(x)?;
                Ok(Some(apply(&v, x)))
            }
        }
    };
    let tail_norm = |x: &[C64]| norm(&x[1..]);
    Ok(match (rotate(s1)?, rotate(s2)?) {
        (None, None) => DistanceValue::finite(0.0),
        (Some(x), None) | (None, Some(x)) => {
            if tail_norm(&x) <= PHASE_TOL {
                DistanceValue::finite(1.0 / r)
            } else {
                DistanceValue::infinite()
            }
        }
        (Some(x), Some(y)) => {
            let value = chord(&x, &y) / r;
            if value == 0.0 {
                return Ok(DistanceValue::finite(0.0));
            }
            // ξ̃ = e^{iθ}ζ̃ on components 2..n
            let (a, b) = (&x[1..], &y[1..]);
            let (na, nb) = (norm(a), norm(b));
            let aligned = (na - nb).abs() <= PHASE_TOL && (na * nb - inner(a, b).norm()).abs() <= PHASE_TOL;
            if aligned {
                DistanceValue::finite(value)
            } else {
                DistanceValue::infinite()
            }
        }
    })
}
