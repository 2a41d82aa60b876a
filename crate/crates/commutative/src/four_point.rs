//! Four-point spaces. Coordinates r = (x, y, z) = (a₁−a₂, a₁−a₃, a₁−a₄), so that
//! d(1,2) is the largest x on the surface n(r) = 2. Coefficients dᵢ are inverse
//! couplings in the order 12, 13, 14, 23, 24, 34; dᵢ = ∞ deletes the link.

use crate::{commutative_triple, CommutativeError, Result};
use ncmetric_oracle::{distance_numeric, OracleOptions};
use ncmetric_poly::{dis_in_variable, real_roots, BivariatePolynomial, RealPolynomial, Var};
use ncmetric_triple::{DistanceValue, PureState, SpectralTriple};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourPointCoeffs {
    pub d: [f64; 6],
}

impl FourPointCoeffs {
    pub fn new(d: [f64; 6]) -> Result<Self> {
        if d.iter().any(|&v| !(v > 0.0)) {
            return Err(CommutativeError::NonPositive);
        }
        Ok(Self { d })
    }

    /// The four-cycle 1–2–3–4–1 with d₂ = d₅ = ∞.
    pub fn cycle(d1: f64, d3: f64, d4: f64, d6: f64) -> Result<Self> {
        Self::new([d1, f64::INFINITY, d3, d4, f64::INFINITY, d6])
    }

    /// Couplings 1/dᵢ with 1/∞ = 0 exactly.
    pub fn couplings(&self) -> [f64; 6] {
        self.d.map(|v| if v.is_infinite() { 0.0 } else { 1.0 / v })
    }
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn four_point_triple(d: &FourPointCoeffs) -> Result<SpectralTriple> {
    let k = d.couplings();
    let cs: Vec<_> = PAIRS.iter().zip(k).map(|(&(i, j), v)| (i, j, v)).collect();
    commutative_triple(4, &cs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NAlphaBeta {
    pub alpha: f64,
    pub beta: f64,
    pub n: f64,
    pub f: f64,
}

/// α, β, n = α + √(α²−4β²) and f = α − β² − 1 at r. ½n is ‖[D, a]‖².
pub fn n_alpha_beta(r: [f64; 3], d: &FourPointCoeffs) -> NAlphaBeta {
    let [x, y, z] = r;
    let k = d.couplings();
    let alpha = (k[0] * x).powi(2)
        + (k[1] * y).powi(2)
        + (k[2] * z).powi(2)
        + (k[3] * (x - y)).powi(2)
        + (k[4] * (x - z)).powi(2)
        + (k[5] * (y - z)).powi(2);
    let beta = k[0] * k[5] * x * (y - z) + k[2] * k[3] * z * (x - y) + k[1] * k[4] * y * (z - x);
    let n = alpha + (alpha * alpha - 4.0 * beta * beta).max(0.0).sqrt();
    NAlphaBeta { alpha, beta, n, f: alpha - beta * beta - 1.0 }
}

/// Which closed form produced d(1,2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch12 {
    /// d₁² ≤ d₆²
    Direct,
    /// d₁d₆ = d₃d₄
    Balanced,
    /// C ≤ 0
    NegativeC,
    /// max of the two remaining candidates
    MaxCandidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch13 {
    First,
    Second,
    MaxCandidate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialDistances {
    pub d12: f64,
    pub d13: f64,
    pub branch12: Branch12,
    pub branch13: Branch13,
}

/// Closed forms on the four-cycle (links 13 and 24 deleted), edges 12 = d₁, 14 = d₃, 23 = d₄, 34 = d₆.
pub fn four_point_special(d1: f64, d3: f64, d4: f64, d6: f64) -> Result<SpecialDistances> {
    if [d1, d3, d4, d6].iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(CommutativeError::NonPositive);
    }
    let (s, t) = (d1 * d6, d3 * d4);
    let (d12, branch12) = if d1 * d1 <= d6 * d6 {
        (d1, Branch12::Direct)
    } else if (s - t).abs() <= 1e-12 * s.max(t) {
        let v = d1 * (d3 * d3 + s).abs() / ((d1 * d1 + d3 * d3).sqrt() * (d3 * d3 + d6 * d6).sqrt());
        (v, Branch12::Balanced)
    } else {
        let c = ((d3 + d4).powi(2) * d6 + (d1 - d6) * (t - d6 * d6)) * ((d3 - d4).powi(2) * d6 + (d1 + d6) * (t + d6 * d6));
        if c <= 0.0 {
            (d1 * ((d3 * d3 + d6 * d6) * (d4 * d4 + d6 * d6)).sqrt() / (t - s).abs(), Branch12::NegativeC)
        } else {
            let x2 = d1 * (d3 + d4) / ((d3 + d4).powi(2) + (d1 - d6).powi(2)).sqrt();
            let x3 = d1 * (d3 - d4).abs() / ((d3 - d4).powi(2) + (d1 + d6).powi(2)).sqrt();
            (x2.max(x3), Branch12::MaxCandidate)
        }
    };
    let g = (s - t).powi(2);
    let (d13, branch13) = if (d3 * d3 + d6 * d6).powi(2) <= g {
        ((d3 * d3 + d6 * d6).sqrt(), Branch13::First)
    } else if (d1 * d1 + d4 * d4).powi(2) <= g {
        ((d1 * d1 + d4 * d4).sqrt(), Branch13::Second)
    } else {
        let num = (d1 * d3 + d4 * d6).abs();
        let a = num / ((d3 + d4).powi(2) + (d1 - d6).powi(2)).sqrt();
        let b = num / ((d3 - d4).powi(2) + (d1 + d6).powi(2)).sqrt();
        (a.max(b), Branch13::MaxCandidate)
    };
    Ok(SpecialDistances { d12, d13, branch12, branch13 })
}

/// f = A z² + B z + C with A, B, C polynomials in (x, y).
fn f_in_z(d: &FourPointCoeffs) -> [BivariatePolynomial; 3] {
    let k = d.couplings();
    let x = BivariatePolynomial::x();
    let y = BivariatePolynomial::y();
    let xy = x.sub(&y);
    let sq = |p: &BivariatePolynomial| p.mul(p);
    let a2 = BivariatePolynomial::constant(k[2] * k[2] + k[4] * k[4] + k[5] * k[5]);
    let a1 = x.scale(-2.0 * k[4] * k[4]).add(&y.scale(-2.0 * k[5] * k[5]));
    let a0 = sq(&x)
        .scale(k[0] * k[0] + k[4] * k[4])
        .add(&sq(&y).scale(k[1] * k[1] + k[5] * k[5]))
        .add(&sq(&xy).scale(k[3] * k[3]));
    let b1 = x.scale(-k[0] * k[5]).add(&xy.scale(k[2] * k[3])).add(&y.scale(k[1] * k[4]));
    let b0 = x.mul(&y).scale(k[0] * k[5] - k[1] * k[4]);
    let a = a2.sub(&sq(&b1));
    let b = a1.sub(&b0.mul(&b1).scale(2.0));
    let c = a0.sub(&sq(&b0)).sub(&BivariatePolynomial::constant(1.0));
    [a, b, c]
}

/// Effective discriminant of f in z: (B² − 4AC)/4, vanishing exactly where f has a double root in z.
pub fn v_eff(d: &FourPointCoeffs) -> BivariatePolynomial {
    let [a, b, c] = f_in_z(d);
    let v = b.mul(&b).scale(0.25).sub(&a.mul(&c));
    // cancellation leaves roundoff where exact coefficients vanish
    let cut = 1e-14 * v.max_abs();
    let (dx, dy) = (v.degree_in(Var::X), v.degree_in(Var::Y));
    BivariatePolynomial::new(
        (0..=dx).map(|i| (0..=dy).map(|j| if v.coeff(i, j).abs() <= cut { 0.0 } else { v.coeff(i, j) }).collect()).collect(),
    )
}

fn bivariate_scale(p: &BivariatePolynomial, x: f64, y: f64) -> f64 {
    let (dx, dy) = (p.degree_in(Var::X), p.degree_in(Var::Y));
    let mut s = 0.0;
    for i in 0..=dx {
        for j in 0..=dy {
            s += p.coeff(i, j).abs() * x.abs().powi(i as i32) * y.abs().powi(j as i32);
        }
    }
    s.max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourPointSource {
    /// Largest feasible root of J, confirmed by the oracle.
    Pipeline,
    /// Oracle value; the pipeline produced no confirmed candidate.
    OracleFallback,
}

#[derive(Debug, Clone)]
pub struct FourPointResult {
    pub distance: DistanceValue,
    pub source: FourPointSource,
    /// J = Dis(V_eff, y) as a polynomial in x, normalized; absent when it vanishes identically.
    pub j: Option<RealPolynomial>,
    pub pipeline_value: Option<f64>,
    pub oracle_value: f64,
    pub diagnostic: Option<String>,
}

const FEASIBILITY_TOL: f64 = 1e-6;
const AGREEMENT_TOL: f64 = 1e-4;

/// Largest x ≥ 0 among roots of J that lift to a point with n = 2.
fn pipeline_candidate(d: &FourPointCoeffs, j: &RealPolynomial) -> Option<f64> {
    let v = v_eff(d);
    let dv = v.partial(Var::Y);
    let [pa, pb, pc] = f_in_z(d);
    let mut xs: Vec<f64> = real_roots(j, 1e-6).into_iter().map(|r| r.value).filter(|&x| x >= 0.0).collect();
    xs.sort_by(|a, b| b.total_cmp(a));
    for x in xs {
        let dvx = dv.restrict(Var::X, x);
        if dvx.is_zero() {
            continue;
        }
        let ys: Vec<f64> = if dvx.degree() == 0 { vec![] } else { real_roots(&dvx, 1e-8).into_iter().map(|r| r.value).collect() };
        for y in ys {
            if v.eval(x, y).abs() > 1e-6 * bivariate_scale(&v, x, y) {
                continue;
            }
            let (a, b, c) = (pa.eval(x, y), pb.eval(x, y), pc.eval(x, y));
            let z = if a.abs() > 1e-12 * (b.abs() + c.abs()).max(1.0) {
                -b / (2.0 * a)
            } else if b != 0.0 {
                -c / b
            } else {
                continue;
            };
            if (n_alpha_beta([x, y, z], d).n - 2.0).abs() <= FEASIBILITY_TOL * 2.0 {
                return Some(x);
            }
        }
    }
    None
}

/// d(1,2) in a general four-point space. The resultant pipeline proposes the candidate and
/// the oracle confirms it; on disagreement or when no candidate is feasible the oracle value
/// is returned with a diagnostic.
pub fn four_point_general(d: &FourPointCoeffs, opts: &OracleOptions) -> Result<FourPointResult> {
    let triple = four_point_triple(d)?;
    let oracle = distance_numeric(&triple, &PureState::canonical(0), &PureState::canonical(1), opts)?;
    let j = dis_in_variable(&v_eff(d), Var::Y)
        .ok()
        .map(|p| RealPolynomial::new(p.normalized().coeffs().to_vec()))
        .filter(|p| !p.is_zero());
    let fallback = |j: Option<RealPolynomial>, cand: Option<f64>, msg: String| FourPointResult {
        distance: oracle.clone(),
        source: FourPointSource::OracleFallback,
        j,
        pipeline_value: cand,
        oracle_value: oracle.value,
        diagnostic: Some(msg),
    };
    if oracle.is_infinite() {
        return Ok(fallback(j, None, "points 1 and 2 are disconnected".into()));
    }
    let Some(jp) = j.clone() else {
        return Ok(fallback(None, None, "J vanishes identically".into()));
    };
    match pipeline_candidate(d, &jp) {
        None => Ok(fallback(j, None, "no root of J lifts to a feasible point".into())),
        Some(x) if (x - oracle.value).abs() <= AGREEMENT_TOL * oracle.value.max(1.0) => Ok(FourPointResult {
            distance: DistanceValue::finite(x),
            source: FourPointSource::Pipeline,
            j,
            pipeline_value: Some(x),
            oracle_value: oracle.value,
            diagnostic: None,
        }),
        Some(x) => Ok(fallback(j, Some(x), format!("pipeline candidate {x} disagrees with oracle {}", oracle.value))),
    }
}
