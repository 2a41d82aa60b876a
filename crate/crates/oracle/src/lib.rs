//! Spectral distance as a convex program.
//!
//! sup (τ₁−τ₂)(a) over self-adjoint a with ‖[D,π(a)]‖ ≤ 1. After removing the
//! commutant kernel, the feasible set in quotient coordinates w is the spectrahedron
//! −I ⪯ F(w) ⪯ I with F(w) = Σ w_j i[D,π(b_j)], and the program is solved by a
//! log-barrier path-following Newton method. A multi-start ratio ascent provides an
//! independent lower bound.

mod ascent;
mod barrier;

pub use ascent::{ascent_lower_bound, grid_lower_bound};

use nalgebra::{DMatrix, DVector};
use ncmetric_linalg::{c as cplx, ComplexMatrix, HermitianMatrix};
use ncmetric_triple::{
    AlgebraElement, CommutatorMap, DistanceValue, KernelVerdict, PureState, SpectralTriple, TripleError,
};

pub const DEFAULT_DIM_CAP: usize = 256;
pub const DIM_CAP_ENV: &str = "NCMETRIC_DIM_CAP";

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptions {
    pub rel_tol: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
    pub dim_cap: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-6, max_iters: 400, restarts: 8, seed: 0, dim_cap: DEFAULT_DIM_CAP }
    }
}

impl OracleOptions {
    /// Defaults, with the dimension cap taken from `NCMETRIC_DIM_CAP` when set.
    pub fn from_env() -> Self {
        let mut o = Self::default();
        if let Some(cap) = std::env::var(DIM_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            o.dim_cap = cap;
        }
        o
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("Hilbert space dimension {dim} exceeds the cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },
    #[error("solver did not converge; best lower bound {lower_bound} (upper estimate {upper_bound})")]
    NotConverged { lower_bound: f64, upper_bound: f64 },
    #[error("invalid options: {0}")]
    Options(&'static str),
    #[error(transparent)]
    Triple(#[from] TripleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    KernelTest,
    Barrier,
    Trivial,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::KernelTest => "kernel-test",
            Method::Barrier | Method::Trivial => "oracle",
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub distance: DistanceValue,
    /// Certified upper estimate from the barrier duality gap (∞ on infinite distances).
    pub upper_bound: f64,
    pub method: Method,
    pub iterations: usize,
}

/// The reduced problem: objective and Hermitian constraint matrices in quotient coordinates.
pub(crate) struct Reduced {
    pub c: DVector<f64>,
    pub mats: Vec<DMatrix<ncmetric_linalg::C64>>,
    pub complement: DMatrix<f64>,
}

impl Reduced {
    pub fn f(&self, w: &DVector<f64>) -> DMatrix<ncmetric_linalg::C64> {
        let m = self.mats[0].nrows();
        let mut f = DMatrix::zeros(m, m);
        for (j, a) in self.mats.iter().enumerate() {
            if w[j] != 0.0 {
                f += a * cplx(w[j], 0.0);
            }
        }
        f
    }

    /// N(w) = ‖F(w)‖.
    pub fn norm(&self, w: &DVector<f64>) -> f64 {
        let f = self.f(w);
        let h = HermitianMatrix::new(ComplexMatrix::from_dmatrix(f).expect("finite")).expect("hermitian");
        let ev = ncmetric_linalg::hermitian_eigenvalues(&h);
        ev.first().map(|v| v.abs()).unwrap_or(0.0).max(ev.last().map(|v| v.abs()).unwrap_or(0.0))
    }
}

fn check(triple: &SpectralTriple, s1: &PureState, s2: &PureState, opts: &OracleOptions) -> Result<(), OracleError> {
    if !(opts.rel_tol > 0.0) {
        return Err(OracleError::Options("rel_tol must be positive"));
    }
    if opts.restarts == 0 {
        return Err(OracleError::Options("restarts must be at least 1"));
    }
    if triple.dim() > opts.dim_cap {
        return Err(OracleError::DimensionOverflow { dim: triple.dim(), cap: opts.dim_cap });
    }
    s1.validate(&triple.algebra)?;
    s2.validate(&triple.algebra)?;
    Ok(())
}

pub(crate) enum Prepared {
    Infinite,
    Zero,
    Problem(Reduced),
}

pub(crate) fn prepare(triple: &SpectralTriple, s1: &PureState, s2: &PureState) -> Prepared {
    let map = CommutatorMap::build(triple);
    let c_full = CommutatorMap::objective(triple, s1, s2);
    if map.verdict(&c_full) == KernelVerdict::Infinite {
        return Prepared::Infinite;
    }
    let q = &map.complement;
    if q.ncols() == 0 {
        return Prepared::Zero;
    }
    let c = q.transpose() * DVector::from_column_slice(&c_full);
    let cn = c_full.iter().map(|v| v * v).sum::<f64>().sqrt();
    if c.norm() <= 1e-14 * cn.max(1.0) {
        return Prepared::Zero;
    }
    let i = cplx(0.0, 1.0);
    let mats = (0..q.ncols())
        .map(|j| {
            let mut a = DMatrix::zeros(triple.dim(), triple.dim());
            for (k, cm) in map.commutators.iter().enumerate() {
                if q[(k, j)] != 0.0 {
                    a += cm.as_dmatrix() * cplx(q[(k, j)], 0.0);
                }
            }
            let a = a * i;
            // exact Hermitian symmetrization
            (&a + a.adjoint()) * cplx(0.5, 0.0)
        })
        .collect();
    Prepared::Problem(Reduced { c, mats, complement: q.clone() })
}

pub(crate) fn witness_element(triple: &SpectralTriple, r: &Reduced, w: &DVector<f64>) -> AlgebraElement {
    let v = &r.complement * w;
    AlgebraElement::combination(&triple.algebra.self_adjoint_basis(), v.as_slice()).expect("basis matches")
}

/// Full solver report.
pub fn distance_report(
    triple: &SpectralTriple,
    s1: &PureState,
    s2: &PureState,
    opts: &OracleOptions,
) -> Result<OracleReport, OracleError> {
    check(triple, s1, s2, opts)?;
    match prepare(triple, s1, s2) {
        Prepared::Infinite => Ok(OracleReport {
            distance: DistanceValue::infinite(),
            upper_bound: f64::INFINITY,
            method: Method::KernelTest,
            iterations: 0,
        }),
        Prepared::Zero => Ok(OracleReport {
            distance: DistanceValue::finite(0.0),
            upper_bound: 0.0,
            method: Method::Trivial,
            iterations: 0,
        }),
        Prepared::Problem(r) => {
            let sol = barrier::solve(&r, opts);
            if !sol.converged {
                return Err(OracleError::NotConverged { lower_bound: sol.value, upper_bound: sol.upper });
            }
            let witness = witness_element(triple, &r, &sol.w);
            Ok(OracleReport {
                distance: DistanceValue::with_witness(sol.value, witness),
                upper_bound: sol.upper,
                method: Method::Barrier,
                iterations: sol.iterations,
            })
        }
    }
}

/// d(s1, s2); +∞ when the kernel test fails.
pub fn distance_numeric(
    triple: &SpectralTriple,
    s1: &PureState,
    s2: &PureState,
    opts: &OracleOptions,
) -> Result<DistanceValue, OracleError> {
    distance_report(triple, s1, s2, opts).map(|r| r.distance)
}

/// Pairwise distances, each pair computed once; `threads > 1` spreads pairs over scoped threads.
pub fn distance_matrix_with(
    triple: &SpectralTriple,
    states: &[PureState],
    opts: &OracleOptions,
    threads: usize,
) -> Result<Vec<Vec<DistanceValue>>, OracleError> {
    let n = states.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let threads = threads.max(1).min(pairs.len().max(1));
    let results: Vec<Result<DistanceValue, OracleError>> = if threads == 1 {
        pairs.iter().map(|&(i, j)| distance_numeric(triple, &states[i], &states[j], opts)).collect()
    } else {
        let chunk = pairs.len().div_ceil(threads);
        std::thread::scope(|scope| {
            let handles: Vec<_> = pairs
                .chunks(chunk)
                .map(|ch| {
                    scope.spawn(move || {
                        ch.iter().map(|&(i, j)| distance_numeric(triple, &states[i], &states[j], opts)).collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut m = vec![vec![DistanceValue::finite(0.0); n]; n];
    for (&(i, j), r) in pairs.iter().zip(results) {
        let d = r?;
        m[j][i] = d.clone();
        m[i][j] = d;
    }
    Ok(m)
}

pub fn distance_matrix(
    triple: &SpectralTriple,
    states: &[PureState],
    opts: &OracleOptions,
) -> Result<Vec<Vec<DistanceValue>>, OracleError> {
    distance_matrix_with(triple, states, opts, 1)
}
