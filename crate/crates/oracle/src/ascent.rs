//! Ratio ascent on (c·w)/N(w): an independent lower bound for the barrier solver.

use crate::{check, prepare, OracleError, OracleOptions, Prepared, Reduced};
use nalgebra::DVector;
use ncmetric_linalg::{ComplexMatrix, HermitianMatrix};
use ncmetric_triple::{PureState, SpectralTriple};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Ratio and its gradient (a subgradient at nonsmooth points).
fn ratio_grad(r: &Reduced, w: &DVector<f64>) -> (f64, DVector<f64>) {
    let h = HermitianMatrix::new(ComplexMatrix::from_dmatrix(r.f(w)).expect("finite")).expect("hermitian");
    let (lam, u) = ncmetric_linalg::hermitian_eigen(&h);
    let (idx, sign) = if lam[0].abs() > lam[lam.len() - 1].abs() { (0, -1.0) } else { (lam.len() - 1, 1.0) };
    let nrm = lam[idx].abs();
    let v = u.column(idx);
    let dn = DVector::from_iterator(r.mats.len(), r.mats.iter().map(|a| sign * (v.adjoint() * a * v)[(0, 0)].re));
    let cw = r.c.dot(w);
    (cw / nrm, &r.c / nrm - dn * (cw / (nrm * nrm)))
}

fn climb(r: &Reduced, mut w: DVector<f64>, iters: usize) -> f64 {
    w /= w.norm();
    let (mut val, mut g) = ratio_grad(r, &w);
    let mut step = 0.5;
    for _ in 0..iters {
        // tangent component only; the ratio is scale invariant
        let gt = &g - &w * g.dot(&w);
        if gt.norm() < 1e-14 * (1.0 + val.abs()) {
            break;
        }
        let mut improved = false;
        while step > 1e-14 {
            let mut wn = &w + &gt * (step / gt.norm());
            wn /= wn.norm();
            let (vn, gn) = ratio_grad(r, &wn);
            if vn > val {
                w = wn;
                val = vn;
                g = gn;
                step *= 1.5;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    val
}

fn random_direction(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| ncmetric_linalg::gauss(rng)))
}

/// Best ratio over `opts.restarts` seeded starts (the first is the objective direction).
pub fn ascent_lower_bound(
    triple: &SpectralTriple,
    s1: &PureState,
    s2: &PureState,
    opts: &OracleOptions,
) -> Result<f64, OracleError> {
    check(triple, s1, s2, opts)?;
    Ok(match prepare(triple, s1, s2) {
        Prepared::Infinite => f64::INFINITY,
        Prepared::Zero => 0.0,
        Prepared::Problem(r) => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let n = r.c.len();
            let mut best = climb(&r, r.c.clone(), opts.max_iters);
            for _ in 1..opts.restarts {
                best = best.max(climb(&r, random_direction(n, &mut rng), opts.max_iters));
            }
            best
        }
    })
}

/// Dense grid over directions (quotient dimension ≤ 4 only), refined by ascent from the best cell.
pub fn grid_lower_bound(
    triple: &SpectralTriple,
    s1: &PureState,
    s2: &PureState,
    opts: &OracleOptions,
) -> Result<Option<f64>, OracleError> {
    check(triple, s1, s2, opts)?;
    let r = match prepare(triple, s1, s2) {
        Prepared::Infinite => return Ok(Some(f64::INFINITY)),
        Prepared::Zero => return Ok(Some(0.0)),
        Prepared::Problem(r) => r,
    };
    let n = r.c.len();
    if n > 4 {
        return Ok(None);
    }
    let per_axis: usize = match n {
        1 => 3,
        2 => 721,
        3 => 81,
        _ => 25,
    };
    let mut best = (f64::NEG_INFINITY, DVector::zeros(n));
    // Points of the cube surface [-1,1]^n cover every direction.
    let total = per_axis.pow(n as u32);
    for idx in 0..total {
        let mut k = idx;
        let w = DVector::from_iterator(
            n,
            (0..n).map(|_| {
                let v = -1.0 + 2.0 * (k % per_axis) as f64 / (per_axis - 1) as f64;
                k /= per_axis;
                v
            }),
        );
        if w.amax() < 1.0 - 1e-12 {
            continue;
        }
        let nw = r.norm(&w);
        if nw == 0.0 {
            continue;
        }
        let v = r.c.dot(&w) / nw;
        if v > best.0 {
            best = (v, w);
        }
    }
    Ok(Some(best.0.max(climb(&r, best.1, opts.max_iters))))
}
