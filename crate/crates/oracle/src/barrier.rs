//! Log-barrier path following for  max c·w  s.t.  −I ⪯ F(w) ⪯ I.

use crate::{OracleOptions, Reduced};
use nalgebra::{DMatrix, DVector};
use ncmetric_linalg::{ComplexMatrix, HermitianMatrix, C64};

pub(crate) struct Solution {
    pub w: DVector<f64>,
    pub value: f64,
    pub upper: f64,
    pub converged: bool,
    pub iterations: usize,
}

struct Eval {
    lam: Vec<f64>,
    u: DMatrix<C64>,
}

fn eigen(r: &Reduced, w: &DVector<f64>) -> Eval {
    let h = HermitianMatrix::new(ComplexMatrix::from_dmatrix(r.f(w)).expect("finite")).expect("hermitian");
    let (lam, u) = ncmetric_linalg::hermitian_eigen(&h);
    Eval { lam, u }
}

fn feasible(e: &Eval) -> bool {
    e.lam.iter().all(|l| l.abs() < 1.0)
}

/// −log det(I−F) − log det(I+F)
fn barrier_value(e: &Eval) -> f64 {
    e.lam.iter().map(|l| -(1.0 - l).ln() - (1.0 + l).ln()).sum()
}

fn spectral_norm(e: &Eval) -> f64 {
    e.lam.iter().fold(0.0, |m, l| m.max(l.abs()))
}

/// Gradient and Hessian of the barrier in eigen-coordinates of F.
fn derivatives(r: &Reduced, e: &Eval) -> (DVector<f64>, DMatrix<f64>) {
    let n = r.mats.len();
    let m = e.lam.len();
    let ut = e.u.adjoint();
    let rot: Vec<DMatrix<C64>> = r.mats.iter().map(|a| &ut * a * &e.u).collect();
    let sm: Vec<f64> = e.lam.iter().map(|l| 1.0 / (1.0 - l)).collect();
    let sp: Vec<f64> = e.lam.iter().map(|l| 1.0 / (1.0 + l)).collect();
    let mut g = DVector::zeros(n);
    for j in 0..n {
        g[j] = (0..m).map(|i| rot[j][(i, i)].re * (sm[i] - sp[i])).sum();
    }
    let wgt = DMatrix::from_fn(m, m, |i, l| sm[i] * sm[l] + sp[i] * sp[l]);
    let mut h = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let mut s = 0.0;
            for l in 0..m {
                for i in 0..m {
                    let a = rot[j][(i, l)];
                    let b = rot[k][(i, l)];
                    s += wgt[(i, l)] * (a.re * b.re + a.im * b.im);
                }
            }
            h[(j, k)] = s;
            h[(k, j)] = s;
        }
    }
    (g, h)
}

fn solve_newton(h: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    if let Some(ch) = h.clone().cholesky() {
        return -ch.solve(g);
    }
    let scale = h.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let ridge = h + DMatrix::identity(h.nrows(), h.ncols()) * (1e-12 * scale);
    match ridge.clone().cholesky() {
        Some(ch) => -ch.solve(g),
        None => -ridge.lu().solve(g).unwrap_or_else(|| g.clone()),
    }
}

pub(crate) fn solve(r: &Reduced, opts: &OracleOptions) -> Solution {
    let n = r.mats.len();
    let m = r.mats[0].nrows();
    let nu = 2.0 * m as f64;
    let c = &r.c;
    let cn = c.norm();
    // Initial estimate from the objective direction.
    let n0 = r.norm(c);
    let lb0 = if n0 > 0.0 { cn * cn / n0 } else { cn };
    let mut t = nu / lb0.max(1e-300);
    let mu = 10.0;
    let mut w = DVector::zeros(n);
    let mut iterations = 0;
    let mut best = (0.0, DVector::zeros(n));
    let target = 1e-3 * opts.rel_tol;
    let mut converged = false;
    let mut upper = f64::INFINITY;
    'outer: loop {
        // Centering.
        for _ in 0..100 {
            iterations += 1;
            if iterations > opts.max_iters * 10 {
                break 'outer;
            }
            let e = eigen(r, &w);
            let (gb, h) = derivatives(r, &e);
            let g = &gb - c * t;
            let dw = solve_newton(&h, &g);
            let dec = -g.dot(&dw);
            if !dec.is_finite() {
                break 'outer;
            }
            if dec / 2.0 < 1e-10 {
                break;
            }
            let phi0 = -t * c.dot(&w) + barrier_value(&e);
            let mut step = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let wn = &w + &dw * step;
                let en = eigen(r, &wn);
                if feasible(&en) {
                    let phi = -t * c.dot(&wn) + barrier_value(&en);
                    if phi <= phi0 - 0.25 * step * dec {
                        w = wn;
                        moved = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let e = eigen(r, &w);
        let nw = spectral_norm(&e);
        if nw > 0.0 {
            let val = c.dot(&w) / nw;
            if val > best.0 {
                best = (val, &w / nw);
            }
        }
        upper = c.dot(&w) + nu / t;
        if best.0 > 0.0 && nu / t <= target * best.0 {
            converged = true;
            break;
        }
        t *= mu;
        if !t.is_finite() {
            break;
        }
    }
    if !converged && best.0 > 0.0 && (upper - best.0) <= opts.rel_tol * best.0 {
        converged = true;
    }
    Solution { value: best.0, w: best.1, upper: upper.max(best.0), converged, iterations }
}
