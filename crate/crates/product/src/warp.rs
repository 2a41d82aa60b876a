//! Geodesics of dτ² = g_tt(s) dt² + ds² on [0,1]×[0,L₀] from (0,x) to (1,y).
//!
//! Input samples are g^tt = 1/g_tt on a uniform grid; the fiber cost c = √g_tt is
//! interpolated linearly between samples. Along a geodesic p = c² dt/dτ is conserved,
//! so ds/dτ = ±√(1 − p²/c²) and turning points sit where c = p. Two families cover all
//! minimizers: a monotone arc with ∫dt = 1 (p found by bisection on the increasing map
//! p ↦ ∫dt), and an arc that reaches a hub h where c attains its minimum over the
//! visited range, dwells there along t at cost c(h), and leaves. Per linear cell both
//! integrals have closed forms in c, so non-smooth warps need no special treatment.

use crate::{ProductError, Result};
use petgraph::algo::dijkstra;
use petgraph::graph::{DiGraph, NodeIndex};

struct Warp {
    c: Vec<f64>,
    h: f64,
    l0: f64,
}

impl Warp {
    fn new(gtt: &[f64], l0: f64) -> Result<Self> {
        if gtt.len() < 2 {
            return Err(ProductError::WarpDomain("need at least two samples"));
        }
        if !(l0 > 0.0 && l0.is_finite()) {
            return Err(ProductError::WarpDomain("interval length must be positive"));
        }
        if let Some(k) = gtt.iter().position(|&g| !(g > 0.0 && g.is_finite())) {
            return Err(ProductError::NonPositiveWarp(k));
        }
        let c = gtt.iter().map(|g| 1.0 / g.sqrt()).collect();
        Ok(Self { c, h: l0 / (gtt.len() - 1) as f64, l0 })
    }

    fn check(&self, s: f64) -> Result<()> {
        if (0.0..=self.l0).contains(&s) {
            Ok(())
        } else {
            Err(ProductError::WarpDomain("endpoint outside [0, L0]"))
        }
    }

    fn cell(&self, s: f64) -> usize {
        ((s / self.h).floor() as usize).min(self.c.len() - 2)
    }

    fn at(&self, s: f64) -> f64 {
        let k = self.cell(s);
        let u = (s / self.h - k as f64).clamp(0.0, 1.0);
        self.c[k] * (1.0 - u) + self.c[k + 1] * u
    }

    /// Breakpoints of [a, b]: the ends and every node strictly between.
    fn pieces(&self, a: f64, b: f64) -> Vec<f64> {
        let (a, b) = (a.min(b), a.max(b));
        let mut pts = vec![a];
        let first = (a / self.h).floor() as usize + 1;
        for k in first..self.c.len() {
            let s = k as f64 * self.h;
            if s >= b {
                break;
            }
            if s > a {
                pts.push(s);
            }
        }
        pts.push(b);
        pts
    }

    fn min_on(&self, a: f64, b: f64) -> f64 {
        self.pieces(a, b).into_iter().map(|s| self.at(s)).fold(f64::INFINITY, f64::min)
    }

    /// (∫dt, ∫√(1 − p²/c²) ds) over the s-range between a and b at momentum p ≤ min c.
    fn integrals(&self, a: f64, b: f64, p: f64) -> (f64, f64) {
        let ft = |c: f64| if p == 0.0 { 0.0 } else { (p / c).min(1.0).acos() };
        let fs = |c: f64| (c * c - p * p).max(0.0).sqrt() - p * ft(c);
        let pts = self.pieces(a, b);
        let (mut t, mut len) = (0.0, 0.0);
        for w in pts.windows(2) {
            let ds = w[1] - w[0];
            if ds <= 0.0 {
                continue;
            }
            let (c0, c1) = (self.at(w[0]), self.at(w[1]));
            if (c1 - c0).abs() <= 1e-12 * c0.max(c1) {
                let cm = 0.5 * (c0 + c1);
                let q = cm * cm - p * p;
                if q <= 0.0 {
                    if p > 0.0 {
                        t = f64::INFINITY;
                    }
                } else {
                    t += ds * p / (cm * q.sqrt());
                    len += ds * q.sqrt() / cm;
                }
            } else {
                let m = (c1 - c0) / ds;
                t += (ft(c1) - ft(c0)) / m;
                len += (fs(c1) - fs(c0)) / m;
            }
        }
        (t, len)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WarpedGeodesic {
    pub length: f64,
    /// Conserved p = g_tt dt/dτ.
    pub momentum: f64,
    /// Point where the path runs along the fiber, if it does.
    pub hub: Option<f64>,
}

/// Minimal warped length between (0,x) and (1,y), with the geodesic's data.
pub fn warped_geodesic_path(gtt: &[f64], l0: f64, x: f64, y: f64) -> Result<WarpedGeodesic> {
    let w = Warp::new(gtt, l0)?;
    w.check(x)?;
    w.check(y)?;
    let mut best = WarpedGeodesic { length: f64::INFINITY, momentum: 0.0, hub: None };
    if x != y {
        let cm = w.min_on(x, y);
        if w.integrals(x, y, cm).0 >= 1.0 {
            let (mut lo, mut hi) = (0.0, cm);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if w.integrals(x, y, mid).0 < 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * cm {
                    break;
                }
            }
            let p = 0.5 * (lo + hi);
            let (t, s) = w.integrals(x, y, p);
            best = WarpedGeodesic { length: p * t + s, momentum: p, hub: None };
        }
    }
    let hubs = (0..w.c.len()).map(|k| k as f64 * w.h).chain([x, y]);
    for h in hubs {
        let p = w.at(h);
        let (lo, hi) = (x.min(y).min(h), x.max(y).max(h));
        if p > w.min_on(lo, hi) * (1.0 + 1e-12) {
            continue;
        }
        let (t1, s1) = w.integrals(x, h, p);
        let (t2, s2) = w.integrals(h, y, p);
        if t1 + t2 > 1.0 {
            continue;
        }
        let length = p + s1 + s2;
        if length < best.length {
            best = WarpedGeodesic { length, momentum: p, hub: Some(h) };
        }
    }
    Ok(best)
}

/// Geodesic length L′((0,x),(1,y)) for g^tt samples on a uniform grid over [0, L₀].
pub fn warped_geodesic(gtt: &[f64], l0: f64, x: f64, y: f64) -> Result<f64> {
    Ok(warped_geodesic_path(gtt, l0, x, y)?.length)
}

/// Resolution of the grid shortest-path approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Cells along t ∈ [0,1].
    pub nt: usize,
    /// Cells along s ∈ [0, L₀].
    pub ns: usize,
    /// Largest step, in cells, of the move stencil.
    pub radius: usize,
    /// Quadrature points per edge.
    pub quadrature: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { nt: 160, ns: 320, radius: 10, quadrature: 16 }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Shortest path on a grid over [0,1]×[0,L₀] with a multi-direction stencil, using the same
/// interpolated warp. x and y are snapped to the nearest grid rows.
pub fn warped_geodesic_grid(gtt: &[f64], l0: f64, x: f64, y: f64, opts: GridOptions) -> Result<f64> {
    let w = Warp::new(gtt, l0)?;
    w.check(x)?;
    w.check(y)?;
    let (nt, ns) = (opts.nt.max(1), opts.ns.max(1));
    let (dt, ds) = (1.0 / nt as f64, l0 / ns as f64);
    let r = opts.radius.max(1) as i64;
    let mut steps = vec![];
    for a in 0..=r {
        for b in -r..=r {
            if (a, b) != (0, 0) && gcd(a as usize, b.unsigned_abs() as usize) == 1 {
                steps.push((a as usize, b));
            }
        }
    }
    let q = opts.quadrature.max(1);
    let edge = |j: usize, (a, b): (usize, i64)| {
        let (tt, s0, sl) = (a as f64 * dt, j as f64 * ds, b as f64 * ds);
        (0..q)
            .map(|k| {
                let u = (k as f64 + 0.5) / q as f64;
                let c = w.at((s0 + u * sl).clamp(0.0, l0));
                (c * c * tt * tt + sl * sl).sqrt()
            })
            .sum::<f64>()
            / q as f64
    };
    let mut g = DiGraph::<(), f64>::with_capacity((nt + 1) * (ns + 1), 0);
    let nodes: Vec<NodeIndex> = (0..(nt + 1) * (ns + 1)).map(|_| g.add_node(())).collect();
    let id = |i: usize, j: usize| nodes[i * (ns + 1) + j];
    for j in 0..=ns {
        for &(a, b) in &steps {
            let jj = j as i64 + b;
            if jj < 0 || jj > ns as i64 {
                continue;
            }
            let cost = edge(j, (a, b));
            for i in 0..=nt {
                let ii = i + a;
                if ii > nt {
                    break;
                }
                g.add_edge(id(i, j), id(ii, jj as usize), cost);
            }
        }
    }
    let snap = |s: f64| ((s / ds).round() as usize).min(ns);
    let (start, goal) = (id(0, snap(x)), id(nt, snap(y)));
    let dist = dijkstra(&g, start, Some(goal), |e| *e.weight());
    Ok(dist.get(&goal).copied().unwrap_or(f64::INFINITY))
}
