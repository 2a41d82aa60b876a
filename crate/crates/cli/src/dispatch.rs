//! Recognition of triples with a known closed form, and the auto/oracle/closed-form dispatch.

use crate::CliError;
use ncmetric_commutative::{four_point_special, regular_distance, three_point_distance};
use ncmetric_linalg::{c, hermitian_eigen, C64};
use ncmetric_matrix_geom::{m2_distance, two_point_distance, TwoPointState};
use ncmetric_oracle::{distance_report, OracleOptions};
use ncmetric_triple::{
    commutant_kernel_test, BlockKind, DistanceValue, KernelVerdict, Mode, PureState, SpectralTriple,
};

/// Entries below this (relative to the largest) count as absent links.
const ZERO_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodChoice {
    Auto,
    Oracle,
    ClosedForm,
}

#[derive(Debug, Clone)]
pub struct Computed {
    pub distance: DistanceValue,
    pub method: String,
    /// Set when a witness was requested but could not be produced.
    pub note: Option<String>,
}

fn scale(t: &SpectralTriple) -> f64 {
    t.dirac.to_complex().max_abs().max(f64::MIN_POSITIVE)
}

/// Number of points when the triple is ℂⁿ acting diagonally, one scalar slot per point in order.
fn commutative_points(t: &SpectralTriple) -> Option<usize> {
    let n = t.algebra.blocks.len();
    let plain = t.real_form
        || t.slots.len() != n
        || t.algebra.blocks.iter().any(|b| b.kind != BlockKind::ComplexLine)
        || t.slots.iter().enumerate().any(|(k, s)| s.block_index != k || s.mode != Mode::Scalar || s.multiplicity != 1);
    (!plain).then_some(n)
}

/// Off-diagonal couplings when all are real, with tiny entries zeroed.
fn real_couplings(t: &SpectralTriple, n: usize) -> Option<Vec<Vec<f64>>> {
    let tol = ZERO_TOL * scale(t);
    let mut k = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let z = t.dirac.get(i, j);
            if i == j {
                continue;
            }
            if z.im.abs() > tol {
                return None;
            }
            k[i][j] = if z.re.abs() > tol { z.re } else { 0.0 };
        }
    }
    Some(k)
}

fn inverse(k: f64) -> f64 {
    1.0 / k.abs()
}

fn commutative_closed_form(t: &SpectralTriple, n: usize, i: usize, j: usize) -> Option<(DistanceValue, &'static str)> {
    if n == 2 {
        let z = t.dirac.get(0, 1).norm();
        let v = if z > ZERO_TOL * scale(t) { DistanceValue::finite(1.0 / z) } else { DistanceValue::infinite() };
        return Some((v, "closed-form:two-point"));
    }
    let k = real_couplings(t, n)?;
    if n == 3 {
        let m = 3 - i - j;
        return Some((three_point_distance(k[i][j], k[i][m], k[j][m]), "closed-form:three-point"));
    }
    // regular space, possibly with the queried link cut
    let mut values = vec![];
    for a in 0..n {
        for b in a + 1..n {
            if (a, b) != (i.min(j), i.max(j)) {
                values.push(k[a][b]);
            }
        }
    }
    let k0 = values[0];
    if k0 != 0.0 && values.iter().all(|&v| v == k0) {
        let kij = k[i][j];
        if kij == k0 {
            return regular_distance(n, k0, false).ok().map(|v| (DistanceValue::finite(v), "closed-form:regular"));
        }
        if kij == 0.0 {
            return regular_distance(n, k0, true).ok().map(|v| (DistanceValue::finite(v), "closed-form:regular"));
        }
    }
    if n == 4 {
        return four_cycle(&k, i, j).map(|v| (v, "closed-form:four-point-special"));
    }
    None
}

/// The four-cycle with positive cycle product, relabeled so the query is (1,2) or (1,3).
fn four_cycle(k: &[Vec<f64>], i: usize, j: usize) -> Option<DistanceValue> {
    let nb = |a: usize| (0..4).filter(|&b| b != a && k[a][b] != 0.0).collect::<Vec<_>>();
    if (0..4).any(|a| nb(a).len() != 2) {
        return None;
    }
    // walk the cycle from i
    let mut order = vec![i];
    let mut prev = i;
    let mut cur = nb(i)[0];
    while cur != i {
        order.push(cur);
        let next = nb(cur).into_iter().find(|&b| b != prev)?;
        prev = cur;
        cur = next;
        if order.len() > 4 {
            return None;
        }
    }
    if order.len() != 4 {
        return None;
    }
    let product: f64 = (0..4).map(|s| k[order[s]][order[(s + 1) % 4]]).product();
    if product <= 0.0 {
        return None;
    }
    let pos = order.iter().position(|&p| p == j)?;
    if pos == 2 {
        let (p1, p2, p3, p4) = (order[0], order[1], order[2], order[3]);
        let s = four_point_special(inverse(k[p1][p2]), inverse(k[p1][p4]), inverse(k[p2][p3]), inverse(k[p3][p4])).ok()?;
        return Some(DistanceValue::finite(s.d13));
    }
    // adjacent: 1 = i, 2 = j, 3 = the other neighbor of j, 4 = the other neighbor of i
    let (p1, p2) = (i, j);
    let p3 = nb(p2).into_iter().find(|&b| b != p1)?;
    let p4 = nb(p1).into_iter().find(|&b| b != p2)?;
    let s = four_point_special(inverse(k[p1][p2]), inverse(k[p1][p4]), inverse(k[p2][p3]), inverse(k[p3][p4])).ok()?;
    Some(DistanceValue::finite(s.d12))
}

fn single_fundamental(t: &SpectralTriple) -> bool {
    t.slots.len() == 1 && t.slots[0].mode == Mode::Fundamental && t.slots[0].multiplicity == 1 && t.grading.is_none()
}

fn vector_of(s: &PureState, n: usize) -> Vec<C64> {
    match &s.vector {
        Some(v) => v.clone(),
        None => (0..n).map(|k| c(if k == 0 { 1.0 } else { 0.0 }, 0.0)).collect(),
    }
}

fn m2_closed_form(t: &SpectralTriple, s1: &PureState, s2: &PureState) -> Option<DistanceValue> {
    let (vals, u) = hermitian_eigen(&t.dirac);
    let rot = |s: &PureState| -> [C64; 2] {
        let v = vector_of(s, 2);
        let w: Vec<C64> = (0..2).map(|a| (0..2).map(|b| u[(b, a)].conj() * v[b]).sum()).collect();
        [w[0], w[1]]
    };
    m2_distance(rot(s1), rot(s2), vals[0], vals[1]).ok()
}

fn two_point_matrix_closed_form(t: &SpectralTriple, s1: &PureState, s2: &PureState) -> Option<DistanceValue> {
    let n = t.algebra.blocks[0].size;
    let tol = ZERO_TOL * scale(t);
    let d00 = t.dirac.get(0, 0);
    for a in 0..n {
        for b in 0..n {
            let want = if a == b { d00 } else { c(0.0, 0.0) };
            if (t.dirac.get(a, b) - want).norm() > tol {
                return None;
            }
        }
    }
    let m: Vec<C64> = (0..n).map(|a| t.dirac.get(a, n)).collect();
    let state = |s: &PureState| if s.block_index == 0 { TwoPointState::Matrix(vector_of(s, n)) } else { TwoPointState::Scalar };
    two_point_distance(&m, &state(s1), &state(s2)).ok()
}

/// Closed-form distance when the triple and pair are of a recognized kind.
pub fn closed_form(t: &SpectralTriple, s1: &PureState, s2: &PureState) -> Option<(DistanceValue, &'static str)> {
    if let Some(n) = commutative_points(t) {
        if n >= 2 && s1.block_index != s2.block_index {
            return commutative_closed_form(t, n, s1.block_index, s2.block_index);
        }
        return None;
    }
    let blocks = &t.algebra.blocks;
    if blocks.len() == 1 && blocks[0].kind == BlockKind::MatrixBlock && blocks[0].size == 2 && single_fundamental(t) {
        return m2_closed_form(t, s1, s2).map(|v| (v, "closed-form:m2-sphere"));
    }
    let two_point = blocks.len() == 2
        && blocks[0].kind == BlockKind::MatrixBlock
        && blocks[1].kind == BlockKind::ComplexLine
        && !t.real_form
        && t.grading.is_none()
        && t.slots.len() == 2
        && (t.slots[0].block_index, t.slots[0].mode, t.slots[0].multiplicity) == (0, Mode::Fundamental, 1)
        && (t.slots[1].block_index, t.slots[1].mode, t.slots[1].multiplicity) == (1, Mode::Scalar, 1);
    if two_point {
        return two_point_matrix_closed_form(t, s1, s2).map(|v| (v, "closed-form:two-point-matrix"));
    }
    None
}

fn oracle(t: &SpectralTriple, s1: &PureState, s2: &PureState, opts: &OracleOptions) -> Result<Computed, CliError> {
    let r = distance_report(t, s1, s2, opts).map_err(|e| CliError::other(format!("oracle: {e}")))?;
    Ok(Computed { distance: r.distance, method: r.method.label().into(), note: None })
}

/// Distance between two states under the chosen method.
pub fn compute(
    t: &SpectralTriple,
    s1: &PureState,
    s2: &PureState,
    choice: MethodChoice,
    opts: &OracleOptions,
    witness: bool,
) -> Result<Computed, CliError> {
    match choice {
        MethodChoice::Oracle => oracle(t, s1, s2, opts),
        MethodChoice::ClosedForm => {
            let (d, name) = closed_form(t, s1, s2)
                .ok_or_else(|| CliError::unavailable("no closed form applies to this triple and pair of states"))?;
            with_witness(t, s1, s2, opts, witness, d, name)
        }
        MethodChoice::Auto => {
            if s1 == s2 {
                return Ok(Computed { distance: DistanceValue::finite(0.0), method: "trivial".into(), note: None });
            }
            if commutant_kernel_test(t, s1, s2) == KernelVerdict::Infinite {
                return Ok(Computed { distance: DistanceValue::infinite(), method: "kernel-test".into(), note: None });
            }
            match closed_form(t, s1, s2) {
                Some((d, name)) => with_witness(t, s1, s2, opts, witness, d, name),
                None => oracle(t, s1, s2, opts),
            }
        }
    }
}

fn with_witness(
    t: &SpectralTriple,
    s1: &PureState,
    s2: &PureState,
    opts: &OracleOptions,
    witness: bool,
    d: DistanceValue,
    name: &str,
) -> Result<Computed, CliError> {
    let mut out = Computed { distance: d, method: name.into(), note: None };
    if witness && !out.distance.is_infinite() {
        match distance_report(t, s1, s2, opts) {
            Ok(r) => out.distance.witness = r.distance.witness,
            Err(e) => out.note = Some(format!("witness unavailable: {e}")),
        }
    }
    Ok(out)
}
