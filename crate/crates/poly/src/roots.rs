use crate::RealPolynomial;
use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

const IMAG_TOL: f64 = 1e-8;
const CLUSTER_TOL: f64 = 1e-4;

fn companion(p: &RealPolynomial) -> DMatrix<f64> {
    let n = p.degree();
    let lead = p.leading();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -p.coeff(i) / lead;
    }
    m
}

/// Coefficients of p(x + s).
fn taylor_shift(p: &RealPolynomial, s: f64) -> RealPolynomial {
    let mut c = p.coeffs().to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            c[j] += s * c[j + 1];
        }
    }
    RealPolynomial::new_exact(c)
}

/// Eigenvalues of the companion matrix of a polynomial of degree >= 1.
///
/// The QR iteration can stall on symmetric root patterns (even polynomials in
/// particular), so it is capped and retried on shifted copies of p.
fn companion_roots(p: &RealPolynomial) -> Vec<Complex64> {
    let radius = 1.0 + p.coeffs().iter().map(|c| (c / p.leading()).abs()).fold(0.0, f64::max);
    for attempt in 0..8 {
        let s = if attempt == 0 { 0.0 } else { 0.0731 * attempt as f64 * radius.min(10.0) };
        let q = if s == 0.0 { p.clone() } else { taylor_shift(p, s) };
        if let Some(schur) = nalgebra::linalg::Schur::try_new(companion(&q), f64::EPSILON, 10_000) {
            return schur.complex_eigenvalues().iter().map(|z| z + s).collect();
        }
    }
    vec![]
}

fn newton_complex(p: &RealPolynomial, dp: &RealPolynomial, mut z: Complex64) -> Complex64 {
    let mut best = (p.eval_complex(z).norm(), z);
    for _ in 0..50 {
        let d = dp.eval_complex(z);
        if d.norm() == 0.0 {
            break;
        }
        z -= p.eval_complex(z) / d;
        let r = p.eval_complex(z).norm();
        if !r.is_finite() {
            break;
        }
        if r < best.0 {
            best = (r, z);
        } else if r >= best.0 {
            break;
        }
    }
    best.1
}

fn newton_real(p: &RealPolynomial, dp: &RealPolynomial, mut x: f64) -> f64 {
    let mut best = (p.eval(x).abs(), x);
    for _ in 0..60 {
        let d = dp.eval(x);
        if d == 0.0 {
            break;
        }
        x -= p.eval(x) / d;
        let r = p.eval(x).abs();
        if !r.is_finite() {
            break;
        }
        if r < best.0 {
            best = (r, x);
        } else {
            break;
        }
    }
    best.1
}

/// Real roots in ascending order, with multiplicities.
///
/// Companion-matrix eigenvalues are clustered; a cluster of size k whose centroid is
/// real is polished by Newton on the (k-1)-th derivative, singletons by complex Newton
/// on p itself. Only roots with `|p(r)| <= tol * scale_at(r)` are reported.
pub fn real_roots(p: &RealPolynomial, tol: f64) -> Vec<RealRoot> {
    let p = p.normalized();
    if p.degree() == 0 {
        return vec![];
    }
    let zs = companion_roots(&p);
    let n = zs.len();
    // Single-linkage clustering.
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            let s = 1.0 + zs[i].norm().max(zs[j].norm());
            if (zs[i] - zs[j]).norm() <= CLUSTER_TOL * s {
                let (a, b) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == a {
                        *l = b;
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<Complex64>> = vec![];
    let mut seen = vec![];
    for i in 0..n {
        if let Some(k) = seen.iter().position(|&l| l == label[i]) {
            groups[k].push(zs[i]);
        } else {
            seen.push(label[i]);
            groups.push(vec![zs[i]]);
        }
    }
    let dp = p.derivative();
    let accept = |x: f64| p.eval(x).abs() <= tol * p.scale_at(x);
    let mut out: Vec<RealRoot> = vec![];
    for g in groups {
        let k = g.len();
        let centroid = g.iter().sum::<Complex64>() / k as f64;
        let is_real = |z: Complex64| z.im.abs() <= IMAG_TOL * (1.0 + z.re.abs());
        let mut done = false;
        if k > 1 && is_real(centroid) {
            let mut q = p.clone();
            for _ in 0..k - 1 {
                q = q.derivative();
            }
            let x = newton_real(&q, &q.derivative(), centroid.re);
            if (x - centroid.re).abs() <= CLUSTER_TOL * (1.0 + x.abs()) && accept(x) {
                out.push(RealRoot { value: x, multiplicity: k });
                done = true;
            }
        }
        if !done {
            for z in g {
                let z = newton_complex(&p, &dp, z);
                if is_real(z) {
                    let x = newton_real(&p, &dp, z.re);
                    if accept(x) {
                        out.push(RealRoot { value: x, multiplicity: 1 });
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_pair() {
        let r = real_roots(&RealPolynomial::new(vec![-1.0, 0.0, 1.0]), 1e-10);
        assert_eq!(r.len(), 2);
        assert!((r[0].value + 1.0).abs() < 1e-12 && (r[1].value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn double_root() {
        let r = real_roots(&RealPolynomial::new(vec![4.0, -4.0, 1.0]), 1e-10);
        assert_eq!(r, vec![RealRoot { value: 2.0, multiplicity: 2 }]);
    }

    #[test]
    fn no_real_roots() {
        assert!(real_roots(&RealPolynomial::new(vec![1.0, 0.0, 1.0]), 1e-10).is_empty());
    }
}
