use crate::{PolyError, RealPolynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// Σ c[i][j] xⁱ yʲ.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BivariatePolynomial {
    c: Vec<Vec<f64>>,
}

impl BivariatePolynomial {
    pub fn new(c: Vec<Vec<f64>>) -> Self {
        Self { c }
    }

    pub fn zero() -> Self {
        Self { c: vec![] }
    }

    pub fn constant(v: f64) -> Self {
        Self { c: vec![vec![v]] }
    }

    /// coefficient · xⁱ yʲ
    pub fn monomial(coeff: f64, i: usize, j: usize) -> Self {
        let mut c = vec![vec![0.0; j + 1]; i + 1];
        c[i][j] = coeff;
        Self { c }
    }

    pub fn x() -> Self {
        Self::monomial(1.0, 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(1.0, 0, 1)
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.c.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0)
    }

    fn dims(&self) -> (usize, usize) {
        (self.c.len(), self.c.iter().map(|r| r.len()).max().unwrap_or(0))
    }

    /// Highest power of `var` with a nonzero coefficient (0 for the zero polynomial).
    pub fn degree_in(&self, var: Var) -> usize {
        let (nx, ny) = self.dims();
        let mut d = 0;
        for i in 0..nx {
            for j in 0..ny {
                if self.coeff(i, j) != 0.0 {
                    d = d.max(if var == Var::X { i } else { j });
                }
            }
        }
        d
    }

    pub fn add(&self, o: &Self) -> Self {
        let (ax, ay) = self.dims();
        let (bx, by) = o.dims();
        let (nx, ny) = (ax.max(bx), ay.max(by));
        Self { c: (0..nx).map(|i| (0..ny).map(|j| self.coeff(i, j) + o.coeff(i, j)).collect()).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { c: self.c.iter().map(|r| r.iter().map(|v| v * s).collect()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (ax, ay) = self.dims();
        let (bx, by) = o.dims();
        if ax == 0 || bx == 0 || ay == 0 || by == 0 {
            return Self::zero();
        }
        let mut c = vec![vec![0.0; ay + by - 1]; ax + bx - 1];
        for i in 0..ax {
            for j in 0..self.c[i].len() {
                let a = self.c[i][j];
                if a == 0.0 {
                    continue;
                }
                for k in 0..bx {
                    for l in 0..o.c[k].len() {
                        c[i + k][j + l] += a * o.c[k][l];
                    }
                }
            }
        }
        Self { c }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.c
            .iter()
            .rev()
            .fold(0.0, |acc, row| acc * x + row.iter().rev().fold(0.0, |a, &v| a * y + v))
    }

    pub fn partial(&self, var: Var) -> Self {
        let (nx, ny) = self.dims();
        let c = (0..nx)
            .map(|i| {
                (0..ny)
                    .map(|j| match var {
                        Var::X => (i + 1) as f64 * self.coeff(i + 1, j),
                        Var::Y => (j + 1) as f64 * self.coeff(i, j + 1),
                    })
                    .collect()
            })
            .collect();
        Self { c }
    }

    /// Coefficients as polynomials in the other variable: p = Σ_k P_k(other) var^k.
    pub fn coefficients_in(&self, var: Var) -> Vec<RealPolynomial> {
        let (nx, ny) = self.dims();
        match var {
            Var::Y => (0..ny).map(|j| RealPolynomial::new_exact((0..nx).map(|i| self.coeff(i, j)).collect())).collect(),
            Var::X => (0..nx).map(|i| RealPolynomial::new_exact((0..ny).map(|j| self.coeff(i, j)).collect())).collect(),
        }
    }

    /// Restriction to a fixed value of `var`, as a polynomial in the other variable.
    pub fn restrict(&self, var: Var, value: f64) -> RealPolynomial {
        let (nx, ny) = self.dims();
        match var {
            Var::X => RealPolynomial::new_exact(
                (0..ny).map(|j| (0..nx).rev().fold(0.0, |a, i| a * value + self.coeff(i, j))).collect(),
            ),
            Var::Y => RealPolynomial::new_exact(
                (0..nx).map(|i| (0..ny).rev().fold(0.0, |a, j| a * value + self.coeff(i, j))).collect(),
            ),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Division-free determinant of a square matrix with polynomial entries.
/// Dynamic programming over column subsets; fine for the small Sylvester matrices used here.
fn poly_det(m: &[Vec<RealPolynomial>]) -> RealPolynomial {
    let n = m.len();
    assert!(n <= 16, "polynomial determinant limited to 16x16");
    let mut dp: Vec<Option<RealPolynomial>> = vec![None; 1 << n];
    dp[0] = Some(RealPolynomial::constant(1.0));
    for mask in 0usize..(1 << n) {
        let Some(cur) = dp[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        if row == n {
            dp[mask] = Some(cur);
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) != 0 || m[row][j].is_zero() {
                continue;
            }
            let above = (mask >> (j + 1)).count_ones();
            let term = cur.mul(&m[row][j]);
            let term = if above % 2 == 1 { term.scale(-1.0) } else { term };
            let slot = &mut dp[mask | (1 << j)];
            *slot = Some(match slot.take() {
                Some(s) => s.add(&term),
                None => term,
            });
        }
    }
    dp[(1 << n) - 1].take().unwrap_or_else(RealPolynomial::zero)
}

/// Dis(b, var) = Res(b, ∂b/∂var) in `var`, a polynomial in the remaining variable.
pub fn dis_in_variable(b: &BivariatePolynomial, var: Var) -> Result<RealPolynomial, PolyError> {
    let deg = b.degree_in(var);
    if b.max_abs() == 0.0 {
        return Err(PolyError::Degenerate);
    }
    if deg < 2 {
        return Err(PolyError::DegreeTooLow(deg, 2));
    }
    let p: Vec<RealPolynomial> = b.coefficients_in(var).into_iter().take(deg + 1).collect();
    let dp: Vec<RealPolynomial> = (1..=deg).map(|k| p[k].scale(k as f64)).collect();
    let m = deg; // degree of p
    let n = deg - 1; // degree of p'
    let size = m + n;
    let mut s = vec![vec![RealPolynomial::zero(); size]; size];
    for r in 0..n {
        for k in 0..=m {
            s[r][r + k] = p[m - k].clone();
        }
    }
    for r in 0..m {
        for k in 0..=n {
            s[n + r][r + k] = dp[n - k].clone();
        }
    }
    Ok(poly_det(&s))
}
