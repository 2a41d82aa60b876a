use crate::{evaluate_state, represent, PureState, SpectralTriple};
use nalgebra::DMatrix;
use ncmetric_linalg::{commutator, ComplexMatrix};

/// Relative threshold for rank decisions and for "τ₁ − τ₂ vanishes on the kernel".
pub const KERNEL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelVerdict {
    FinitePossible,
    Infinite,
}

/// The real-linear map v ↦ [D, π(Σ v_k b_k)] on self-adjoint coordinates, split into
/// its kernel and an orthonormal complement.
#[derive(Debug, Clone)]
pub struct CommutatorMap {
    /// [D, π(b_k)] for each basis element.
    pub commutators: Vec<ComplexMatrix>,
    /// Columns: orthonormal basis of the kernel, in coordinate space.
    pub kernel: DMatrix<f64>,
    /// Columns: orthonormal basis of the kernel's orthogonal complement.
    pub complement: DMatrix<f64>,
    pub sigma_max: f64,
}

impl CommutatorMap {
    pub fn build(triple: &SpectralTriple) -> Self {
        let basis = triple.algebra.self_adjoint_basis();
        let k = basis.len();
        let commutators: Vec<ComplexMatrix> = basis
            .iter()
            .map(|b| commutator(&triple.dirac, &represent(b, triple).expect("basis matches")).expect("dims"))
            .collect();
        let n = triple.dim();
        let rows = (2 * n * n).max(k);
        let mut m = DMatrix::<f64>::zeros(rows, k);
        for (col, cm) in commutators.iter().enumerate() {
            let d = cm.as_dmatrix();
            for (idx, z) in d.iter().enumerate() {
                m[(2 * idx, col)] = z.re;
                m[(2 * idx + 1, col)] = z.im;
            }
        }
        let svd = m.svd(false, true);
        let vt = svd.v_t.expect("requested V^T");
        let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let thr = KERNEL_TOL * sigma_max;
        let mut ker = vec![];
        let mut comp = vec![];
        for (i, &s) in svd.singular_values.iter().enumerate() {
            let col = vt.row(i).transpose();
            if s <= thr || sigma_max == 0.0 {
                ker.push(col);
            } else {
                comp.push(col);
            }
        }
        let to_mat = |cols: Vec<nalgebra::DVector<f64>>| {
            if cols.is_empty() {
                DMatrix::zeros(k, 0)
            } else {
                DMatrix::from_columns(&cols)
            }
        };
        Self { commutators, kernel: to_mat(ker), complement: to_mat(comp), sigma_max }
    }

    /// (τ₁ − τ₂)(b_k) for each basis element.
    pub fn objective(triple: &SpectralTriple, s1: &PureState, s2: &PureState) -> Vec<f64> {
        triple
            .algebra
            .self_adjoint_basis()
            .iter()
            .map(|b| (evaluate_state(s1, b) - evaluate_state(s2, b)).re)
            .collect()
    }

    /// Norm of the objective's component along the kernel.
    pub fn kernel_residual(&self, c: &[f64]) -> f64 {
        let cv = nalgebra::DVector::from_column_slice(c);
        (self.kernel.transpose() * cv).norm()
    }

    pub fn verdict(&self, c: &[f64]) -> KernelVerdict {
        let cn = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if self.kernel_residual(c) > KERNEL_TOL * cn.max(1.0) {
            KernelVerdict::Infinite
        } else {
            KernelVerdict::FinitePossible
        }
    }
}

/// Infinite iff τ₁ − τ₂ is nonzero on the self-adjoint commutant of D.
pub fn commutant_kernel_test(triple: &SpectralTriple, s1: &PureState, s2: &PureState) -> KernelVerdict {
    let map = CommutatorMap::build(triple);
    map.verdict(&CommutatorMap::objective(triple, s1, s2))
}
