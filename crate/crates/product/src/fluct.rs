use crate::{ProductError, Result};
use nalgebra::{DMatrix, DVector};
use ncmetric_linalg::{commutator, ComplexMatrix, HermitianMatrix};
use ncmetric_oracle::{distance_numeric, OracleOptions};
use ncmetric_triple::{represent, DistanceValue, PureState, SpectralTriple, TripleError};

/// Largest accepted relative least-squares residual for one-form membership.
pub const ONE_FORM_TOL: f64 = 1e-8;

/// The internal triple with D_I replaced by D_I + H.
pub fn fluctuate(internal: &SpectralTriple, h: &HermitianMatrix) -> Result<SpectralTriple> {
    if h.dim() != internal.dim() {
        return Err(ProductError::Dimension(h.dim(), internal.dim()));
    }
    let d = internal.dirac.add(h).map_err(TripleError::from)?;
    Ok(internal.with_dirac(d)?)
}

fn realify(m: &ComplexMatrix) -> Vec<f64> {
    m.entries().iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Relative distance of `h` from the real span of {π(a)[D,π(b)]}.
pub fn one_form_residual(internal: &SpectralTriple, h: &ComplexMatrix) -> Result<f64> {
    if h.rows() != internal.dim() || h.cols() != internal.dim() {
        return Err(ProductError::Dimension(h.rows(), internal.dim()));
    }
    let reps: Vec<ComplexMatrix> = internal
        .algebra
        .full_basis()
        .iter()
        .map(|a| represent(a, internal))
        .collect::<std::result::Result<_, _>>()?;
    let comms: Vec<ComplexMatrix> = reps
        .iter()
        .map(|b| commutator(&internal.dirac, b))
        .collect::<std::result::Result<_, _>>()
        .map_err(TripleError::from)?;
    let mut cols = vec![];
    for a in &reps {
        for cb in &comms {
            cols.push(realify(&a.mul(cb).map_err(TripleError::from)?));
        }
    }
    let target = DVector::from_vec(realify(h));
    let norm = target.norm().max(1.0);
    if cols.is_empty() {
        return Ok(target.norm() / norm);
    }
    let rows = target.len();
    let a = DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i]);
    let svd = a.svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let mut proj = DVector::zeros(rows);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > 1e-10 * smax {
            let col = u.column(k);
            proj += col * col.dot(&target);
        }
    }
    Ok((target - proj).norm() / norm)
}

/// Samples x ↦ H(x) of a self-adjoint internal perturbation.
#[derive(Debug, Clone)]
pub struct ScalarFluctuation {
    pub samples: Vec<(f64, HermitianMatrix)>,
}

impl ScalarFluctuation {
    pub fn new(samples: Vec<(f64, HermitianMatrix)>) -> Result<Self> {
        if let Some((_, first)) = samples.first() {
            if let Some((_, h)) = samples.iter().find(|(_, h)| h.dim() != first.dim()) {
                return Err(ProductError::Dimension(h.dim(), first.dim()));
            }
        }
        Ok(Self { samples })
    }

    /// Largest one-form residual over the samples; fails above [`ONE_FORM_TOL`].
    pub fn certify(&self, internal: &SpectralTriple) -> Result<f64> {
        let mut worst = 0.0f64;
        for (_, h) in &self.samples {
            worst = worst.max(one_form_residual(internal, &h.to_complex())?);
        }
        if worst > ONE_FORM_TOL {
            return Err(ProductError::NotOneForm(worst));
        }
        Ok(worst)
    }

    /// The per-point triple (A_I, H_I, D_I + H(x)) for every sample.
    pub fn triples(&self, internal: &SpectralTriple) -> Result<Vec<(f64, SpectralTriple)>> {
        self.samples.iter().map(|(x, h)| Ok((*x, fluctuate(internal, h)?))).collect()
    }

    /// Fiber distance d_x(s₁, s₂) at every sample, spread over `threads` workers.
    pub fn fiber_distances(
        &self,
        internal: &SpectralTriple,
        s1: &PureState,
        s2: &PureState,
        opts: &OracleOptions,
        threads: usize,
    ) -> Result<Vec<(f64, DistanceValue)>> {
        let triples = self.triples(internal)?;
        let chunk = triples.len().div_ceil(threads.max(1)).max(1);
        let parts: Vec<Result<Vec<(f64, DistanceValue)>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = triples
                .chunks(chunk)
                .map(|ch| {
                    scope.spawn(move || {
                        ch.iter().map(|(x, t)| Ok((*x, distance_numeric(t, s1, s2, opts)?))).collect()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        let mut out = vec![];
        for p in parts {
            out.extend(p?);
        }
        Ok(out)
    }
}
