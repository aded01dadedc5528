use nalgebra::linalg::SymmetricEigen;

use super::layout::HilbertLayout;
use super::operator::{max_abs, Operator};
use crate::{CMatrix, CVector, Error, Result, C64};

const NORM_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-7;
const EIGEN_TOL: f64 = 1e-8;
/// Above this dimension only the diagonal is checked for positivity.
const EIGEN_CHECK_MAX_DIM: usize = 512;

#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    Pure(CVector),
    Density(CMatrix),
}

/// Pure or mixed state on a [`HilbertLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    repr: Representation,
    layout: HilbertLayout,
}

impl QuantumState {
    pub fn pure(v: CVector, layout: HilbertLayout) -> Result<Self> {
        check_dim(v.len(), &layout)?;
        let n = v.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("state norm {n} is not 1")));
        }
        Ok(Self::from_vector(v, layout))
    }

    /// Normalizes `v` before wrapping it.
    pub fn pure_normalized(v: CVector, layout: HilbertLayout) -> Result<Self> {
        check_dim(v.len(), &layout)?;
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter("cannot normalize a zero vector".into()));
        }
        Ok(Self::from_vector(v.unscale(n), layout))
    }

    pub fn density(m: CMatrix, layout: HilbertLayout) -> Result<Self> {
        let d = layout.total_dim();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Dimension(format!(
                "{}x{} density matrix for dimension {d}",
                m.nrows(),
                m.ncols()
            )));
        }
        let herm = max_abs(&(&m - m.adjoint()));
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix not Hermitian (error {herm:.2e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidParameter(format!("density matrix trace {tr}")));
        }
        let min = min_eigenvalue(&m);
        if min < -EIGEN_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix has negative eigenvalue {min:.2e}"
            )));
        }
        Ok(Self::from_matrix(m, layout))
    }

    pub(crate) fn from_vector(v: CVector, layout: HilbertLayout) -> Self {
        Self {
            repr: Representation::Pure(v),
            layout,
        }
    }

    pub(crate) fn from_matrix(m: CMatrix, layout: HilbertLayout) -> Self {
        Self {
            repr: Representation::Density(m),
            layout,
        }
    }

    /// Product state from one vector per factor (each normalized on input).
    pub fn product(factors: &[CVector], layout: HilbertLayout) -> Result<Self> {
        if factors.len() != layout.len() {
            return Err(Error::Dimension(format!(
                "{} factors for {} subsystems",
                factors.len(),
                layout.len()
            )));
        }
        let mut v = CVector::from_element(1, C64::new(1.0, 0.0));
        for (f, &d) in factors.iter().zip(layout.dims()) {
            if f.len() != d {
                return Err(Error::Dimension(format!("factor of length {} vs {d}", f.len())));
            }
            v = v.kronecker(f);
        }
        Self::pure_normalized(v, layout)
    }

    /// Computational basis state with the given level per factor.
    pub fn basis(levels: &[usize], layout: HilbertLayout) -> Result<Self> {
        let idx = layout.index_of(levels)?;
        let mut v = CVector::zeros(layout.total_dim());
        v[idx] = C64::new(1.0, 0.0);
        Ok(Self::from_vector(v, layout))
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Representation::Pure(_))
    }

    pub fn as_vector(&self) -> Option<&CVector> {
        match &self.repr {
            Representation::Pure(v) => Some(v),
            Representation::Density(_) => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&CMatrix> {
        match &self.repr {
            Representation::Pure(_) => None,
            Representation::Density(m) => Some(m),
        }
    }

    pub fn to_density(&self) -> CMatrix {
        match &self.repr {
            Representation::Pure(v) => v * v.adjoint(),
            Representation::Density(m) => m.clone(),
        }
    }

    pub fn into_density(self) -> Self {
        match self.repr {
            Representation::Pure(ref v) => Self::from_matrix(v * v.adjoint(), self.layout),
            Representation::Density(_) => self,
        }
    }

    pub(crate) fn into_parts(self) -> (Representation, HilbertLayout) {
        (self.repr, self.layout)
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            Representation::Pure(v) => v.norm_squared(),
            Representation::Density(m) => m.trace().re,
        }
    }

    pub fn purity(&self) -> f64 {
        match &self.repr {
            Representation::Pure(v) => v.norm_squared().powi(2),
            Representation::Density(m) => m.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// Diagonal of the density matrix.
    pub fn populations(&self) -> Vec<f64> {
        match &self.repr {
            Representation::Pure(v) => v.iter().map(|z| z.norm_sqr()).collect(),
            Representation::Density(m) => (0..m.nrows()).map(|i| m[(i, i)].re).collect(),
        }
    }

    /// Tr(ρ O) for a full-space matrix.
    pub fn expectation_matrix(&self, op: &CMatrix) -> Result<C64> {
        check_dim(op.nrows(), &self.layout)?;
        Ok(match &self.repr {
            Representation::Pure(v) => v.dotc(&(op * v)),
            Representation::Density(m) => {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..m.nrows() {
                    for k in 0..m.nrows() {
                        acc += op[(i, k)] * m[(k, i)];
                    }
                }
                acc
            }
        })
    }

    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        if op.layout() != &self.layout {
            return Err(Error::Dimension(format!(
                "operator layout {} vs state layout {}",
                op.layout(),
                self.layout
            )));
        }
        self.expectation_matrix(op.matrix())
    }

    /// ρ → U ρ U† (or U|ψ⟩).
    pub fn transform(&self, u: &CMatrix) -> Result<Self> {
        check_dim(u.nrows(), &self.layout)?;
        Ok(match &self.repr {
            Representation::Pure(v) => Self::from_vector(u * v, self.layout.clone()),
            Representation::Density(m) => {
                Self::from_matrix(u * m * u.adjoint(), self.layout.clone())
            }
        })
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &QuantumState) -> Result<Self> {
        let layout = self.layout.tensor(&other.layout)?;
        Ok(match (&self.repr, &other.repr) {
            (Representation::Pure(a), Representation::Pure(b)) => {
                Self::from_vector(a.kronecker(b), layout)
            }
            _ => Self::from_matrix(self.to_density().kronecker(&other.to_density()), layout),
        })
    }

    /// Reduced state on the factors at `keep` (layout positions).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        partial_trace(self, keep)
    }

    /// Makes the density matrix exactly Hermitian and unit trace.
    pub fn symmetrize(&mut self) {
        if let Representation::Density(m) = &mut self.repr {
            let h = (&*m + m.adjoint()).scale(0.5);
            let tr = h.trace().re;
            *m = h.unscale(tr);
        } else if let Representation::Pure(v) = &mut self.repr {
            let n = v.norm();
            v.unscale_mut(n);
        }
    }
}

fn check_dim(d: usize, layout: &HilbertLayout) -> Result<()> {
    if d != layout.total_dim() {
        return Err(Error::Dimension(format!(
            "dimension {d} vs layout dimension {}",
            layout.total_dim()
        )));
    }
    Ok(())
}

/// Smallest eigenvalue for moderate dimensions, smallest diagonal entry otherwise.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    if m.nrows() <= EIGEN_CHECK_MAX_DIM {
        let h = (m + m.adjoint()).scale(0.5);
        SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b))
    } else {
        (0..m.nrows()).fold(f64::INFINITY, |a, i| a.min(m[(i, i)].re))
    }
}

/// Reduced density matrix on the factors listed in `keep`.
pub fn partial_trace(state: &QuantumState, keep: &[usize]) -> Result<QuantumState> {
    let layout = state.layout();
    let kept_layout = layout.sub_layout(keep)?;
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    let traced: Vec<usize> = (0..layout.len()).filter(|p| !keep_sorted.contains(p)).collect();

    let dims = layout.dims();
    let dk: usize = keep_sorted.iter().map(|&p| dims[p]).product();
    let dt: usize = traced.iter().map(|&p| dims[p]).product();

    // full index for each (kept, traced) pair
    let mut full = vec![0usize; dk * dt];
    for idx in 0..layout.total_dim() {
        let mut a = 0;
        for &p in &keep_sorted {
            a = a * dims[p] + layout.digit(idx, p);
        }
        let mut t = 0;
        for &p in &traced {
            t = t * dims[p] + layout.digit(idx, p);
        }
        full[a * dt + t] = idx;
    }

    let mut out = CMatrix::zeros(dk, dk);
    match state.representation() {
        Representation::Pure(v) => {
            let mut m = CMatrix::zeros(dk, dt);
            for a in 0..dk {
                for t in 0..dt {
                    m[(a, t)] = v[full[a * dt + t]];
                }
            }
            out = &m * m.adjoint();
        }
        Representation::Density(rho) => {
            for b in 0..dk {
                for a in 0..dk {
                    let mut acc = C64::new(0.0, 0.0);
                    for t in 0..dt {
                        acc += rho[(full[a * dt + t], full[b * dt + t])];
                    }
                    out[(a, b)] = acc;
                }
            }
        }
    }
    Ok(QuantumState::from_matrix(out, kept_layout))
}

/// ⟨target|ρ|target⟩ for a pure target.
pub fn state_fidelity(rho: &QuantumState, target: &QuantumState) -> Result<f64> {
    if rho.layout() != target.layout() {
        return Err(Error::Dimension(format!(
            "state layout {} vs target layout {}",
            rho.layout(),
            target.layout()
        )));
    }
    let t = target
        .as_vector()
        .ok_or_else(|| Error::InvalidParameter("fidelity target must be a pure state".into()))?;
    let f = match rho.representation() {
        Representation::Pure(v) => t.dotc(v).norm_sqr(),
        Representation::Density(m) => t.dotc(&(m * t)).re,
    };
    Ok(f.clamp(0.0, 1.0))
}

/// √⟨target|ρ|target⟩, the overlap-magnitude form of the fidelity.
pub fn root_fidelity(rho: &QuantumState, target: &QuantumState) -> Result<f64> {
    state_fidelity(rho, target).map(f64::sqrt)
}
