use std::ops::Mul;

use super::layout::HilbertLayout;
use super::ops;
use crate::{CMatrix, CVector, Error, Result};

/// Dense operator on a layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
    layout: HilbertLayout,
}

impl Operator {
    pub fn new(matrix: CMatrix, layout: HilbertLayout) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for layout of dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix, layout })
    }

    pub fn identity(layout: &HilbertLayout) -> Self {
        let d = layout.total_dim();
        Self {
            matrix: CMatrix::identity(d, d),
            layout: layout.clone(),
        }
    }

    pub fn zeros(layout: &HilbertLayout) -> Self {
        let d = layout.total_dim();
        Self {
            matrix: CMatrix::zeros(d, d),
            layout: layout.clone(),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            layout: self.layout.clone(),
        }
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }

    pub fn scale(&self, s: crate::C64) -> Self {
        Self {
            matrix: &self.matrix * s,
            layout: self.layout.clone(),
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.check_layout(other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
            layout: self.layout.clone(),
        })
    }

    pub fn compose(&self, other: &Operator) -> Result<Self> {
        self.check_layout(other)?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
            layout: self.layout.clone(),
        })
    }

    /// Max-norm of [self, other].
    pub fn commutator_norm(&self, other: &Operator) -> Result<f64> {
        self.check_layout(other)?;
        let c = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        Ok(max_abs(&c))
    }

    /// Max-norm of self − self†.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Largest off-diagonal magnitude.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                if i != j {
                    m = m.max(self.matrix[(i, j)].norm());
                }
            }
        }
        m
    }

    fn check_layout(&self, other: &Operator) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::Dimension(format!(
                "layout {} vs {}",
                self.layout, other.layout
            )));
        }
        Ok(())
    }
}

impl Mul for &Operator {
    type Output = Operator;

    /// Panics on mismatched layouts; use [`Operator::compose`] to get an error instead.
    fn mul(self, rhs: &Operator) -> Operator {
        self.compose(rhs).expect("operator layouts differ")
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Embeds `local` at factor `position` with identities elsewhere.
pub fn embed_operator(local: &CMatrix, position: usize, layout: &HilbertLayout) -> Result<Operator> {
    let dims = layout.dims();
    if position >= dims.len() {
        return Err(Error::Dimension(format!("position {position} out of range")));
    }
    if local.nrows() != dims[position] || local.ncols() != dims[position] {
        return Err(Error::Dimension(format!(
            "local operator {}x{} vs subsystem dimension {}",
            local.nrows(),
            local.ncols(),
            dims[position]
        )));
    }
    let left: usize = dims[..position].iter().product();
    let right: usize = dims[position + 1..].iter().product();
    let m = ops::identity(left)
        .kronecker(local)
        .kronecker(&ops::identity(right));
    Operator::new(m, layout.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorspace::Subsystem;
    use crate::C64;

    #[test]
    fn embedded_sigma_z_signs() {
        let l = HilbertLayout::qubits(2);
        let z = embed_operator(&ops::sigma_z(), 0, &l).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| z.matrix()[(i, i)].re).collect();
        assert_eq!(diag, vec![-1.0, -1.0, 1.0, 1.0]);
        assert_eq!(z.max_off_diagonal(), 0.0);
        let id = embed_operator(&ops::identity(2), 0, &l).unwrap();
        assert_eq!(id.matrix(), &CMatrix::identity(4, 4));
    }

    #[test]
    fn disjoint_factors_commute() {
        let l = HilbertLayout::cavity_qed(2, 5, false);
        let n = embed_operator(&ops::number(5), l.cavity().unwrap(), &l).unwrap();
        for q in 0..2 {
            let z = embed_operator(&ops::sigma_z(), l.qubit(q).unwrap(), &l).unwrap();
            assert_eq!(n.commutator_norm(&z).unwrap(), 0.0);
        }
        assert!(embed_operator(&ops::number(4), 2, &l).is_err());
        assert_eq!(l.position(Subsystem::Cavity), Some(2));
        let _ = C64::new(0.0, 0.0);
    }
}
