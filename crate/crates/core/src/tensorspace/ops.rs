//! Local operators on a single qubit ({g, e} basis) or a truncated oscillator.

use crate::{CMatrix, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

/// σ_y in the {g, e} basis, chosen so that σ_x σ_y = iσ_z with σ_z = diag(−1, 1).
pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 1.), c(0., -1.), c(0., 0.)])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(-1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)])
}

/// σ⁻ = |g⟩⟨e|.
pub fn sigma_minus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)])
}

/// σ⁺ = |e⟩⟨g|.
pub fn sigma_plus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.)])
}

/// |level⟩⟨level| on a d-level factor.
pub fn projector(d: usize, level: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(level, level)] = c(1., 0.);
    m
}

pub fn hadamard() -> CMatrix {
    (sigma_x() + sigma_z()).scale(std::f64::consts::FRAC_1_SQRT_2)
}

/// Truncated annihilation operator a.
pub fn annihilation(d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = c((n as f64).sqrt(), 0.);
    }
    m
}

pub fn creation(d: usize) -> CMatrix {
    annihilation(d).adjoint()
}

pub fn number(d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for n in 0..d {
        m[(n, n)] = c(n as f64, 0.);
    }
    m
}

/// exp(−i θ/2 σ_axis) for axis 'x', 'y' or 'z'.
pub fn rotation(axis: char, theta: f64) -> CMatrix {
    let p = match axis {
        'x' | 'X' => sigma_x(),
        'y' | 'Y' => sigma_y(),
        _ => sigma_z(),
    };
    identity(2).scale((theta / 2.0).cos()) - p * c(0., (theta / 2.0).sin())
}

/// Basis vector |level⟩ of a d-level factor.
pub fn basis(d: usize, level: usize) -> crate::CVector {
    let mut v = crate::CVector::zeros(d);
    v[level] = c(1., 0.);
    v
}

/// Kronecker product of a list of matrices (leftmost slowest).
pub fn kron_all(factors: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::from_element(1, 1, c(1., 0.));
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra_in_ge_basis() {
        let i = C64::i();
        let xy = sigma_x() * sigma_y();
        assert!((xy - sigma_z() * i).norm() < 1e-15);
        let zx = sigma_z() * sigma_x();
        assert!((zx - sigma_y() * i).norm() < 1e-15);
        assert!((sigma_plus() + sigma_minus() - sigma_x()).norm() < 1e-15);
    }

    #[test]
    fn ladder_commutator() {
        let d = 6;
        let a = annihilation(d);
        let comm = &a * a.adjoint() - a.adjoint() * &a;
        for n in 0..d - 1 {
            assert!((comm[(n, n)] - c(1., 0.)).norm() < 1e-14);
        }
        assert!((a.adjoint() * &a - number(d)).norm() < 1e-12);
    }

    #[test]
    fn pi_rotation_flips_with_phase() {
        let g = basis(2, 0);
        let out = rotation('x', std::f64::consts::PI) * g;
        assert!((out[1] - c(0., -1.)).norm() < 1e-15);
    }
}
