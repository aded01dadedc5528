use nalgebra::linalg::SymmetricEigen;

use super::operator::max_abs;
use crate::{CMatrix, C64};

/// exp(factor · H) for Hermitian H, via eigendecomposition.
pub fn expm_hermitian(h: &CMatrix, factor: C64) -> CMatrix {
    let herm = (h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(herm);
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let e = (factor * lam).exp();
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= e;
        }
    }
    scaled * v.adjoint()
}

/// Matrix exponential. Hermitian and anti-Hermitian inputs go through an
/// eigendecomposition; anything else uses scaling and squaring of a Taylor series.
pub fn expm(m: &CMatrix) -> CMatrix {
    assert!(m.is_square(), "expm of a non-square matrix");
    let scale = max_abs(m);
    if scale == 0.0 {
        return CMatrix::identity(m.nrows(), m.ncols());
    }
    let tol = 1e-13 * scale.max(1.0);
    if max_abs(&(m + m.adjoint())) <= tol {
        // m = −iH with H = i m Hermitian
        let h = m * C64::i();
        return expm_hermitian(&h, -C64::i());
    }
    if max_abs(&(m - m.adjoint())) <= tol {
        return expm_hermitian(m, C64::new(1.0, 0.0));
    }
    expm_taylor(m)
}

fn expm_taylor(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let norm1 = (0..n)
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut s = 0u32;
    while norm1 / 2f64.powi(s as i32) > 0.25 {
        s += 1;
    }
    let a = m.unscale(2f64.powi(s as i32));
    let mut result = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &a / C64::new(k as f64, 0.0);
        result += &term;
        if max_abs(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorspace::ops;

    #[test]
    fn pauli_rotation_matches_closed_form() {
        let theta = 0.7;
        let gen = ops::sigma_x() * C64::new(0.0, -theta / 2.0);
        let u = expm(&gen);
        assert!((u - ops::rotation('x', theta)).norm() < 1e-14);
    }

    #[test]
    fn taylor_path_matches_nilpotent() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(3.0, 1.0);
        let e = expm(&m);
        assert!((e[(0, 1)] - C64::new(3.0, 1.0)).norm() < 1e-13);
        assert!((e[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn hermitian_path() {
        let e = expm(&ops::sigma_z());
        assert!((e[(0, 0)].re - (-1f64).exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - 1f64.exp()).abs() < 1e-13);
    }
}
