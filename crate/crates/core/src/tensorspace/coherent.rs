use super::expm::expm_hermitian;
use super::layout::HilbertLayout;
use super::operator::Operator;
use super::ops;
use crate::{CVector, Error, Result, C64};

/// Largest accepted population beyond the truncation (or in the top two levels).
pub const LEAKAGE_TOLERANCE: f64 = 1e-6;

/// Untruncated Fock coefficients e^{−|α|²/2} αⁿ/√(n!) for n < dim.
pub fn coherent_coefficients(alpha: C64, dim: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    if dim == 0 {
        return v;
    }
    v[0] = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 1..dim {
        v[n] = v[n - 1] * alpha / (n as f64).sqrt();
    }
    v
}

/// Σ_{n ≥ dim} |cₙ|², summed term by term to avoid cancellation.
pub fn coherent_leakage(alpha: C64, dim: usize) -> f64 {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        return 0.0;
    }
    // log P(n) = −x + n ln x − ln n!
    let ln_x = x.ln();
    let mut log_p = -x;
    for n in 1..=dim {
        log_p += ln_x - (n as f64).ln();
    }
    let mut total = 0.0;
    let mut n = dim;
    loop {
        let p = log_p.exp();
        total += p;
        if (n as f64) > x && (p <= 1e-18 * total || p == 0.0) {
            break;
        }
        n += 1;
        log_p += ln_x - (n as f64).ln();
    }
    total
}

/// Normalized truncated coherent state |α⟩.
///
/// Fails when the population beyond the truncation exceeds [`LEAKAGE_TOLERANCE`].
pub fn coherent_state(alpha: C64, dim: usize) -> Result<CVector> {
    coherent_state_with(alpha, dim, false).map(|(v, _)| v)
}

/// As [`coherent_state`], optionally accepting large leakage. Returns the leakage too.
pub fn coherent_state_with(alpha: C64, dim: usize, allow_leakage: bool) -> Result<(CVector, f64)> {
    if dim < 2 {
        return Err(Error::Dimension(format!("Fock dimension {dim} < 2")));
    }
    let leak = coherent_leakage(alpha, dim);
    if leak > LEAKAGE_TOLERANCE && !allow_leakage {
        return Err(Error::Truncation {
            leakage: leak,
            tolerance: LEAKAGE_TOLERANCE,
            segment: None,
        });
    }
    let v = coherent_coefficients(alpha, dim);
    let n = v.norm();
    Ok((v.unscale(n), leak))
}

/// D(α) = exp(α a† − α* a) on a truncated oscillator.
pub fn displacement_operator(alpha: C64, dim: usize) -> Result<Operator> {
    if dim < 2 {
        return Err(Error::Dimension(format!("Fock dimension {dim} < 2")));
    }
    let a = ops::annihilation(dim);
    // α a† − α* a = −i H with H = i(α a† − α* a)
    let h = (a.adjoint() * alpha - &a * alpha.conj()) * C64::i();
    let u = expm_hermitian(&h, -C64::i());
    Operator::new(u, HilbertLayout::cavity_only(dim))
}
