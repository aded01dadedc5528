use std::f64::consts::PI;

use super::coherent::{coherent_coefficients, coherent_leakage, LEAKAGE_TOLERANCE};
use super::state::{QuantumState, Representation};
use crate::{Error, Result, C64};

/// Husimi Q values on a list of phase-space points.
#[derive(Clone, Debug, PartialEq)]
pub struct HusimiGrid {
    pub points: Vec<C64>,
    pub values: Vec<f64>,
    /// Points whose coherent state is not resolved by the truncation.
    pub flagged: Vec<bool>,
}

impl HusimiGrid {
    pub fn n_flagged(&self) -> usize {
        self.flagged.iter().filter(|&&f| f).count()
    }
}

/// Q(β) = ⟨β|ρ|β⟩/π for a cavity-only state.
pub fn husimi_q(rho_cavity: &QuantumState, grid: &[C64]) -> Result<HusimiGrid> {
    let layout = rho_cavity.layout();
    if layout.len() != 1 || layout.cavity().is_none() {
        return Err(Error::Dimension(format!(
            "Q-function needs a cavity-only state, got layout {layout}"
        )));
    }
    let dim = layout.total_dim();
    let mut values = Vec::with_capacity(grid.len());
    let mut flagged = Vec::with_capacity(grid.len());
    for &beta in grid {
        let b = coherent_coefficients(beta, dim);
        let q = match rho_cavity.representation() {
            Representation::Pure(v) => b.dotc(v).norm_sqr(),
            Representation::Density(m) => b.dotc(&(m * &b)).re,
        };
        values.push((q / PI).clamp(0.0, 1.0 / PI));
        flagged.push(coherent_leakage(beta, dim) > LEAKAGE_TOLERANCE);
    }
    Ok(HusimiGrid {
        points: grid.to_vec(),
        values,
        flagged,
    })
}

/// Square grid of points re, im ∈ [−extent, extent] with the given spacing,
/// ordered by real part, then imaginary part.
pub fn square_grid(extent: f64, spacing: f64) -> Vec<C64> {
    let n = (extent / spacing).round() as i64;
    let mut pts = Vec::with_capacity(((2 * n + 1) * (2 * n + 1)) as usize);
    for i in -n..=n {
        for j in -n..=n {
            pts.push(C64::new(i as f64 * spacing, j as f64 * spacing));
        }
    }
    pts
}
