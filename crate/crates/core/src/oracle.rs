//! Closed-form reference results.
//!
//! Everything here is plain arithmetic on scalars; nothing calls into
//! [`crate::tensorspace`] or [`crate::dynamics`], so these functions can be
//! used to check the simulator independently.

use crate::{Error, Result, C64};

/// Pointer amplitude of one qubit basis state under dispersive evolution.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchAmplitude {
    /// Qubit levels (0 = g, 1 = e), qubit 1 first.
    pub levels: Vec<u8>,
    /// Σ σ_z eigenvalues over the subset.
    pub magnetization: i32,
    pub amplitude: C64,
}

/// Σ_{j∈subset} s_j with s = −1 for g and +1 for e.
pub fn magnetization(levels: &[u8], subset: &[usize]) -> i32 {
    subset
        .iter()
        .map(|&j| if levels[j] == 0 { -1 } else { 1 })
        .sum()
}

/// α e^{−iχtA}.
pub fn dispersive_branch_amplitude(alpha: C64, chi: f64, t: f64, a: i32) -> C64 {
    alpha * C64::from_polar(1.0, -chi * t * f64::from(a))
}

/// Amplitudes for every basis state of `n` qubits after dispersive evolution
/// of the subset for time `t`.
pub fn branch_table(n: usize, subset: &[usize], alpha: C64, chi: f64, t: f64) -> Vec<BranchAmplitude> {
    (0..1usize << n)
        .map(|idx| {
            let levels: Vec<u8> = (0..n).map(|q| ((idx >> (n - 1 - q)) & 1) as u8).collect();
            let a = magnetization(&levels, subset);
            BranchAmplitude {
                amplitude: dispersive_branch_amplitude(alpha, chi, t, a),
                levels,
                magnetization: a,
            }
        })
        .collect()
}

/// Kerr rotation and damping of the mean pointer amplitude:
/// Δφ = 2K n̄ Δt and exp(−Δφ²/(2n̄)).
pub fn kerr_correction(n_bar: f64, kerr: f64, delta_t: f64) -> (f64, f64) {
    assert!(n_bar > 0.0, "kerr_correction needs n̄ > 0");
    let phase = 2.0 * kerr * n_bar * delta_t;
    (phase, (-phase * phase / (2.0 * n_bar)).exp())
}

/// sin(x)/x, with the series near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Branch amplitude after a resonant square drive ε₀ of length T against
/// magnetization A: −iε₀T e^{−iχAT/2} sinc(χAT/2).
pub fn square_pulse_displacement(epsilon0: f64, t: f64, chi: f64, a: i32) -> Result<C64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("pulse length {t} must be > 0")));
    }
    let x = chi * f64::from(a) * t / 2.0;
    Ok(C64::new(0.0, -epsilon0 * t) * C64::from_polar(sinc(x), -x))
}

/// exp[−(|α| N χ T)²/8].
pub fn displacement_fidelity_bound(alpha: C64, n: usize, chi: f64, t: f64) -> f64 {
    let x = alpha.norm() * n as f64 * chi * t;
    (-x * x / 8.0).exp()
}

/// |⟨α|−α⟩| = e^{−2|α|²}.
pub fn cat_overlap(alpha: C64) -> f64 {
    (-2.0 * alpha.norm_sqr()).exp()
}

/// sin²(θ/2).
pub fn pump_probability(theta: f64) -> f64 {
    (theta / 2.0).sin().powi(2)
}

/// Odd population left after `k` ideal pump cycles: cos²(θ/2)^k.
pub fn pump_residual(theta: f64, k: u32) -> f64 {
    (1.0 - pump_probability(theta)).powi(k as i32)
}

/// Photon-loss damping of the pointer over T = π/(2χ): (exp(−κπ/(4χ)), 1 − κπ/(4χ)).
pub fn photon_loss_damping(kappa: f64, chi: f64) -> Result<(f64, f64)> {
    if !(chi > 0.0) {
        return Err(Error::InvalidParameter("χ must be > 0".into()));
    }
    let x = kappa * std::f64::consts::PI / (4.0 * chi);
    Ok(((-x).exp(), 1.0 - x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const TWO_PI: f64 = 2.0 * PI;

    #[test]
    fn branch_amplitudes() {
        let chi = TWO_PI * 5e-3;
        let t = PI / (2.0 * chi);
        let a = C64::new(2.0, 0.0);
        assert_eq!(dispersive_branch_amplitude(a, chi, t, 0), a);
        assert!((dispersive_branch_amplitude(a, chi, t, 1) - C64::new(0.0, -2.0)).norm() < 1e-12);
        assert!((dispersive_branch_amplitude(a, chi, t, -4) - a).norm() < 1e-12);
        let table = branch_table(4, &[1, 3], a, chi, t);
        assert_eq!(table.len(), 16);
        for b in &table {
            assert!(b.magnetization.abs() <= 2);
            assert_eq!(b.magnetization.rem_euclid(2), 0);
        }
    }

    #[test]
    fn kerr_values() {
        assert_eq!(kerr_correction(4.0, 0.0, 50.0), (0.0, 1.0));
        let (p, d) = kerr_correction(4.0, TWO_PI * 8e-5, 50.3);
        assert!((p - 0.20226).abs() < 1e-4, "{p}");
        assert!((d - 0.99490).abs() < 1e-4, "{d}");
        let chi = TWO_PI * 5e-3;
        let (p, _) = kerr_correction(4.0, TWO_PI * 8e-5, PI / (2.0 * chi));
        assert!((p - PI * 4.0 * 8e-5 / 5e-3).abs() < 1e-12);
        assert!((p - 0.2011).abs() < 1e-4);
    }

    #[test]
    fn square_pulse() {
        let z = square_pulse_displacement(2.0, 1.0, 0.0, 4).unwrap();
        assert!((z - C64::new(0.0, -2.0)).norm() < 1e-15);
        let z = square_pulse_displacement(2.0, 1.0, TWO_PI * 0.005, 4).unwrap();
        assert!((z.norm() - 2.0 * 0.99934).abs() < 1e-5, "{}", z.norm());
        assert!((z.arg() - (-PI / 2.0 - 0.0628318)).abs() < 1e-6);
        assert!(square_pulse_displacement(1.0, 0.0, 1.0, 1).is_err());
        assert_eq!(sinc(0.0), 1.0);
        assert!((sinc(1e-9) - 1.0).abs() < 1e-17);
    }

    #[test]
    fn bounds_and_overlaps() {
        assert_eq!(displacement_fidelity_bound(C64::new(2.5, 0.0), 4, 1.0, 0.0), 1.0);
        let f = displacement_fidelity_bound(C64::new(2.5, 0.0), 4, TWO_PI * 0.01, 1.0);
        assert!((f - 0.95185).abs() < 1e-5, "{f}");
        assert_eq!(cat_overlap(C64::new(0.0, 0.0)), 1.0);
        assert!((cat_overlap(C64::new(2.0, 0.0)) - 3.3546e-4).abs() < 1e-8);
        assert_eq!(pump_probability(0.0), 0.0);
        assert!((pump_probability(PI) - 1.0).abs() < 1e-15);
        assert!((pump_probability(PI / 2.0) - 0.5).abs() < 1e-15);
        assert!((pump_residual(PI / 2.0, 3) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn photon_loss() {
        assert_eq!(photon_loss_damping(0.0, 1.0).unwrap().0, 1.0);
        let (exact, lin) = photon_loss_damping(TWO_PI * 1e-5, TWO_PI * 5e-3).unwrap();
        assert!((lin - 0.99843).abs() < 1e-5);
        assert!((exact - lin).abs() < 1e-5);
        let x = PI / 4.0 * 0.002;
        assert!((exact - lin).abs() < x * x / 2.0);
        assert!(photon_loss_damping(1.0, 0.0).is_err());
    }
}
