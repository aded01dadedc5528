//! Explicit Runge–Kutta integrators on flat complex state vectors.

use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub min_step: f64,
    pub max_step: f64,
}

impl StepStats {
    fn record(&mut self, h: f64) {
        self.accepted += 1;
        if self.accepted == 1 {
            self.min_step = h;
            self.max_step = h;
        } else {
            self.min_step = self.min_step.min(h);
            self.max_step = self.max_step.max(h);
        }
    }

    pub fn merge(&mut self, other: &StepStats) {
        if other.accepted == 0 {
            return;
        }
        if self.accepted == 0 {
            self.min_step = other.min_step;
            self.max_step = other.max_step;
        } else {
            self.min_step = self.min_step.min(other.min_step);
            self.max_step = self.max_step.max(other.max_step);
        }
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.rhs_evals += other.rhs_evals;
    }
}

fn axpy_into(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..out.len() {
        let mut acc = ZERO;
        for &(c, k) in terms {
            acc += k[i] * c;
        }
        out[i] = y[i] + acc * h;
    }
}

/// Classical fixed-step RK4 over [0, t_end] with the step rounded so it divides t_end.
pub fn rk4<F, M>(y: &mut [C64], t_end: f64, dt: f64, mut f: F, mut monitor: M) -> Result<StepStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    M: FnMut(f64, &mut [C64]) -> Result<()>,
{
    let n = y.len();
    let steps = (t_end / dt).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let mut k1 = vec![ZERO; n];
    let mut k2 = vec![ZERO; n];
    let mut k3 = vec![ZERO; n];
    let mut k4 = vec![ZERO; n];
    let mut tmp = vec![ZERO; n];
    let mut stats = StepStats::default();
    for s in 0..steps {
        let t = s as f64 * h;
        f(t, y, &mut k1);
        axpy_into(&mut tmp, y, h, &[(0.5, &k1)]);
        f(t + 0.5 * h, &tmp, &mut k2);
        axpy_into(&mut tmp, y, h, &[(0.5, &k2)]);
        f(t + 0.5 * h, &tmp, &mut k3);
        axpy_into(&mut tmp, y, h, &[(1.0, &k3)]);
        f(t + h, &tmp, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        stats.rhs_evals += 4;
        stats.record(h);
        monitor(t + h, y)?;
    }
    Ok(stats)
}

// Dormand–Prince 5(4) tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveSettings {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on a single step (ns).
    pub max_step: f64,
}

/// Adaptive Dormand–Prince 5(4) over [0, t_end].
pub fn dopri5<F, M>(
    y: &mut [C64],
    t_end: f64,
    cfg: AdaptiveSettings,
    mut f: F,
    mut monitor: M,
) -> Result<StepStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    M: FnMut(f64, &mut [C64]) -> Result<()>,
{
    let n = y.len();
    let mut stats = StepStats::default();
    if t_end <= 0.0 || n == 0 {
        return Ok(stats);
    }
    let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![ZERO; n]).collect();
    let mut tmp = vec![ZERO; n];
    let mut y_new = vec![ZERO; n];

    f(0.0, y, &mut k[0]);
    stats.rhs_evals += 1;
    let mut h = initial_step(y, &k[0], t_end, cfg, &mut f, &mut tmp, &mut y_new);
    stats.rhs_evals += 1;
    let mut t = 0.0;
    let mut err_prev: f64 = 1e-4;
    let mut last_rejected = false;

    while t < t_end {
        if stats.accepted + stats.rejected >= cfg.max_steps {
            return Err(Error::Numerical(format!(
                "adaptive integrator exceeded {} steps at t = {t:.4} ns (last step {h:.3e} ns)",
                cfg.max_steps
            )));
        }
        if t + h > t_end || t_end - (t + h) < 1e-12 * t_end {
            h = t_end - t;
        }
        if h < 1e-14 * t_end.max(1.0) {
            return Err(Error::Numerical(format!(
                "step size underflow ({h:.3e} ns) at t = {t:.4} ns"
            )));
        }
        let (k1, rest) = k.split_at_mut(1);
        let k1 = &k1[0];
        {
            let (k2, rest) = rest.split_at_mut(1);
            axpy_into(&mut tmp, y, h, &[(A21, k1)]);
            f(t + C2 * h, &tmp, &mut k2[0]);
            let (k3, rest) = rest.split_at_mut(1);
            axpy_into(&mut tmp, y, h, &[(A31, k1), (A32, &k2[0])]);
            f(t + C3 * h, &tmp, &mut k3[0]);
            let (k4, rest) = rest.split_at_mut(1);
            axpy_into(&mut tmp, y, h, &[(A41, k1), (A42, &k2[0]), (A43, &k3[0])]);
            f(t + C4 * h, &tmp, &mut k4[0]);
            let (k5, rest) = rest.split_at_mut(1);
            axpy_into(&mut tmp, y, h, &[(A51, k1), (A52, &k2[0]), (A53, &k3[0]), (A54, &k4[0])]);
            f(t + C5 * h, &tmp, &mut k5[0]);
            let (k6, k7) = rest.split_at_mut(1);
            axpy_into(
                &mut tmp,
                y,
                h,
                &[(A61, k1), (A62, &k2[0]), (A63, &k3[0]), (A64, &k4[0]), (A65, &k5[0])],
            );
            f(t + h, &tmp, &mut k6[0]);
            axpy_into(
                &mut y_new,
                y,
                h,
                &[(B1, k1), (B3, &k3[0]), (B4, &k4[0]), (B5, &k5[0]), (B6, &k6[0])],
            );
            f(t + h, &y_new, &mut k7[0]);
        }
        stats.rhs_evals += 6;

        let mut acc = 0.0;
        for i in 0..n {
            let e = (k[0][i] * E1
                + k[2][i] * E3
                + k[3][i] * E4
                + k[4][i] * E5
                + k[5][i] * E6
                + k[6][i] * E7)
                * h;
            let sc = cfg.atol + cfg.rtol * y[i].norm().max(y_new[i].norm());
            let r = e.norm() / sc;
            acc += r * r;
        }
        let err = (acc / n as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite error estimate at t = {t:.4} ns (step {h:.3e} ns)"
            )));
        }

        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
            stats.record(h);
            monitor(t, y)?;
            // PI controller
            let mut fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            fac = fac.clamp(0.2, 5.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(cfg.max_step);
            err_prev = err.max(1e-4);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            let fac = (0.9 * err.powf(-0.2)).max(0.2);
            h *= fac;
            last_rejected = true;
        }
    }
    Ok(stats)
}

fn initial_step<F>(
    y: &[C64],
    f0: &[C64],
    t_end: f64,
    cfg: AdaptiveSettings,
    f: &mut F,
    tmp: &mut [C64],
    f1: &mut [C64],
) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y.len() as f64;
    let scale = |i: usize| cfg.atol + cfg.rtol * y[i].norm();
    let d0 = (y.iter().enumerate().map(|(i, v)| (v.norm() / scale(i)).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (f0.iter().enumerate().map(|(i, v)| (v.norm() / scale(i)).powi(2)).sum::<f64>() / n).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(t_end).min(cfg.max_step);
    for i in 0..y.len() {
        tmp[i] = y[i] + f0[i] * h0;
    }
    f(h0, tmp, f1);
    let d2 = (f1
        .iter()
        .zip(f0)
        .enumerate()
        .map(|(i, (a, b))| ((a - b).norm() / scale(i)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(t_end).min(cfg.max_step)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(_t: f64, y: &[C64], dy: &mut [C64]) {
        dy[0] = C64::new(0.0, -1.0) * y[0];
    }

    #[test]
    fn dopri_phase_rotation() {
        let mut y = vec![C64::new(1.0, 0.0)];
        let cfg = AdaptiveSettings {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 100_000,
            max_step: f64::INFINITY,
        };
        let stats = dopri5(&mut y, 10.0, cfg, oscillator, |_, _| Ok(())).unwrap();
        let exact = C64::from_polar(1.0, -10.0);
        assert!((y[0] - exact).norm() < 1e-8, "{:?}", y[0]);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn rk4_converges_at_fourth_order() {
        let run = |dt: f64| {
            let mut y = vec![C64::new(1.0, 0.0)];
            rk4(&mut y, 2.0, dt, oscillator, |_, _| Ok(())).unwrap();
            (y[0] - C64::from_polar(1.0, -2.0)).norm()
        };
        let e1 = run(0.1);
        let e2 = run(0.05);
        assert!(e1 / e2 > 14.0 && e1 / e2 < 18.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn time_dependent_rhs() {
        // y' = i t y  ->  y = exp(i t²/2)
        let mut y = vec![C64::new(1.0, 0.0)];
        let cfg = AdaptiveSettings {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 100_000,
            max_step: f64::INFINITY,
        };
        dopri5(&mut y, 3.0, cfg, |t, y, dy| dy[0] = C64::new(0.0, t) * y[0], |_, _| Ok(())).unwrap();
        assert!((y[0] - C64::from_polar(1.0, 4.5)).norm() < 1e-8);
    }
}
