use super::integrate::{dopri5, rk4, AdaptiveSettings, StepStats};
use super::kernel::{pack, packed_len, packed_stats, unpack, zero_diagonal_imag, LindbladKernel};
use super::options::{EvolutionOptions, Method};
use super::sparse::{Csr, PictureOp};
use crate::system::{diagonal_energies, CollapseChannel, DriveTarget, DriveTerm, SystemSpec};
use crate::tensorspace::{ops, HilbertLayout, QuantumState, Representation};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Everything needed to propagate through one time interval.
#[derive(Clone, Debug)]
pub struct SegmentGenerator {
    layout: HilbertLayout,
    energies: Vec<f64>,
    drives: Vec<DriveTerm>,
    raising: Vec<Csr>,
    collapse: Vec<CollapseChannel>,
    jumps: Vec<Csr>,
    duration: f64,
}

impl SegmentGenerator {
    pub fn new(
        spec: &SystemSpec,
        drives: &[DriveTerm],
        collapse: &[CollapseChannel],
        duration: f64,
    ) -> Result<Self> {
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::InvalidParameter(format!("segment duration {duration}")));
        }
        let layout = spec.layout();
        let mut shifted = Vec::new();
        let mut raising = Vec::with_capacity(drives.len());
        for d in drives {
            let op = match &d.target {
                DriveTarget::Cavity => {
                    let cav = layout.cavity().expect("system layout has a cavity");
                    Csr::embed(&layout, cav, &ops::creation(spec.fock_dim))
                }
                DriveTarget::Qubits(targets) => {
                    let mut acc: Option<Csr> = None;
                    for &q in targets {
                        if q >= spec.n_qubits {
                            return Err(Error::InvalidParameter(format!("qubit {q} out of range")));
                        }
                        if shifted.iter().any(|&(s, _)| s == q) {
                            return Err(Error::InvalidParameter(
                                "overlapping simultaneous drives on the same qubit".into(),
                            ));
                        }
                        shifted.push((q, d.frame_photons));
                        let s = Csr::embed(&layout, q, &ops::sigma_plus());
                        acc = Some(match acc {
                            None => s,
                            Some(a) => a.sum(&s),
                        });
                    }
                    acc.ok_or_else(|| Error::InvalidParameter("qubit drive without targets".into()))?
                }
            };
            raising.push(op);
        }
        let energies = diagonal_energies(spec, &shifted);
        let jumps = collapse
            .iter()
            .map(|ch| {
                let (pos, local) = ch.local(spec);
                Csr::embed(&layout, pos, &local).scaled(C64::new(ch.rate.sqrt(), 0.0))
            })
            .collect();
        Ok(Self {
            layout,
            energies,
            drives: drives.to_vec(),
            raising,
            collapse: collapse.to_vec(),
            jumps,
            duration,
        })
    }

    /// Undriven evolution, with or without the spec's dissipators.
    pub fn free(spec: &SystemSpec, duration: f64, noise: bool) -> Result<Self> {
        let collapse = if noise {
            crate::system::collapse_channels(spec)?
        } else {
            Vec::new()
        };
        Self::new(spec, &[], &collapse, duration)
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn drives(&self) -> &[DriveTerm] {
        &self.drives
    }

    pub fn collapse(&self) -> &[CollapseChannel] {
        &self.collapse
    }

    pub fn is_dissipative(&self) -> bool {
        !self.jumps.is_empty()
    }

    pub fn is_driven(&self) -> bool {
        self.drives
            .iter()
            .any(|d| d.raising_amplitude().norm() != 0.0)
    }

    fn carrier(&self, d: usize, t: f64) -> C64 {
        let drive = &self.drives[d];
        let t_abs = drive.envelope.start() + t;
        drive.raising_amplitude() * C64::from_polar(1.0, -drive.detuning * t_abs)
    }

    /// Dense Schrödinger-picture H at segment-local time `t`.
    pub fn hamiltonian_at(&self, t: f64) -> CMatrix {
        let dim = self.energies.len();
        let mut h = CMatrix::from_diagonal(&CVector::from_iterator(
            dim,
            self.energies.iter().map(|&e| C64::new(e, 0.0)),
        ));
        for (d, r) in self.raising.iter().enumerate() {
            let c = self.carrier(d, t);
            for (i, j, v) in r.triplets() {
                h[(i, j)] += c * v;
                h[(j, i)] += (c * v).conj();
            }
        }
        h
    }

    /// A(t) = −iH_d − ½ΣL†L in the interaction picture, with its coefficient closure.
    fn drift_operator(&self) -> PictureOp {
        let mut terms = Vec::with_capacity(2 * self.raising.len() + 1);
        for r in &self.raising {
            terms.push(r.clone());
            terms.push(r.adjoint());
        }
        if !self.jumps.is_empty() {
            let mut b: Option<Csr> = None;
            for l in &self.jumps {
                let p = l.adjoint().product(l);
                b = Some(match b {
                    None => p,
                    Some(acc) => acc.sum(&p),
                });
            }
            terms.push(b.unwrap());
        }
        PictureOp::new(&self.energies, &terms)
    }

    fn drift_coefficients(&self, t: f64, out: &mut Vec<C64>) {
        out.clear();
        let mi = C64::new(0.0, -1.0);
        for d in 0..self.raising.len() {
            let c = self.carrier(d, t);
            out.push(mi * c);
            out.push(mi * c.conj());
        }
        if !self.jumps.is_empty() {
            out.push(C64::new(-0.5, 0.0));
        }
    }

    fn jump_operators(&self) -> Vec<PictureOp> {
        self.jumps
            .iter()
            .map(|l| PictureOp::new(&self.energies, std::slice::from_ref(l)))
            .collect()
    }

    fn check_layout(&self, state: &QuantumState) -> Result<()> {
        if state.layout() != &self.layout {
            return Err(Error::Dimension(format!(
                "state layout {} vs segment layout {}",
                state.layout(),
                self.layout
            )));
        }
        Ok(())
    }
}

/// Diagnostics from one propagated segment.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SegmentReport {
    pub steps: StepStats,
    pub trace_drift: f64,
    pub norm_drift: f64,
    pub purity_start: f64,
    pub purity_end: f64,
    /// Largest step-to-step increase of Tr ρ² seen while integrating.
    pub max_purity_increase: f64,
    /// Smallest eigenvalue (or diagonal entry for large dimensions) at the end.
    pub min_eigenvalue: f64,
}

fn settings(method: Method, opts: &EvolutionOptions) -> Option<AdaptiveSettings> {
    match method {
        Method::Adaptive { rtol, atol } => Some(AdaptiveSettings {
            rtol,
            atol,
            max_steps: opts.max_steps,
            max_step: opts.max_step,
        }),
        Method::Rk4 { .. } => None,
    }
}

/// Pure-state propagation. Undriven segments use the exact diagonal phase mask.
pub fn evolve_unitary_segment(
    state: &QuantumState,
    seg: &SegmentGenerator,
    opts: &EvolutionOptions,
) -> Result<QuantumState> {
    evolve_unitary_segment_with_report(state, seg, opts).map(|(s, _)| s)
}

pub fn evolve_unitary_segment_with_report(
    state: &QuantumState,
    seg: &SegmentGenerator,
    opts: &EvolutionOptions,
) -> Result<(QuantumState, SegmentReport)> {
    seg.check_layout(state)?;
    if seg.is_dissipative() {
        return Err(Error::InvalidParameter(
            "unitary evolution requested for a dissipative segment".into(),
        ));
    }
    let psi = state.as_vector().ok_or_else(|| {
        Error::InvalidParameter("unitary evolution needs a pure state".into())
    })?;
    let t_end = seg.duration;
    let mut report = SegmentReport {
        purity_start: 1.0,
        purity_end: 1.0,
        min_eigenvalue: 0.0,
        ..Default::default()
    };
    let mut y: Vec<C64> = psi.iter().copied().collect();
    if seg.is_driven() && t_end > 0.0 {
        let n0 = psi.norm();
        let mut a = seg.drift_operator();
        let mut coefs = Vec::new();
        let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
            seg.drift_coefficients(t, &mut coefs);
            a.update(t, &coefs);
            a.matvec(y, dy);
        };
        let monitor = |_t: f64, _y: &mut [C64]| Ok(());
        report.steps = match opts.pure_method {
            Method::Rk4 { dt } => rk4(&mut y, t_end, dt, rhs, monitor)?,
            m => dopri5(&mut y, t_end, settings(m, opts).unwrap(), rhs, monitor)?,
        };
        let n1 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        report.norm_drift = (n1 - n0).abs();
        if report.norm_drift > opts.norm_tolerance {
            return Err(Error::Numerical(format!(
                "norm drift {:.2e} over a {t_end} ns segment ({} steps, smallest {:.3e} ns); tighten the tolerances or the step",
                report.norm_drift, report.steps.accepted, report.steps.min_step
            )));
        }
    }
    for (k, z) in y.iter_mut().enumerate() {
        *z *= C64::from_polar(1.0, -seg.energies[k] * t_end);
    }
    let out = QuantumState::from_vector(CVector::from_vec(y), state.layout().clone());
    Ok((out, report))
}

/// Density-matrix propagation under the Lindblad equation.
pub fn evolve_lindblad_segment(
    rho: &QuantumState,
    seg: &SegmentGenerator,
    opts: &EvolutionOptions,
) -> Result<QuantumState> {
    evolve_lindblad_segment_with_report(rho, seg, opts).map(|(s, _)| s)
}

pub fn evolve_lindblad_segment_with_report(
    rho: &QuantumState,
    seg: &SegmentGenerator,
    opts: &EvolutionOptions,
) -> Result<(QuantumState, SegmentReport)> {
    seg.check_layout(rho)?;
    let dim = rho.dim();
    let t_end = seg.duration;
    let mut y = match rho.representation() {
        Representation::Density(m) => pack(m),
        Representation::Pure(v) => pack(&(v * v.adjoint())),
    };
    let (tr0, pur0, _) = packed_stats(&y, dim);
    let mut report = SegmentReport {
        purity_start: pur0,
        purity_end: pur0,
        min_eigenvalue: f64::NAN,
        ..Default::default()
    };

    if (seg.is_driven() || seg.is_dissipative()) && t_end > 0.0 {
        let mut a = seg.drift_operator();
        let mut jumps = seg.jump_operators();
        let one = [C64::new(1.0, 0.0)];
        let mut kernel = LindbladKernel::new(dim, opts.execution);
        let mut coefs = Vec::new();
        let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
            seg.drift_coefficients(t, &mut coefs);
            a.update(t, &coefs);
            for j in jumps.iter_mut() {
                j.update(t, &one);
            }
            kernel.apply(&a, &jumps, y, dy);
        };
        let mut last_purity = pur0;
        let mut counter = 0usize;
        let trace_tol = opts.trace_tolerance;
        let every = opts.monitor_every;
        let report_ref = &mut report;
        let monitor = |t: f64, y: &mut [C64]| {
            counter += 1;
            if counter % every != 0 {
                return Ok(());
            }
            zero_diagonal_imag(y, dim);
            let (tr, pur, _) = packed_stats(y, dim);
            let drift = (tr - tr0).abs();
            report_ref.trace_drift = report_ref.trace_drift.max(drift);
            if drift > trace_tol {
                return Err(Error::Numerical(format!(
                    "trace drift {drift:.2e} at t = {t:.4} ns exceeds {trace_tol:.1e}"
                )));
            }
            report_ref.max_purity_increase = report_ref.max_purity_increase.max(pur - last_purity);
            last_purity = pur;
            Ok(())
        };
        let steps = match opts.method {
            Method::Rk4 { dt } => rk4(&mut y, t_end, dt, rhs, monitor)?,
            m => dopri5(&mut y, t_end, settings(m, opts).unwrap(), rhs, monitor)?,
        };
        report.steps = steps;
    }

    // back to the Schrödinger picture
    let e = &seg.energies;
    let mut idx = 0;
    for k in 0..dim {
        for l in 0..=k {
            let w = e[k] - e[l];
            if w != 0.0 {
                y[idx] *= C64::from_polar(1.0, -w * t_end);
            }
            idx += 1;
        }
    }
    debug_assert_eq!(idx, packed_len(dim));
    zero_diagonal_imag(&mut y, dim);
    let (tr, pur, min_diag) = packed_stats(&y, dim);
    report.trace_drift = report.trace_drift.max((tr - tr0).abs());
    report.purity_end = pur;
    let m = unpack(&y, dim);
    report.min_eigenvalue = if dim <= opts.eigen_check_max_dim {
        crate::tensorspace::min_eigenvalue(&m)
    } else {
        min_diag
    };
    if report.min_eigenvalue < -opts.negativity_tolerance {
        return Err(Error::Numerical(format!(
            "density matrix eigenvalue {:.2e} below −{:.0e} after a {t_end} ns segment",
            report.min_eigenvalue, opts.negativity_tolerance
        )));
    }
    Ok((QuantumState::from_matrix(m, rho.layout().clone()), report))
}
