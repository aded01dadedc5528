//! Executes a [`PulseSchedule`] segment by segment.

use super::apply::{
    apply_csr, apply_local, fock_tail_population, local_operator, measure_factor, measure_pauli,
    reset_factor,
};
use super::options::EvolutionOptions;
use super::segment::{
    evolve_lindblad_segment_with_report, evolve_unitary_segment_with_report, SegmentGenerator,
    SegmentReport,
};
use super::sparse::Csr;
use crate::protocols::schedule::{
    Action, Condition, ConditionalGate, GateModel, InstantGate, MeasureTarget, PulseSchedule,
    ResetTarget, Segment,
};
use crate::system::{collapse_channels, CollapseChannel, SystemSpec};
use crate::tensorspace::{displacement_operator, ops, HilbertLayout, QuantumState, Subsystem};
use crate::{CMatrix, Error, Result, SimRng, C64};

/// What was measured and what came out.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOutcome {
    pub segment: usize,
    pub target: String,
    /// Observed level for factor measurements.
    pub level: Option<usize>,
    /// Eigenvalue: σ_z convention (g → −1, e → +1) for factors, ±1 for Pauli strings.
    pub eigenvalue: i8,
    pub probability: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeasurementRecord {
    pub outcomes: Vec<MeasurementOutcome>,
}

impl MeasurementRecord {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn last(&self) -> Option<&MeasurementOutcome> {
        self.outcomes.last()
    }

    pub fn eigenvalues(&self) -> Vec<i8> {
        self.outcomes.iter().map(|o| o.eigenvalue).collect()
    }
}

/// Aggregate diagnostics of a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunReport {
    /// Segment indices at which the state was promoted to a density matrix.
    pub promotions: Vec<usize>,
    pub max_trace_drift: f64,
    pub max_norm_drift: f64,
    pub max_purity_increase: f64,
    pub max_leakage: f64,
    pub min_eigenvalue: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
}

impl RunReport {
    fn absorb(&mut self, r: &SegmentReport) {
        self.max_trace_drift = self.max_trace_drift.max(r.trace_drift);
        self.max_norm_drift = self.max_norm_drift.max(r.norm_drift);
        self.max_purity_increase = self.max_purity_increase.max(r.max_purity_increase);
        if r.min_eigenvalue.is_finite() {
            self.min_eigenvalue = self.min_eigenvalue.min(r.min_eigenvalue);
        }
        self.accepted_steps += r.steps.accepted;
        self.rejected_steps += r.steps.rejected;
        self.rhs_evals += r.steps.rhs_evals;
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub state: QuantumState,
    pub record: MeasurementRecord,
    pub report: RunReport,
}

/// Runs `schedule` on `state`.
///
/// With `noise` the spec's dissipators act during every timed segment and the
/// state is promoted to a density matrix at the first dissipative segment.
/// After each segment the population of the two highest Fock levels is
/// checked against `opts.leakage_tolerance`.
pub fn run_schedule(
    state: QuantumState,
    schedule: &PulseSchedule,
    spec: &SystemSpec,
    opts: &EvolutionOptions,
    noise: bool,
    rng: &mut SimRng,
) -> Result<RunOutput> {
    opts.validate()?;
    if state.layout() != &spec.layout() {
        return Err(Error::Dimension(format!(
            "state layout {} does not match the system {}",
            state.layout(),
            spec.layout()
        )));
    }
    let collapse = if noise { collapse_channels(spec)? } else { Vec::new() };
    let mut run = Runner {
        spec,
        opts,
        collapse,
        rng,
        report: RunReport {
            min_eigenvalue: f64::INFINITY,
            ..Default::default()
        },
        record: MeasurementRecord::default(),
        segment: 0,
    };
    let mut state = state;
    for (i, seg) in schedule.segments().iter().enumerate() {
        run.segment = i;
        state = run.step(state, seg)?;
        let leak = fock_tail_population(&state);
        run.report.max_leakage = run.report.max_leakage.max(leak);
        if leak > opts.leakage_tolerance {
            return Err(Error::Truncation {
                leakage: leak,
                tolerance: opts.leakage_tolerance,
                segment: Some(i),
            });
        }
    }
    Ok(RunOutput {
        state,
        record: run.record,
        report: run.report,
    })
}

struct Runner<'a> {
    spec: &'a SystemSpec,
    opts: &'a EvolutionOptions,
    collapse: Vec<CollapseChannel>,
    rng: &'a mut SimRng,
    report: RunReport,
    record: MeasurementRecord,
    segment: usize,
}

impl Runner<'_> {
    fn step(&mut self, state: QuantumState, seg: &Segment) -> Result<QuantumState> {
        match seg {
            Segment::Free { duration } => self.evolve(state, &[], *duration),
            Segment::Drive(d) => self.evolve(state, std::slice::from_ref(d), d.duration()),
            Segment::Gate(g) => self.instant(&state, g),
            Segment::Conditional { gate, model } => {
                let u = conditional_operator(self.spec, gate)?;
                match *model {
                    GateModel::Ideal => apply_csr(&state, &u),
                    GateModel::Finite { duration } => {
                        let s = self.evolve(state, &[], duration / 2.0)?;
                        let s = apply_csr(&s, &u)?;
                        self.evolve(s, &[], duration / 2.0)
                    }
                }
            }
            Segment::Reset(t) => {
                let pos = self.position(match t {
                    ResetTarget::Cavity => Subsystem::Cavity,
                    ResetTarget::Ancilla => Subsystem::Ancilla,
                    ResetTarget::Qubit(q) => Subsystem::Qubit(*q),
                })?;
                let was_pure = state.is_pure();
                let out = reset_factor(&state, pos)?;
                if was_pure && !out.is_pure() {
                    self.promoted("entangled reset");
                }
                Ok(out)
            }
            Segment::Measure(t) => self.measure(&state, t),
        }
    }

    fn position(&self, s: Subsystem) -> Result<usize> {
        self.spec
            .layout()
            .position(s)
            .ok_or_else(|| Error::Protocol(format!("the system has no {s}")))
    }

    fn promoted(&mut self, why: &str) {
        log::info!("segment {}: promoting to a density matrix ({why})", self.segment);
        self.report.promotions.push(self.segment);
    }

    fn evolve(
        &mut self,
        state: QuantumState,
        drives: &[crate::system::DriveTerm],
        duration: f64,
    ) -> Result<QuantumState> {
        if duration == 0.0 {
            return Ok(state);
        }
        let gen = SegmentGenerator::new(self.spec, drives, &self.collapse, duration)?;
        let (out, rep) = if state.is_pure() && !gen.is_dissipative() {
            evolve_unitary_segment_with_report(&state, &gen, self.opts)?
        } else {
            if state.is_pure() {
                self.promoted("dissipative segment");
            }
            evolve_lindblad_segment_with_report(&state, &gen, self.opts)?
        };
        self.report.absorb(&rep);
        Ok(out)
    }

    fn instant(&mut self, state: &QuantumState, g: &InstantGate) -> Result<QuantumState> {
        let factors: Vec<(usize, CMatrix)> = match g {
            InstantGate::Qubits { targets, op } => {
                let m = op.matrix();
                targets
                    .iter()
                    .map(|&q| Ok((self.position(Subsystem::Qubit(q))?, m.clone())))
                    .collect::<Result<_>>()?
            }
            InstantGate::Ancilla(op) => vec![(self.position(Subsystem::Ancilla)?, op.matrix())],
            InstantGate::Displace(beta) => vec![(
                self.position(Subsystem::Cavity)?,
                displacement_operator(*beta, self.spec.fock_dim)?.into_matrix(),
            )],
        };
        apply_local(state, &factors)
    }

    fn measure(&mut self, state: &QuantumState, t: &MeasureTarget) -> Result<QuantumState> {
        let (out, target, level, eigenvalue, probability) = match t {
            MeasureTarget::Ancilla | MeasureTarget::Qubit(_) => {
                let sub = match t {
                    MeasureTarget::Qubit(q) => Subsystem::Qubit(*q),
                    _ => Subsystem::Ancilla,
                };
                let (s, level, p) = measure_factor(state, self.position(sub)?, self.rng)?;
                (s, sub.to_string(), Some(level), if level == 0 { -1 } else { 1 }, p)
            }
            MeasureTarget::Pauli(p) => {
                let (s, e, prob) = measure_pauli(state, p, self.rng)?;
                (s, p.to_string(), None, e, prob)
            }
        };
        self.record.outcomes.push(MeasurementOutcome {
            segment: self.segment,
            target,
            level,
            eigenvalue,
            probability,
        });
        Ok(out)
    }
}

/// U = Π_cond ⊗ A + (1 − Π_cond) ⊗ 1 on the full system.
pub fn conditional_operator(spec: &SystemSpec, gate: &ConditionalGate) -> Result<Csr> {
    let layout: HilbertLayout = spec.layout();
    let find = |s: Subsystem| {
        layout
            .position(s)
            .ok_or_else(|| Error::Protocol(format!("conditional gate needs a {s}")))
    };
    let (cpos, proj) = match gate.condition {
        Condition::CavityVacuum => (find(Subsystem::Cavity)?, ops::projector(spec.fock_dim, 0)),
        Condition::AncillaGround => (find(Subsystem::Ancilla)?, ops::projector(2, 0)),
    };
    let action: Vec<(usize, CMatrix)> = match gate.action {
        Action::AncillaFlip => vec![(find(Subsystem::Ancilla)?, ops::sigma_x())],
        Action::Displace(b) => vec![(
            find(Subsystem::Cavity)?,
            displacement_operator(b, spec.fock_dim)?.into_matrix(),
        )],
        Action::Rotate { qubit, axis, angle } => {
            let ax = match axis {
                crate::protocols::schedule::Axis::X => 'x',
                crate::protocols::schedule::Axis::Y => 'y',
                crate::protocols::schedule::Axis::Z => 'z',
            };
            vec![(find(Subsystem::Qubit(qubit))?, ops::rotation(ax, angle))]
        }
        Action::Phase(phi) => vec![(cpos, ops::identity(layout.dims()[cpos]) * C64::from_polar(1.0, phi))],
    };
    if !matches!(gate.action, Action::Phase(_)) && action.iter().any(|(p, _)| *p == cpos) {
        return Err(Error::Protocol(
            "conditional action must act on a different subsystem than its condition".into(),
        ));
    }
    let p = Csr::embed(&layout, cpos, &proj);
    let a = local_operator(&layout, &action)?;
    let rest = Csr::identity(layout.total_dim()).sum(&p.scaled(C64::new(-1.0, 0.0)));
    Ok(a.product(&p).sum(&rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::schedule::{Axis, QubitOp};
    use crate::system::DriveTerm;
    use crate::tensorspace::{coherent_state, root_fidelity};

    fn spec() -> SystemSpec {
        SystemSpec::uniform(1, 0.0, 0.0, 12).with_ancilla(0.0)
    }

    #[test]
    fn displace_then_conditional_flip() {
        let spec = spec();
        let layout = spec.layout();
        let mut s = PulseSchedule::new("t");
        s.push(Segment::Gate(InstantGate::Qubits {
            targets: vec![0],
            op: QubitOp::ToZ(Axis::X),
        }));
        s.push(Segment::Conditional {
            gate: ConditionalGate {
                condition: Condition::CavityVacuum,
                action: Action::AncillaFlip,
            },
            model: GateModel::Ideal,
        });
        s.push(Segment::Measure(MeasureTarget::Ancilla));
        let st = QuantumState::basis(&[0, 0, 0], layout).unwrap();
        let mut rng = crate::rng_for(3, 0);
        let out = run_schedule(st, &s, &spec, &EvolutionOptions::default(), false, &mut rng).unwrap();
        let o = out.record.last().unwrap();
        assert_eq!((o.level, o.eigenvalue), (Some(1), 1));
        assert!((o.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_run_promotes_and_resonant_drive_displaces() {
        let spec = SystemSpec::uniform(1, 0.0, 0.0, 14).with_decoherence(1e-4, 1e5, 1e5);
        let layout = spec.layout();
        let alpha = C64::new(1.0, 0.5);
        let mut s = PulseSchedule::new("t");
        s.push(Segment::Drive(DriveTerm::displacement(alpha, 2.0).unwrap()));
        let st = QuantumState::basis(&[0, 0], layout.clone()).unwrap();
        let mut rng = crate::rng_for(0, 0);
        let out = run_schedule(st.clone(), &s, &spec, &EvolutionOptions::default(), true, &mut rng).unwrap();
        assert_eq!(out.report.promotions, vec![0]);
        let target = QuantumState::product(
            &[ops::basis(2, 0), coherent_state(alpha, 14).unwrap()],
            layout,
        )
        .unwrap();
        assert!(root_fidelity(&out.state, &target).unwrap() > 0.999);
        let out = run_schedule(st, &s, &spec, &EvolutionOptions::default(), false, &mut rng).unwrap();
        assert!(out.state.is_pure());
        assert!(root_fidelity(&out.state, &target).unwrap() > 1.0 - 1e-8);
    }

    #[test]
    fn leakage_guard_names_the_segment() {
        let spec = SystemSpec::uniform(1, 0.0, 0.0, 8);
        let mut s = PulseSchedule::new("t");
        s.free(1.0);
        s.push(Segment::Gate(InstantGate::Displace(C64::new(2.5, 0.0))));
        let st = QuantumState::basis(&[0, 0], spec.layout()).unwrap();
        let mut rng = crate::rng_for(0, 0);
        match run_schedule(st, &s, &spec, &EvolutionOptions::default(), false, &mut rng) {
            Err(Error::Truncation { segment, .. }) => assert_eq!(segment, Some(1)),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }
}
