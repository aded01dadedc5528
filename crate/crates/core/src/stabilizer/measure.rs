//! Stabilizer measurement (ideal or through the full cavity protocol),
//! measurement-based state preparation and single-qubit parity ratios.

use super::code::{erasure_code, erasure_codewords, toric_code_generators, StabilizerCode};
use super::pauli::{Pauli, PauliString};
use crate::dynamics::{
    apply_csr, apply_local, measure_pauli, run_schedule, Csr, EvolutionOptions, RunReport,
};
use crate::protocols::{
    ancilla_parity, cavity_reset, pauli_measurement_schedule, simulated_pauli_rotation,
    PulseDurations,
};
use crate::system::SystemSpec;
use crate::tensorspace::{ops, partial_trace, HilbertLayout, QuantumState};
use crate::{Error, Result, SimRng, C64};

/// Parameters of the ancilla-mediated protocol.
#[derive(Clone, Copy, Debug)]
pub struct ProtocolSettings<'a> {
    pub spec: &'a SystemSpec,
    pub alpha: C64,
    pub pulses: PulseDurations,
    pub opts: &'a EvolutionOptions,
    /// Apply the spec's dissipators during timed segments.
    pub noise: bool,
}

#[derive(Clone, Copy, Debug)]
pub enum MeasurementMode<'a> {
    /// Projective measurement with Born-rule sampling.
    Ideal,
    /// Basis change, parity encoding, readout mapping, ancilla measurement and resets.
    FullProtocol(ProtocolSettings<'a>),
}

#[derive(Clone, Debug)]
pub struct StabilizerMeasurement {
    pub eigenvalue: i8,
    pub probability: f64,
    pub state: QuantumState,
    /// Diagnostics of the protocol run (default for ideal measurements).
    pub report: RunReport,
}

/// Measures the Hermitian Pauli string `p` on `state`.
pub fn measure_stabilizer(
    state: &QuantumState,
    p: &PauliString,
    mode: MeasurementMode<'_>,
    rng: &mut SimRng,
) -> Result<StabilizerMeasurement> {
    if !p.is_hermitian() {
        return Err(Error::InvalidParameter(format!("{p} is not Hermitian")));
    }
    match mode {
        MeasurementMode::Ideal => {
            let (state, eigenvalue, probability) = measure_pauli(state, p, rng)?;
            Ok(StabilizerMeasurement {
                eigenvalue,
                probability,
                state,
                report: RunReport::default(),
            })
        }
        MeasurementMode::FullProtocol(cfg) => {
            if !cfg.spec.has_ancilla() {
                return Err(Error::Protocol("full-protocol measurement needs an ancilla".into()));
            }
            let schedule = pauli_measurement_schedule(cfg.spec, p, cfg.alpha, cfg.pulses)?;
            let sign = schedule.ledger_value("sign").unwrap_or(1.0);
            let out = run_schedule(state.clone(), &schedule, cfg.spec, cfg.opts, cfg.noise, rng)?;
            let parity = ancilla_parity(&out.record)
                .ok_or_else(|| Error::Protocol("schedule recorded no ancilla outcome".into()))?;
            let probability = out.record.last().map_or(1.0, |o| o.probability);
            Ok(StabilizerMeasurement {
                eigenvalue: if sign < 0.0 { -parity } else { parity },
                probability,
                state: out.state,
                report: out.report,
            })
        }
    }
}

/// e^{−iθP} as a sparse operator on `layout` (θ → −θ for a −1 phase is implicit
/// in the Pauli action).
pub fn pauli_exponential(p: &PauliString, theta: f64, layout: &HilbertLayout) -> Result<Csr> {
    if !p.is_hermitian() {
        return Err(Error::InvalidParameter(format!("{p} is not Hermitian")));
    }
    let (perm, phases) = p.action(layout)?;
    let (c, s) = (theta.cos(), theta.sin());
    let mut trips = Vec::with_capacity(2 * perm.len());
    for (i, (&j, &ph)) in perm.iter().zip(&phases).enumerate() {
        trips.push((i, i, C64::new(c, 0.0)));
        trips.push((j, i, ph * C64::new(0.0, -s)));
    }
    Ok(Csr::from_triplets(layout.total_dim(), trips))
}

/// One step of a measurement-with-feedback sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackStep {
    pub measured: String,
    pub eigenvalue: i8,
    pub probability: f64,
    /// Correction applied because the outcome was −1.
    pub correction: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Preparation {
    pub state: QuantumState,
    pub steps: Vec<FeedbackStep>,
    pub report: RunReport,
}

fn merge(into: &mut RunReport, r: &RunReport) {
    into.max_trace_drift = into.max_trace_drift.max(r.max_trace_drift);
    into.max_norm_drift = into.max_norm_drift.max(r.max_norm_drift);
    into.max_purity_increase = into.max_purity_increase.max(r.max_purity_increase);
    into.max_leakage = into.max_leakage.max(r.max_leakage);
    into.min_eigenvalue = into.min_eigenvalue.min(r.min_eigenvalue);
    into.accepted_steps += r.accepted_steps;
    into.rejected_steps += r.rejected_steps;
    into.rhs_evals += r.rhs_evals;
    into.promotions.extend(&r.promotions);
}

fn empty_report() -> RunReport {
    RunReport {
        min_eigenvalue: f64::INFINITY,
        ..Default::default()
    }
}

/// Instantaneous σ_z on qubit `q` (zero-based).
fn apply_z(state: &QuantumState, q: usize) -> Result<QuantumState> {
    let pos = state
        .layout()
        .qubit(q)
        .ok_or_else(|| Error::Dimension(format!("no qubit {}", q + 1)))?;
    apply_local(state, &[(pos, ops::sigma_z())])
}

/// Logical state e^{−iθX̄}|+⟩ of the erasure code prepared from |gggg⟩:
/// measure X1X2 (Z1 on −1), measure X3X4 (Z3 on −1), reset the cavity,
/// rotate about X̄ = Z1Z3.
///
/// Ideal mode works on any layout with four qubits and applies the rotation
/// exactly; the full protocol runs every step on `spec`'s layout.
pub fn prepare_erasure_logical(
    spec: &SystemSpec,
    mode: MeasurementMode<'_>,
    theta: f64,
    rng: &mut SimRng,
) -> Result<Preparation> {
    if spec.n_qubits != 4 {
        return Err(Error::Protocol(format!(
            "the erasure code needs 4 qubits, spec has {}",
            spec.n_qubits
        )));
    }
    let layout = spec.layout();
    let mut state = QuantumState::basis(&vec![0; layout.len()], layout.clone())?;
    let mut steps = Vec::new();
    let mut report = empty_report();
    for (text, fix) in [("X1X2", 0), ("X3X4", 2)] {
        let p = PauliString::parse(text, 4)?;
        let m = measure_stabilizer(&state, &p, mode, rng)?;
        merge(&mut report, &m.report);
        state = m.state;
        let mut correction = None;
        if m.eigenvalue < 0 {
            state = apply_z(&state, fix)?;
            correction = Some(format!("Z{}", fix + 1));
        }
        steps.push(FeedbackStep {
            measured: text.into(),
            eigenvalue: m.eigenvalue,
            probability: m.probability,
            correction,
        });
    }
    if layout.cavity().is_some() {
        state = cavity_reset(&state)?;
    }
    let x_bar = erasure_code().logical("X").expect("erasure code has X̄").clone();
    match mode {
        MeasurementMode::Ideal => {
            state = apply_csr(&state, &pauli_exponential(&x_bar, theta, &layout)?)?;
        }
        MeasurementMode::FullProtocol(cfg) => {
            let s = simulated_pauli_rotation(cfg.spec, &x_bar, theta, cfg.alpha, cfg.pulses)?;
            let out = run_schedule(state, &s, cfg.spec, cfg.opts, cfg.noise, rng)?;
            merge(&mut report, &out.report);
            state = out.state;
        }
    }
    Ok(Preparation { state, steps, report })
}

/// Target e^{−iθX̄}|+⟩ = cos θ|+⟩ − i sin θ|−⟩ on four qubits.
pub fn erasure_target(theta: f64) -> QuantumState {
    let (plus, minus) = erasure_codewords();
    let v = plus * C64::new(theta.cos(), 0.0) + minus * C64::new(0.0, -theta.sin());
    QuantumState::pure(v, HilbertLayout::qubits(4)).expect("normalized codeword")
}

/// Reduced state of the qubits only.
pub fn qubit_reduced(state: &QuantumState) -> Result<QuantumState> {
    let layout = state.layout();
    let keep: Vec<usize> = (0..layout.n_qubits())
        .map(|q| layout.qubit(q).expect("qubit positions are contiguous"))
        .collect();
    if keep.len() == layout.len() {
        return Ok(state.clone());
    }
    partial_trace(state, &keep)
}

/// σ_z eigenvalue of qubit `i` from two full-protocol parity measurements:
/// P_tot = Z on all qubits, P_comp = Z on all but `i`; returns P_tot·P_comp.
pub fn single_qubit_parity_via_ratio(
    state: &QuantumState,
    i: usize,
    cfg: ProtocolSettings<'_>,
    rng: &mut SimRng,
) -> Result<(i8, QuantumState)> {
    let n = cfg.spec.n_qubits;
    if i >= n {
        return Err(Error::InvalidParameter(format!("qubit {} outside 1..={n}", i + 1)));
    }
    let all: Vec<usize> = (0..n).collect();
    let p_tot = PauliString::uniform(n, Pauli::Z, &all)?;
    let tot = measure_stabilizer(state, &p_tot, MeasurementMode::FullProtocol(cfg), rng)?;
    let comp: Vec<usize> = all.into_iter().filter(|&q| q != i).collect();
    if comp.is_empty() {
        return Ok((tot.eigenvalue, tot.state));
    }
    let p_comp = PauliString::uniform(n, Pauli::Z, &comp)?;
    let c = measure_stabilizer(&tot.state, &p_comp, MeasurementMode::FullProtocol(cfg), rng)?;
    Ok((tot.eigenvalue * c.eigenvalue, c.state))
}

#[derive(Clone, Debug)]
pub struct ToricPreparation {
    pub code: StabilizerCode,
    pub state: QuantumState,
    pub steps: Vec<FeedbackStep>,
}

/// Toric-code ground state from |g…g⟩ by measuring the stars in order and
/// fixing each −1 with a Z on an edge shared with a star not yet measured.
///
/// |g…g⟩ already satisfies every plaquette; the last star's outcome is
/// fixed by the product constraint.
pub fn toric_ground_state(rows: usize, cols: usize, rng: &mut SimRng) -> Result<ToricPreparation> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidParameter(
            "measure-and-correct needs a lattice of at least 2×2".into(),
        ));
    }
    let code = toric_code_generators(rows, cols)?;
    let n = code.n;
    let layout = HilbertLayout::qubits(n);
    let mut state = QuantumState::basis(&vec![0; n], layout)?;
    let stars: Vec<(String, PauliString)> = code
        .generators
        .iter()
        .filter(|(_, g)| g.factor(g.support()[0]) == Pauli::X)
        .cloned()
        .collect();
    let mut steps = Vec::new();
    for (k, (name, s)) in stars.iter().enumerate() {
        let m = measure_stabilizer(&state, s, MeasurementMode::Ideal, rng)?;
        state = m.state;
        let mut correction = None;
        if m.eigenvalue < 0 {
            let q = s
                .support()
                .into_iter()
                .find(|&q| stars[k + 1..].iter().any(|(_, t)| t.x_bits()[q]))
                .ok_or_else(|| Error::Numerical(format!("star {name} is −1 after all others were fixed")))?;
            state = apply_z(&state, q)?;
            correction = Some(format!("Z{}", q + 1));
        }
        steps.push(FeedbackStep {
            measured: name.clone(),
            eigenvalue: m.eigenvalue,
            probability: m.probability,
            correction,
        });
    }
    Ok(ToricPreparation { code, state, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorspace::{expm, state_fidelity};

    #[test]
    fn ideal_measurement_examples() {
        let mut rng = crate::rng_for(1, 0);
        let l = HilbertLayout::qubits(4);
        let s = QuantumState::basis(&[0, 0, 0, 0], l.clone()).unwrap();
        let m = measure_stabilizer(&s, &"Z1Z2".parse::<PauliString>().unwrap(), MeasurementMode::Ideal, &mut rng).unwrap();
        assert_eq!(m.eigenvalue, 1);
        assert!((m.probability - 1.0).abs() < 1e-14);
        let p = PauliString::parse("X1X2", 4).unwrap();
        let m = measure_stabilizer(&s, &p, MeasurementMode::Ideal, &mut rng).unwrap();
        assert!((m.probability - 0.5).abs() < 1e-14);
        assert!((p.expectation(&m.state).unwrap() - f64::from(m.eigenvalue)).abs() < 1e-14);
    }

    #[test]
    fn exponential_matches_dense() {
        let l = HilbertLayout::qubits(3);
        for (text, theta) in [("X1Y2", 0.3), ("-Z1Z3", 1.1), ("Y3", -0.7)] {
            let p: PauliString = text.parse().unwrap();
            let dense = expm(&(p.embed(&l).unwrap().matrix() * C64::new(0.0, -theta)));
            let sparse = pauli_exponential(&p, theta, &l).unwrap().to_dense();
            assert!((dense - sparse).norm() < 1e-13, "{text}");
        }
    }

    #[test]
    fn erasure_ideal_preparation() {
        let spec = SystemSpec::uniform(4, 1.0, 0.0, 4);
        for seed in 0..8 {
            let mut rng = crate::rng_for(seed, 0);
            for theta in [0.0, std::f64::consts::PI / 8.0] {
                let prep = prepare_erasure_logical(&spec, MeasurementMode::Ideal, theta, &mut rng).unwrap();
                let rho = qubit_reduced(&prep.state).unwrap();
                let f = state_fidelity(&rho, &erasure_target(theta)).unwrap();
                assert!((f - 1.0).abs() < 1e-10, "seed {seed}: {f}");
            }
        }
    }

    #[test]
    fn toric_ground_state_satisfies_generators() {
        let mut rng = crate::rng_for(3, 0);
        let prep = toric_ground_state(2, 2, &mut rng).unwrap();
        for (name, g) in &prep.code.generators {
            let v = g.expectation(&prep.state).unwrap();
            assert!((v - 1.0).abs() < 1e-12, "{name}: {v}");
        }
        assert!(toric_ground_state(1, 2, &mut rng).is_err());
    }
}
