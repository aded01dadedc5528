//! Protocols composed from encoding and readout: Pauli measurement,
//! simulated Pauli rotations and stabilizer pumping.

use super::encoding::{encode_from, parity_encoding_schedule, PulseDurations};
use super::readout::readout_mapping_unmeasured;
use super::schedule::{
    Action, Axis, Condition, ConditionalGate, GateModel, InstantGate, MeasureTarget, PulseSchedule,
    QubitOp, ResetTarget, Segment,
};
use crate::stabilizer::{Pauli, PauliString};
use crate::system::SystemSpec;
use crate::{Error, Result, C64};

/// Z-type image of a Hermitian Pauli string.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisChange {
    /// Support (zero-based) of the string.
    pub subset: Vec<usize>,
    /// ±1 sign of the string.
    pub sign: i8,
    pub to_z: Vec<Segment>,
    pub from_z: Vec<Segment>,
}

/// Single-qubit Cliffords mapping `p` onto ±Z_S.
pub fn basis_change(p: &PauliString) -> Result<BasisChange> {
    if p.is_identity() {
        return Err(Error::Protocol("identity Pauli string".into()));
    }
    let sign = match p.phase() {
        0 => 1,
        2 => -1,
        _ => return Err(Error::Protocol(format!("{p} is not Hermitian"))),
    };
    let mut to_z = Vec::new();
    let mut from_z = Vec::new();
    for (kind, axis) in [(Pauli::X, Axis::X), (Pauli::Y, Axis::Y)] {
        let targets: Vec<usize> = p.support().into_iter().filter(|&q| p.factor(q) == kind).collect();
        if !targets.is_empty() {
            to_z.push(Segment::Gate(InstantGate::Qubits {
                targets: targets.clone(),
                op: QubitOp::ToZ(axis),
            }));
            from_z.push(Segment::Gate(InstantGate::Qubits {
                targets,
                op: QubitOp::FromZ(axis),
            }));
        }
    }
    Ok(BasisChange {
        subset: p.support(),
        sign,
        to_z,
        from_z,
    })
}

fn check_qubits(spec: &SystemSpec, p: &PauliString) -> Result<()> {
    if p.n() != spec.n_qubits {
        return Err(Error::Protocol(format!(
            "{}-qubit Pauli string on a {}-qubit system",
            p.n(),
            spec.n_qubits
        )));
    }
    Ok(())
}

/// Full ancilla-mediated measurement of `p`: basis change, encoding, readout
/// mapping, ancilla measurement, ancilla and cavity reset, inverse basis change.
///
/// The ancilla outcome g means eigenvalue +sign, e means −sign.
pub fn pauli_measurement_schedule(
    spec: &SystemSpec,
    p: &PauliString,
    alpha: C64,
    pulses: PulseDurations,
) -> Result<PulseSchedule> {
    check_qubits(spec, p)?;
    let bc = basis_change(p)?;
    let enc = parity_encoding_schedule(spec, &bc.subset, alpha, pulses, true)?;
    let pointer = enc.metadata.alpha.expect("encoding records its pointer");
    let readout = readout_mapping_unmeasured(spec, pointer)?;
    let mut s = PulseSchedule::new(format!("measure {p}"));
    s.metadata = enc.metadata.clone();
    for g in &bc.to_z {
        s.push(g.clone());
    }
    s.extend(&enc);
    s.extend(&readout);
    s.push(Segment::Measure(MeasureTarget::Ancilla));
    s.push(Segment::Reset(ResetTarget::Ancilla));
    s.push(Segment::Reset(ResetTarget::Cavity));
    for g in &bc.from_z {
        s.push(g.clone());
    }
    s.note("sign", f64::from(bc.sign));
    Ok(s)
}

/// e^{−iθQ} (up to the global phase e^{iθ}) via encoding, a vacuum-conditioned
/// phase e^{2iθ}, decoding with α → −α̃ and a Kerr-corrected return displacement.
///
/// Only the first displacement (from the vacuum) and the π pulses take their
/// finite durations. D(α̃), the decoding D(−α̃) and the return act on a loaded
/// cavity and are instantaneous: a finite pulse there imprints a geometric
/// phase ~|β||γ|χAT/2 that depends on the magnetization of all qubits.
pub fn simulated_pauli_rotation(
    spec: &SystemSpec,
    p: &PauliString,
    theta: f64,
    alpha: C64,
    pulses: PulseDurations,
) -> Result<PulseSchedule> {
    if !spec.has_ancilla() {
        return Err(Error::Protocol("simulated rotations need an ancilla qubit".into()));
    }
    check_qubits(spec, p)?;
    let bc = basis_change(p)?;
    // e^{−iθ(−Q)} = e^{−i(−θ)Q}
    let theta = theta * f64::from(bc.sign);
    let enc = parity_encoding_schedule(spec, &bc.subset, alpha, pulses, true)?;
    let pointer = enc.metadata.alpha.expect("encoding records its pointer");
    let m = bc.subset.len();
    let loaded = PulseDurations {
        displacement: 0.0,
        ..pulses
    };

    let mut s = PulseSchedule::new(format!("rotate {p} by {theta}"));
    s.metadata.subset = bc.subset.clone();
    s.metadata.alpha = Some(alpha);
    for g in &bc.to_z {
        s.push(g.clone());
    }
    s.extend(&enc);
    s.push(super::encoding::displacement(pointer, loaded.displacement)?);
    s.push(Segment::Conditional {
        gate: ConditionalGate {
            condition: Condition::CavityVacuum,
            action: Action::Phase(2.0 * theta),
        },
        model: GateModel::Ideal,
    });
    // branches now at 2α̃ (even) and 0 (odd); D(−α̃) brings them to ±α̃
    let dec = encode_from(spec, &bc.subset, -pointer, pointer, loaded, true, "decode")?;
    s.extend(&dec);
    // Both branches end at α(−1)^M rotated by the Kerr phase of the encode
    // and decode blocks together.
    let (enc_time, dec_time) = (
        enc.ledger_value("kerr_time").unwrap_or(0.0),
        dec.ledger_value("kerr_time").unwrap_or(0.0),
    );
    let n_bar = alpha.norm_sqr();
    let (phase, damping) = if spec.kerr != 0.0 {
        crate::oracle::kerr_correction(n_bar, spec.kerr, enc_time + dec_time)
    } else {
        (0.0, 1.0)
    };
    let home = alpha * super::encoding::minus_i_pow(2 * m) * C64::from_polar(damping, phase);
    s.push(super::encoding::displacement(-home, loaded.displacement)?);
    for g in &bc.from_z {
        s.push(g.clone());
    }
    s.note("kerr_phase_total", phase);
    s.note("kerr_damping_total", damping);
    Ok(s)
}

/// One pumping cycle towards the +1 eigenspace of Z_S:
/// encoding, D(α̃), vacuum-conditioned R_x(θ) on `pump_qubit`, cavity reset.
pub fn stabilizer_pump_cycle(
    spec: &SystemSpec,
    subset: &[usize],
    pump_qubit: usize,
    theta: f64,
    alpha: C64,
    pulses: PulseDurations,
) -> Result<PulseSchedule> {
    if !subset.contains(&pump_qubit) {
        return Err(Error::Protocol(format!(
            "pump qubit {} is not in the subset, so σˣ would commute with Z_S",
            pump_qubit + 1
        )));
    }
    let enc = parity_encoding_schedule(spec, subset, alpha, pulses, true)?;
    let pointer = enc.metadata.alpha.expect("encoding records its pointer");
    let mut s = PulseSchedule::new("pump-cycle");
    s.metadata = enc.metadata.clone();
    s.extend(&enc);
    // loaded cavity: instantaneous, as in the rotation
    s.push(super::encoding::displacement(pointer, 0.0)?);
    s.push(Segment::Conditional {
        gate: ConditionalGate {
            condition: Condition::CavityVacuum,
            action: Action::Rotate {
                qubit: pump_qubit,
                axis: Axis::X,
                angle: theta,
            },
        },
        model: GateModel::Ideal,
    });
    s.push(Segment::Reset(ResetTarget::Cavity));
    Ok(s)
}
