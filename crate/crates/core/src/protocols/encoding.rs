//! Subset-parity encoding onto cavity pointer states.

use std::f64::consts::PI;

use super::schedule::{InstantGate, PulseSchedule, QubitOp, Segment};
use crate::oracle;
use crate::system::{build_qubit_drive, DriveTerm, SystemSpec};
use crate::{Error, Result, C64};

/// Durations of the unconditional pulses (ns); zero means an instantaneous gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseDurations {
    pub displacement: f64,
    pub pi_pulse: f64,
}

impl PulseDurations {
    pub const INSTANT: Self = Self {
        displacement: 0.0,
        pi_pulse: 0.0,
    };

    pub fn uniform(t: f64) -> Self {
        Self {
            displacement: t,
            pi_pulse: t,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, t) in [("displacement", self.displacement), ("pi_pulse", self.pi_pulse)] {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} duration {t} must be ≥ 0")));
            }
        }
        Ok(())
    }
}

impl Default for PulseDurations {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

/// (−i)^m.
pub fn minus_i_pow(m: usize) -> C64 {
    [
        C64::new(1.0, 0.0),
        C64::new(0.0, -1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, 1.0),
    ][m % 4]
}

pub(crate) fn check_subset(spec: &SystemSpec, subset: &[usize]) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(Error::Protocol("empty qubit subset".into()));
    }
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != subset.len() {
        return Err(Error::Protocol("repeated qubit in subset".into()));
    }
    if let Some(&q) = s.iter().find(|&&q| q >= spec.n_qubits) {
        return Err(Error::Protocol(format!(
            "qubit {} outside 1..={}",
            q + 1,
            spec.n_qubits
        )));
    }
    Ok(s)
}

/// Unconditional cavity displacement, as a square pulse or an ideal gate.
pub(crate) fn displacement(beta: C64, duration: f64) -> Result<Segment> {
    Ok(if duration > 0.0 {
        Segment::Drive(DriveTerm::displacement(beta, duration)?)
    } else {
        Segment::Gate(InstantGate::Displace(beta))
    })
}

/// π_x on `targets`, resonant with the n̄-photon line when finite.
pub(crate) fn pi_pulse(spec: &SystemSpec, targets: &[usize], duration: f64, n_bar: f64) -> Result<Segment> {
    Ok(if duration > 0.0 {
        Segment::Drive(build_qubit_drive(spec, targets, PI / duration, duration)?.with_frame_photons(n_bar))
    } else {
        Segment::Gate(InstantGate::Qubits {
            targets: targets.to_vec(),
            op: QubitOp::PiX,
        })
    })
}

/// Echoed dispersive block after the displacement: returns the segments
/// and the time the pointer spends at full amplitude.
fn echo_block(
    spec: &SystemSpec,
    subset: &[usize],
    chi: f64,
    pulses: PulseDurations,
    compensate: bool,
    n_bar: f64,
    sched: &mut PulseSchedule,
) -> Result<()> {
    let t = PI / (2.0 * chi);
    let complement: Vec<usize> = (0..spec.n_qubits).filter(|q| !subset.contains(q)).collect();
    let (td, tp) = (pulses.displacement, pulses.pi_pulse);
    if complement.is_empty() {
        let f = if compensate { t - td / 2.0 } else { t };
        if f < 0.0 {
            return Err(Error::Protocol(format!(
                "displacement pulse of {td} ns does not fit the {t:.3} ns encoding"
            )));
        }
        sched.note("free_1", f);
        sched.free(f);
        return Ok(());
    }
    // A finite pulse acts on average at its midpoint: the displacement
    // contributes half its length, each π pulse its full length.
    let (f1, f2) = if compensate {
        (t / 2.0 - tp - td / 2.0, t / 2.0 - tp)
    } else {
        (t / 2.0, t / 2.0)
    };
    if f1 < 0.0 || f2 < 0.0 {
        return Err(Error::Protocol(format!(
            "pulses ({td} ns, {tp} ns) do not fit the {t:.3} ns encoding"
        )));
    }
    sched.note("free_1", f1);
    sched.note("free_2", f2);
    sched.free(f1);
    sched.push(pi_pulse(spec, &complement, tp, n_bar)?);
    sched.free(f2);
    sched.push(pi_pulse(spec, &complement, tp, n_bar)?);
    Ok(())
}

/// Expected even-parity pointer amplitude after an encoding block that
/// started at amplitude `start` and accumulated Kerr phase over `kerr_time`.
fn pointer_after(start: C64, m: usize, spec: &SystemSpec, kerr_time: f64) -> (C64, f64, f64) {
    let n_bar = start.norm_sqr();
    let (phase, damping) = if n_bar > 0.0 {
        oracle::kerr_correction(n_bar, spec.kerr, kerr_time)
    } else {
        (0.0, 1.0)
    };
    (
        start * minus_i_pow(m) * C64::from_polar(damping, phase),
        phase,
        damping,
    )
}

/// Encodes Z_S of `subset` onto the cavity: D_α, T/2, π_x(complement), T/2, π_x(complement).
///
/// `metadata.alpha` is the expected even-parity pointer amplitude
/// (−i)^M α e^{iΔφ} including the Kerr rotation and damping; the odd branch
/// sits at its negative.
pub fn parity_encoding_schedule(
    spec: &SystemSpec,
    subset: &[usize],
    alpha: C64,
    pulses: PulseDurations,
    compensate: bool,
) -> Result<PulseSchedule> {
    encode_from(spec, subset, alpha, alpha, pulses, compensate, "parity-encoding")
}

/// Shared by encoding and decoding: displaces by `alpha`, after which the
/// even branch sits at `pointer_in` (the odd one at its negative).
pub(crate) fn encode_from(
    spec: &SystemSpec,
    subset: &[usize],
    alpha: C64,
    pointer_in: C64,
    pulses: PulseDurations,
    compensate: bool,
    label: &str,
) -> Result<PulseSchedule> {
    pulses.validate()?;
    let chi = spec.equal_chi().ok_or_else(|| {
        Error::Protocol(
            "parity encoding needs equal dispersive shifts; use unequal_chi_schedule".into(),
        )
    })?;
    if !(chi > 0.0) {
        return Err(Error::Protocol("dispersive shift must be positive".into()));
    }
    let subset = check_subset(spec, subset)?;
    let mut sched = PulseSchedule::new(label);
    sched.metadata.subset = subset.clone();
    let amp = pointer_in;
    let n_bar = amp.norm_sqr();
    sched.push(displacement(alpha, pulses.displacement)?);
    echo_block(spec, &subset, chi, pulses, compensate, n_bar, &mut sched)?;
    let total = sched.total_duration();
    let kerr_time = total - pulses.displacement / 2.0;
    let (pointer, phase, damping) = pointer_after(amp, subset.len(), spec, kerr_time);
    sched.note("dispersive_time", PI / (2.0 * chi));
    sched.note("total", total);
    sched.note("kerr_time", kerr_time);
    sched.note("kerr_phase", phase);
    sched.note("kerr_damping", damping);
    sched.metadata.alpha = Some(pointer);
    Ok(sched)
}

/// Delay t_j between the two flips of subset qubit j: χ_j (T − 2t_j) = π/2.
pub fn unequal_chi_delays(spec: &SystemSpec, subset: &[usize], total: f64) -> Result<Vec<(usize, f64)>> {
    let subset = check_subset(spec, subset)?;
    let mut out = Vec::with_capacity(subset.len());
    for &j in &subset {
        let chi = spec.chi[j];
        if !(chi > 0.0) {
            return Err(Error::Protocol(format!("qubit {} has non-positive χ", j + 1)));
        }
        let t = total / 2.0 - PI / (4.0 * chi);
        if t < -1e-9 {
            return Err(Error::Protocol(format!(
                "T = {total} ns is below π/(2χ) = {:.3} ns for qubit {}",
                PI / (2.0 * chi),
                j + 1
            )));
        }
        out.push((j, t.max(0.0)));
    }
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(out)
}

/// Nested bit-flip sequence encoding Z_S for arbitrary dispersive shifts
/// (instantaneous flips, delays sorted by increasing t_j).
///
/// Each subset qubit j is flipped at (T − t_j)/2 and (T + t_j)/2; the
/// complement is flipped at T/2 and T.
pub fn unequal_chi_schedule(spec: &SystemSpec, subset: &[usize], total: f64) -> Result<PulseSchedule> {
    let delays = unequal_chi_delays(spec, subset, total)?;
    let subset: Vec<usize> = {
        let mut s: Vec<usize> = delays.iter().map(|d| d.0).collect();
        s.sort_unstable();
        s
    };
    let complement: Vec<usize> = (0..spec.n_qubits).filter(|q| !subset.contains(q)).collect();
    // (time, qubits flipped) events
    let mut events: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut add = |t: f64, q: &[usize]| {
        if q.is_empty() {
            return;
        }
        match events.iter_mut().find(|e| (e.0 - t).abs() < 1e-12) {
            Some(e) => e.1.extend_from_slice(q),
            None => events.push((t, q.to_vec())),
        }
    };
    for &(j, t) in &delays {
        add((total - t) / 2.0, &[j]);
        add((total + t) / 2.0, &[j]);
    }
    add(total / 2.0, &complement);
    add(total, &complement);
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut sched = PulseSchedule::new("unequal-chi-encoding");
    sched.metadata.subset = subset;
    let mut now = 0.0;
    for (t, mut qubits) in events {
        if t - now > 1e-12 {
            sched.free(t - now);
            now = t;
        }
        // a qubit listed twice at the same instant is flipped back
        qubits.sort_unstable();
        let mut net = Vec::new();
        for q in qubits {
            if net.last() == Some(&q) {
                net.pop();
            } else {
                net.push(q);
            }
        }
        if !net.is_empty() {
            sched.push(Segment::Gate(InstantGate::Qubits {
                targets: net,
                op: QubitOp::X,
            }));
        }
    }
    if total - now > 1e-12 {
        sched.free(total - now);
    }
    for (j, t) in delays {
        sched.note(format!("t_q{}", j + 1), t);
    }
    sched.note("total", total);
    Ok(sched)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::mhz;

    #[test]
    fn fig2_layout_and_timing() {
        let spec = SystemSpec::uniform(4, mhz(5.0), 0.0, 20);
        let s = parity_encoding_schedule(&spec, &[1, 3], C64::new(2.0, 0.0), PulseDurations::INSTANT, true).unwrap();
        let kinds: Vec<_> = s.segments().iter().map(|s| match s {
            Segment::Free { duration } => format!("free {duration:.6}"),
            Segment::Gate(InstantGate::Qubits { targets, .. }) => format!("pi {targets:?}"),
            Segment::Gate(InstantGate::Displace(_)) => "D".into(),
            _ => "?".into(),
        }).collect();
        assert_eq!(kinds, ["D", "free 25.000000", "pi [0, 2]", "free 25.000000", "pi [0, 2]"]);
        assert!((s.total_duration() - 50.0).abs() < 1e-12);
        assert!((s.metadata.alpha.unwrap() - C64::new(-2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn compensation_shortens_free_segments() {
        let spec = SystemSpec::uniform(4, mhz(5.0), 0.0, 20);
        let s = parity_encoding_schedule(&spec, &[1, 3], C64::new(2.0, 0.0), PulseDurations::uniform(1.0), true).unwrap();
        assert!((s.ledger_value("free_1").unwrap() - 23.5).abs() < 1e-12);
        assert!((s.ledger_value("free_2").unwrap() - 24.0).abs() < 1e-12);
        assert!((s.total_duration() - 50.5).abs() < 1e-12);
        let s = parity_encoding_schedule(&spec, &[1, 3], C64::new(2.0, 0.0), PulseDurations::uniform(1.0), false).unwrap();
        assert!((s.total_duration() - 53.0).abs() < 1e-12);
    }

    #[test]
    fn full_subset_has_no_flips() {
        let spec = SystemSpec::uniform(3, mhz(5.0), 0.0, 20);
        let s = parity_encoding_schedule(&spec, &[0, 1, 2], C64::new(1.0, 0.0), PulseDurations::INSTANT, true).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.metadata.alpha.unwrap() - C64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn unequal_chi_is_rejected_by_the_echo_builder() {
        let mut spec = SystemSpec::uniform(2, mhz(5.0), 0.0, 20);
        spec.chi[1] = mhz(2.5);
        let err = parity_encoding_schedule(&spec, &[0], C64::new(1.0, 0.0), PulseDurations::INSTANT, true).unwrap_err();
        assert!(err.to_string().contains("unequal_chi_schedule"));
    }

    #[test]
    fn unequal_delays() {
        let mut spec = SystemSpec::uniform(3, mhz(5.0), 0.0, 20);
        spec.chi[1] = mhz(2.5);
        let d = unequal_chi_delays(&spec, &[0, 1], 100.0).unwrap();
        assert_eq!(d[0].0, 1);
        assert!(d[0].1.abs() < 1e-9);
        assert!((d[1].1 - 25.0).abs() < 1e-9);
        assert!(unequal_chi_delays(&spec, &[1], 99.0).is_err());
        let s = unequal_chi_schedule(&spec, &[0, 1], 100.0).unwrap();
        assert!((s.total_duration() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn equal_chi_unequal_schedule_degenerates_to_echo() {
        let spec = SystemSpec::uniform(4, mhz(5.0), 0.0, 20);
        let s = unequal_chi_schedule(&spec, &[1, 3], 50.0).unwrap();
        let flips: Vec<_> = s.segments().iter().filter_map(|s| match s {
            Segment::Gate(InstantGate::Qubits { targets, .. }) => Some(targets.clone()),
            _ => None,
        }).collect();
        assert_eq!(flips, vec![vec![0, 2], vec![0, 2]]);
    }
}
