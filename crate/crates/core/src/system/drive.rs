use super::spec::SystemSpec;
use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq)]
pub enum DriveTarget {
    Cavity,
    /// Zero-based system-qubit indices driven simultaneously.
    Qubits(Vec<usize>),
}

/// Pulse envelope. Only square pulses are implemented.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Envelope {
    Square {
        amplitude: f64,
        start: f64,
        duration: f64,
        phase: f64,
    },
}

impl Envelope {
    pub fn duration(&self) -> f64 {
        match *self {
            Envelope::Square { duration, .. } => duration,
        }
    }

    pub fn start(&self) -> f64 {
        match *self {
            Envelope::Square { start, .. } => start,
        }
    }

    /// Complex amplitude at absolute time `t` (zero outside the pulse).
    pub fn value(&self, t: f64) -> C64 {
        match *self {
            Envelope::Square {
                amplitude,
                start,
                duration,
                phase,
            } => {
                if t >= start && t <= start + duration {
                    C64::from_polar(amplitude, phase)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
        }
    }

    /// Amplitude inside the pulse.
    pub fn peak(&self) -> C64 {
        match *self {
            Envelope::Square { amplitude, phase, .. } => C64::from_polar(amplitude, phase),
        }
    }

    fn with_start(self, t: f64) -> Self {
        match self {
            Envelope::Square {
                amplitude,
                duration,
                phase,
                ..
            } => Envelope::Square {
                amplitude,
                start: t,
                duration,
                phase,
            },
        }
    }
}

/// A drive term of the Hamiltonian.
///
/// Cavity: H_d = ε(t) e^{−iδt} a† + h.c.
/// Qubits: H_d = Σ_{i ∈ targets} ε(t) e^{−iδt} σᵢ⁺ + h.c., so a real ε equals Ω/2.
#[derive(Clone, Debug, PartialEq)]
pub struct DriveTerm {
    pub target: DriveTarget,
    pub envelope: Envelope,
    pub detuning: f64,
    /// Photon number n̄ of the frame used for driven qubits: their dispersive
    /// term becomes χ σᶻ (a†a − n̄) while the pulse is on.
    pub frame_photons: f64,
}

impl DriveTerm {
    pub fn duration(&self) -> f64 {
        self.envelope.duration()
    }

    pub fn with_start(mut self, t: f64) -> Self {
        self.envelope = self.envelope.with_start(t);
        self
    }

    pub fn with_frame_photons(mut self, n_bar: f64) -> Self {
        self.frame_photons = n_bar;
        self
    }

    /// Resonant square cavity pulse taking the vacuum to |α⟩ when χ = 0:
    /// ε = iα/T, so that −iεT = α.
    pub fn displacement(alpha: C64, duration: f64) -> Result<Self> {
        check_duration(duration)?;
        let eps = C64::i() * alpha / duration;
        Ok(Self {
            target: DriveTarget::Cavity,
            envelope: Envelope::Square {
                amplitude: eps.norm(),
                start: 0.0,
                duration,
                phase: eps.arg(),
            },
            detuning: 0.0,
            frame_photons: 0.0,
        })
    }

    /// Complex amplitude multiplying the raising operator in the pulse.
    pub fn raising_amplitude(&self) -> C64 {
        self.envelope.peak()
    }

    pub fn qubit_targets(&self) -> &[usize] {
        match &self.target {
            DriveTarget::Qubits(t) => t,
            DriveTarget::Cavity => &[],
        }
    }
}

fn check_duration(duration: f64) -> Result<()> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidParameter(format!("drive duration {duration} must be > 0")));
    }
    Ok(())
}

/// Square cavity drive ε₀(a e^{iδt} + a† e^{−iδt}) with real ε₀.
pub fn build_cavity_drive(
    _spec: &SystemSpec,
    amplitude: f64,
    duration: f64,
    detuning: f64,
) -> Result<DriveTerm> {
    check_duration(duration)?;
    if !amplitude.is_finite() || !detuning.is_finite() {
        return Err(Error::InvalidParameter("non-finite drive amplitude".into()));
    }
    Ok(DriveTerm {
        target: DriveTarget::Cavity,
        envelope: Envelope::Square {
            amplitude,
            start: 0.0,
            duration,
            phase: 0.0,
        },
        detuning,
        frame_photons: 0.0,
    })
}

/// Simultaneous square drive Σ (Ω/2) σᵢˣ on `targets`.
///
/// Use [`DriveTerm::with_frame_photons`] to set the n̄ the pulse is resonant with.
pub fn build_qubit_drive(
    spec: &SystemSpec,
    targets: &[usize],
    rabi: f64,
    duration: f64,
) -> Result<DriveTerm> {
    check_duration(duration)?;
    if targets.is_empty() {
        return Err(Error::InvalidParameter("qubit drive without targets".into()));
    }
    if !rabi.is_finite() {
        return Err(Error::InvalidParameter("non-finite Rabi frequency".into()));
    }
    let mut sorted = targets.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter(
            "overlapping simultaneous drives on the same qubit".into(),
        ));
    }
    if let Some(&q) = sorted.iter().find(|&&q| q >= spec.n_qubits) {
        return Err(Error::InvalidParameter(format!("qubit index {q} out of range")));
    }
    Ok(DriveTerm {
        target: DriveTarget::Qubits(sorted),
        envelope: Envelope::Square {
            amplitude: rabi / 2.0,
            start: 0.0,
            duration,
            phase: 0.0,
        },
        detuning: 0.0,
        frame_photons: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displacement_amplitude() {
        let d = DriveTerm::displacement(C64::new(2.0, 0.0), 1.0).unwrap();
        assert!((d.raising_amplitude() - C64::new(0.0, 2.0)).norm() < 1e-15);
        assert!((d.raising_amplitude().norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn qubit_drive_checks() {
        let spec = SystemSpec::uniform(3, 0.0, 0.0, 4);
        assert!(build_qubit_drive(&spec, &[0, 0], 1.0, 1.0).is_err());
        assert!(build_qubit_drive(&spec, &[], 1.0, 1.0).is_err());
        assert!(build_qubit_drive(&spec, &[3], 1.0, 1.0).is_err());
        assert!(build_qubit_drive(&spec, &[0], 1.0, 0.0).is_err());
        let d = build_qubit_drive(&spec, &[2, 0], 3.0, 1.0).unwrap();
        assert_eq!(d.qubit_targets(), &[0, 2]);
        assert_eq!(d.raising_amplitude(), C64::new(1.5, 0.0));
    }

    #[test]
    fn envelope_window() {
        let d = build_cavity_drive(&SystemSpec::uniform(1, 0.0, 0.0, 4), 2.0, 1.0, 0.0)
            .unwrap()
            .with_start(3.0);
        assert_eq!(d.envelope.value(2.9), C64::new(0.0, 0.0));
        assert_eq!(d.envelope.value(3.5), C64::new(2.0, 0.0));
    }
}
