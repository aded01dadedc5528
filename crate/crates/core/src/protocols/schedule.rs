//! Pulse-schedule data model and its plain-text timeline format.

use std::fmt::Write as _;

use crate::stabilizer::PauliString;
use crate::system::{DriveTarget, DriveTerm, Envelope};
use crate::tensorspace::ops;
use crate::{CMatrix, Error, Result, C64};

/// Rotation axis of single-qubit gates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn as_char(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            _ => Err(timeline_err(format!("unknown axis {s:?}"))),
        }
    }
}

/// Instantaneous single-qubit unitaries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QubitOp {
    /// exp(−iπσₓ/2) = −iσₓ, the propagator of a resonant π pulse.
    PiX,
    X,
    Z,
    H,
    /// exp(−iθσ/2) about the axis.
    Rotation(Axis, f64),
    /// Clifford mapping the axis Pauli onto σ_z (U σ U† = σ_z).
    ToZ(Axis),
    /// Inverse of [`QubitOp::ToZ`].
    FromZ(Axis),
}

impl QubitOp {
    pub fn matrix(&self) -> CMatrix {
        match *self {
            QubitOp::PiX => ops::rotation('x', std::f64::consts::PI),
            QubitOp::X => ops::sigma_x(),
            QubitOp::Z => ops::sigma_z(),
            QubitOp::H => ops::hadamard(),
            QubitOp::Rotation(a, t) => ops::rotation(a.as_char(), t),
            QubitOp::ToZ(Axis::X) => ops::hadamard(),
            QubitOp::ToZ(Axis::Y) => ops::rotation('x', std::f64::consts::FRAC_PI_2),
            QubitOp::ToZ(Axis::Z) => ops::identity(2),
            QubitOp::FromZ(a) => QubitOp::ToZ(a).matrix().adjoint(),
        }
    }

    fn label(&self) -> String {
        match *self {
            QubitOp::PiX => "pi_x".into(),
            QubitOp::X => "x".into(),
            QubitOp::Z => "z".into(),
            QubitOp::H => "h".into(),
            QubitOp::Rotation(a, t) => format!("r{}:{t}", a.as_char()),
            QubitOp::ToZ(a) => format!("to_z:{}", a.as_char()),
            QubitOp::FromZ(a) => format!("from_z:{}", a.as_char()),
        }
    }

    fn parse(s: &str) -> Result<Self> {
        let (head, arg) = s.split_once(':').map_or((s, None), |(h, a)| (h, Some(a)));
        Ok(match (head, arg) {
            ("pi_x", None) => QubitOp::PiX,
            ("x", None) => QubitOp::X,
            ("z", None) => QubitOp::Z,
            ("h", None) => QubitOp::H,
            ("rx", Some(t)) => QubitOp::Rotation(Axis::X, parse_f64(t)?),
            ("ry", Some(t)) => QubitOp::Rotation(Axis::Y, parse_f64(t)?),
            ("rz", Some(t)) => QubitOp::Rotation(Axis::Z, parse_f64(t)?),
            ("to_z", Some(a)) => QubitOp::ToZ(Axis::parse(a)?),
            ("from_z", Some(a)) => QubitOp::FromZ(Axis::parse(a)?),
            _ => return Err(timeline_err(format!("unknown gate {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstantGate {
    /// The same single-qubit unitary on each listed system qubit (zero-based).
    Qubits { targets: Vec<usize>, op: QubitOp },
    Ancilla(QubitOp),
    /// Ideal cavity displacement D(β).
    Displace(C64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    CavityVacuum,
    AncillaGround,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Action {
    /// σₓ on the ancilla.
    AncillaFlip,
    /// D(β) on the cavity.
    Displace(C64),
    /// exp(−iθσ/2) on one system qubit.
    Rotate { qubit: usize, axis: Axis, angle: f64 },
    /// Multiplies the conditioned branch by e^{iφ}.
    Phase(f64),
}

/// U = Π_cond ⊗ A + (1 − Π_cond) ⊗ 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalGate {
    pub condition: Condition,
    pub action: Action,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateModel {
    Ideal,
    /// Ideal gate between two free-evolution halves of the given total duration.
    Finite { duration: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResetTarget {
    Cavity,
    Ancilla,
    Qubit(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeasureTarget {
    Ancilla,
    Qubit(usize),
    /// Ideal projective measurement of a qubit Pauli string.
    Pauli(PauliString),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Segment {
    Free { duration: f64 },
    Drive(DriveTerm),
    Gate(InstantGate),
    Conditional { gate: ConditionalGate, model: GateModel },
    Reset(ResetTarget),
    Measure(MeasureTarget),
}

impl Segment {
    pub fn duration(&self) -> f64 {
        match self {
            Segment::Free { duration } => *duration,
            Segment::Drive(d) => d.duration(),
            Segment::Conditional {
                model: GateModel::Finite { duration },
                ..
            } => *duration,
            _ => 0.0,
        }
    }
}

/// Bookkeeping attached to a schedule.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScheduleMetadata {
    /// Zero-based target subset.
    pub subset: Vec<usize>,
    pub alpha: Option<C64>,
    /// Named durations and phases recorded by the builder.
    pub ledger: Vec<(String, f64)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PulseSchedule {
    pub label: String,
    segments: Vec<Segment>,
    pub metadata: ScheduleMetadata,
}

pub const TIMELINE_HEADER: &str = "# cavity-parity timeline v1";

impl PulseSchedule {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            ..Default::default()
        }
    }

    /// Appends a segment; drive envelopes are re-timed to start at the current end.
    pub fn push(&mut self, seg: Segment) -> &mut Self {
        let t = self.total_duration();
        let seg = match seg {
            Segment::Drive(d) => Segment::Drive(d.with_start(t)),
            s => s,
        };
        self.segments.push(seg);
        self
    }

    pub fn free(&mut self, duration: f64) -> &mut Self {
        self.push(Segment::Free { duration })
    }

    pub fn extend(&mut self, other: &PulseSchedule) -> &mut Self {
        for s in &other.segments {
            self.push(s.clone());
        }
        self
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(Segment::duration).sum()
    }

    /// Start time of each segment.
    pub fn starts(&self) -> Vec<f64> {
        let mut t = 0.0;
        self.segments
            .iter()
            .map(|s| {
                let start = t;
                t += s.duration();
                start
            })
            .collect()
    }

    pub fn ledger_value(&self, key: &str) -> Option<f64> {
        self.metadata
            .ledger
            .iter()
            .find(|(k, _)| k == key)
            .map(|&(_, v)| v)
    }

    pub fn note(&mut self, key: impl Into<String>, value: f64) {
        self.metadata.ledger.push((key.into(), value));
    }

    /// Serializes to the versioned plain-text timeline format.
    ///
    /// One `segment <start> <duration> <kind> [key=value ...]` line per
    /// segment; qubit indices are one-based; complex numbers are `re,im`.
    pub fn to_timeline(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{TIMELINE_HEADER}");
        let _ = writeln!(out, "label {}", self.label);
        if !self.metadata.subset.is_empty() {
            let _ = writeln!(out, "subset {}", one_based(&self.metadata.subset));
        }
        if let Some(a) = self.metadata.alpha {
            let _ = writeln!(out, "alpha {}", fmt_c(a));
        }
        for (k, v) in &self.metadata.ledger {
            let _ = writeln!(out, "ledger {k} {v}");
        }
        for (seg, start) in self.segments.iter().zip(self.starts()) {
            let _ = writeln!(out, "segment {start} {} {}", seg.duration(), segment_body(seg));
        }
        out
    }

    pub fn from_timeline(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        match lines.next() {
            Some(h) if h == TIMELINE_HEADER => {}
            _ => return Err(timeline_err("missing or unsupported header".into())),
        }
        let mut sched = PulseSchedule::new("");
        for line in lines {
            if line.starts_with('#') {
                continue;
            }
            let (kw, rest) = line.split_once(' ').unwrap_or((line, ""));
            match kw {
                "label" => sched.label = rest.to_string(),
                "subset" => sched.metadata.subset = parse_one_based(rest)?,
                "alpha" => sched.metadata.alpha = Some(parse_c(rest)?),
                "ledger" => {
                    let (k, v) = rest
                        .rsplit_once(' ')
                        .ok_or_else(|| timeline_err(format!("bad ledger line {line:?}")))?;
                    sched.metadata.ledger.push((k.to_string(), parse_f64(v)?));
                }
                "segment" => {
                    let seg = parse_segment(rest)?;
                    sched.push(seg);
                }
                _ => return Err(timeline_err(format!("unknown line {line:?}"))),
            }
        }
        Ok(sched)
    }
}

fn timeline_err(msg: String) -> Error {
    Error::Config(format!("timeline: {msg}"))
}

fn fmt_c(z: C64) -> String {
    format!("{},{}", z.re, z.im)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| timeline_err(format!("bad number {s:?}")))
}

fn parse_c(s: &str) -> Result<C64> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| timeline_err(format!("bad complex {s:?}")))?;
    Ok(C64::new(parse_f64(re)?, parse_f64(im)?))
}

fn one_based(q: &[usize]) -> String {
    q.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn parse_one_based(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            let i: usize = t
                .trim()
                .parse()
                .map_err(|_| timeline_err(format!("bad qubit list {s:?}")))?;
            i.checked_sub(1)
                .ok_or_else(|| timeline_err("qubit indices are one-based".into()))
        })
        .collect()
}

fn parse_qubit(s: &str) -> Result<usize> {
    let i = s
        .strip_prefix('q')
        .ok_or_else(|| timeline_err(format!("expected qN, got {s:?}")))?;
    Ok(parse_one_based(i)?[0])
}

fn segment_body(seg: &Segment) -> String {
    match seg {
        Segment::Free { .. } => "free".into(),
        Segment::Drive(d) => {
            let amp = d.raising_amplitude();
            match &d.target {
                DriveTarget::Cavity => format!(
                    "cavity_drive amp={} detuning={}",
                    fmt_c(amp),
                    d.detuning
                ),
                DriveTarget::Qubits(t) => format!(
                    "qubit_drive targets={} amp={} detuning={} photons={}",
                    one_based(t),
                    fmt_c(amp),
                    d.detuning,
                    d.frame_photons
                ),
            }
        }
        Segment::Gate(InstantGate::Qubits { targets, op }) => {
            format!("gate qubits={} op={}", one_based(targets), op.label())
        }
        Segment::Gate(InstantGate::Ancilla(op)) => format!("gate ancilla op={}", op.label()),
        Segment::Gate(InstantGate::Displace(b)) => format!("displace beta={}", fmt_c(*b)),
        Segment::Conditional { gate, model } => {
            let cond = match gate.condition {
                Condition::CavityVacuum => "cavity_vacuum",
                Condition::AncillaGround => "ancilla_ground",
            };
            let act = match gate.action {
                Action::AncillaFlip => "ancilla_flip".to_string(),
                Action::Displace(b) => format!("displace:{}", fmt_c(b)),
                Action::Rotate { qubit, axis, angle } => {
                    format!("rotate:q{}:{}:{angle}", qubit + 1, axis.as_char())
                }
                Action::Phase(p) => format!("phase:{p}"),
            };
            let model = match model {
                GateModel::Ideal => "ideal".to_string(),
                GateModel::Finite { duration } => format!("finite:{duration}"),
            };
            format!("conditional if={cond} do={act} model={model}")
        }
        Segment::Reset(t) => match t {
            ResetTarget::Cavity => "reset cavity".into(),
            ResetTarget::Ancilla => "reset ancilla".into(),
            ResetTarget::Qubit(q) => format!("reset q{}", q + 1),
        },
        Segment::Measure(t) => match t {
            MeasureTarget::Ancilla => "measure ancilla".into(),
            MeasureTarget::Qubit(q) => format!("measure q{}", q + 1),
            MeasureTarget::Pauli(p) => format!("measure pauli:{}:{}", p.n(), p),
        },
    }
}

fn kv<'a>(fields: &[&'a str], key: &str) -> Result<&'a str> {
    fields
        .iter()
        .find_map(|f| f.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| timeline_err(format!("missing {key}=")))
}

fn parse_segment(rest: &str) -> Result<Segment> {
    let fields: Vec<&str> = rest.split_whitespace().collect();
    if fields.len() < 3 {
        return Err(timeline_err(format!("short segment line {rest:?}")));
    }
    let duration = parse_f64(fields[1])?;
    let kind = fields[2];
    let f = &fields[3..];
    Ok(match kind {
        "free" => Segment::Free { duration },
        "cavity_drive" | "qubit_drive" => {
            let amp = parse_c(kv(f, "amp")?)?;
            let target = if kind == "cavity_drive" {
                DriveTarget::Cavity
            } else {
                DriveTarget::Qubits(parse_one_based(kv(f, "targets")?)?)
            };
            let frame_photons = if kind == "qubit_drive" {
                parse_f64(kv(f, "photons")?)?
            } else {
                0.0
            };
            Segment::Drive(DriveTerm {
                target,
                envelope: Envelope::Square {
                    amplitude: amp.norm(),
                    start: parse_f64(fields[0])?,
                    duration,
                    phase: amp.arg(),
                },
                detuning: parse_f64(kv(f, "detuning")?)?,
                frame_photons,
            })
        }
        "gate" => {
            let op = QubitOp::parse(kv(f, "op")?)?;
            if f.first() == Some(&"ancilla") {
                Segment::Gate(InstantGate::Ancilla(op))
            } else {
                Segment::Gate(InstantGate::Qubits {
                    targets: parse_one_based(kv(f, "qubits")?)?,
                    op,
                })
            }
        }
        "displace" => Segment::Gate(InstantGate::Displace(parse_c(kv(f, "beta")?)?)),
        "conditional" => {
            let condition = match kv(f, "if")? {
                "cavity_vacuum" => Condition::CavityVacuum,
                "ancilla_ground" => Condition::AncillaGround,
                c => return Err(timeline_err(format!("unknown condition {c:?}"))),
            };
            let act = kv(f, "do")?;
            let action = if act == "ancilla_flip" {
                Action::AncillaFlip
            } else if let Some(b) = act.strip_prefix("displace:") {
                Action::Displace(parse_c(b)?)
            } else if let Some(p) = act.strip_prefix("phase:") {
                Action::Phase(parse_f64(p)?)
            } else if let Some(r) = act.strip_prefix("rotate:") {
                let parts: Vec<&str> = r.split(':').collect();
                if parts.len() != 3 {
                    return Err(timeline_err(format!("bad rotation {act:?}")));
                }
                Action::Rotate {
                    qubit: parse_qubit(parts[0])?,
                    axis: Axis::parse(parts[1])?,
                    angle: parse_f64(parts[2])?,
                }
            } else {
                return Err(timeline_err(format!("unknown action {act:?}")));
            };
            let model = match kv(f, "model")? {
                "ideal" => GateModel::Ideal,
                m => match m.strip_prefix("finite:") {
                    Some(d) => GateModel::Finite {
                        duration: parse_f64(d)?,
                    },
                    None => return Err(timeline_err(format!("unknown model {m:?}"))),
                },
            };
            Segment::Conditional {
                gate: ConditionalGate { condition, action },
                model,
            }
        }
        "reset" => Segment::Reset(match f.first().copied() {
            Some("cavity") => ResetTarget::Cavity,
            Some("ancilla") => ResetTarget::Ancilla,
            Some(q) => ResetTarget::Qubit(parse_qubit(q)?),
            None => return Err(timeline_err("reset without target".into())),
        }),
        "measure" => Segment::Measure(match f.first().copied() {
            Some("ancilla") => MeasureTarget::Ancilla,
            Some(p) if p.starts_with("pauli:") => {
                let body = &p["pauli:".len()..];
                let (n, s) = body
                    .split_once(':')
                    .ok_or_else(|| timeline_err(format!("bad Pauli target {p:?}")))?;
                let n: usize = n.parse().map_err(|_| timeline_err(format!("bad qubit count {n:?}")))?;
                MeasureTarget::Pauli(PauliString::parse(s, n)?)
            }
            Some(q) => MeasureTarget::Qubit(parse_qubit(q)?),
            None => return Err(timeline_err("measure without target".into())),
        }),
        _ => return Err(timeline_err(format!("unknown segment kind {kind:?}"))),
    })
}
