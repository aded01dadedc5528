//! Pulse-schedule builders for the measurement toolbox.
//!
//! Qubit indices are zero-based in the API and one-based in text (Pauli
//! strings, timelines). All builders are pure: they only describe what to
//! run, [`crate::dynamics::run_schedule`] executes it.

pub mod encoding;
pub mod logical;
pub mod readout;
pub mod schedule;

pub use encoding::{
    minus_i_pow, parity_encoding_schedule, unequal_chi_delays, unequal_chi_schedule,
    PulseDurations,
};
pub use logical::{
    basis_change, pauli_measurement_schedule, simulated_pauli_rotation, stabilizer_pump_cycle,
    BasisChange,
};
pub use readout::{
    ancilla_parity, cavity_reset, conditional_gate_apply, readout_mapping_schedule,
    readout_mapping_unmeasured,
};
pub use schedule::{
    Action, Axis, Condition, ConditionalGate, GateModel, InstantGate, MeasureTarget,
    PulseSchedule, QubitOp, ResetTarget, Segment, TIMELINE_HEADER,
};
