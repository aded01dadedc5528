//! Time evolution: Lindblad and Schrödinger propagation of pulse schedules.
//!
//! Each timed segment is integrated in the interaction picture of its own
//! diagonal Hamiltonian, so undriven noiseless intervals are exact phase
//! masks and driven ones only resolve the drive and the dissipators.
//! Density matrices are stored as packed lower triangles; the row work is
//! spread over rayon when the `parallel` feature is on.

pub mod apply;
pub mod integrate;
pub mod kernel;
pub mod options;
pub mod runner;
pub mod segment;
pub mod sparse;

pub use apply::{
    apply_csr, apply_local, fock_tail_population, measure_factor, measure_pauli, project_pauli,
    reset_factor,
};
pub use integrate::StepStats;
pub use options::{EvolutionOptions, Method};
pub use runner::{
    conditional_operator, run_schedule, MeasurementOutcome, MeasurementRecord, RunOutput,
    RunReport,
};
pub use segment::{
    evolve_lindblad_segment, evolve_lindblad_segment_with_report, evolve_unitary_segment,
    evolve_unitary_segment_with_report, SegmentGenerator, SegmentReport,
};
pub use sparse::{Csr, PictureOp};
