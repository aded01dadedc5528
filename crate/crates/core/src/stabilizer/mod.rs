//! Pauli algebra, small stabilizer codes, stabilizer measurement and
//! tomography summaries.

pub mod code;
pub mod measure;
pub mod pauli;
pub mod tomography;

pub use code::{
    cluster_state_generators, erasure_code, erasure_codewords, pauli_projector,
    toric_code_generators, StabilizerCode, ToricLattice,
};
pub use measure::{
    erasure_target, measure_stabilizer, pauli_exponential, prepare_erasure_logical,
    qubit_reduced, single_qubit_parity_via_ratio, toric_ground_state, FeedbackStep,
    MeasurementMode, Preparation, ProtocolSettings, StabilizerMeasurement, ToricPreparation,
};
pub use pauli::{Pauli, PauliString};
pub use tomography::{logical_bloch_vector, pauli_bars, pauli_label};
