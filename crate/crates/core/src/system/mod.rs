//! Physical model: parameters, Hamiltonian, drives and collapse channels.
//!
//! The effective Hamiltonian is diagonal in the computational ⊗ Fock basis:
//!
//! H = Σᵢ χᵢ σᵢᶻ a†a − K a†a†aa + χ_A (σ_Aᶻ + 1) a†a
//!
//! The ancilla term is written in the cavity frame rotating at ω_c − χ_A, so an
//! ancilla in |g⟩ leaves the cavity untouched.

mod drive;
mod spec;

pub use drive::{build_cavity_drive, build_qubit_drive, DriveTarget, DriveTerm, Envelope};
pub use spec::{
    build_hamiltonian, collapse_channels, collapse_operators, diagonal_energies,
    validate_parameters, ChannelKind, CollapseChannel, DecoherenceRates, SystemSpec,
    ValidityReport,
};
