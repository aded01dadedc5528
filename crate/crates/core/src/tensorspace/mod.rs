//! Dense linear algebra over the qubits ⊗ cavity ⊗ ancilla product space.
//!
//! Basis conventions: each qubit uses {g, e} (index 0 = g) with
//! σ_z = |e⟩⟨e| − |g⟩⟨g|; the cavity uses Fock states |0⟩..|D−1⟩. Composite
//! indices are Kronecker-ordered with the leftmost subsystem varying slowest.

mod coherent;
mod expm;
mod layout;
mod operator;
pub mod ops;
mod phase_space;
mod state;

pub use coherent::{
    coherent_coefficients, coherent_leakage, coherent_state, coherent_state_with,
    displacement_operator, LEAKAGE_TOLERANCE,
};
pub use expm::{expm, expm_hermitian};
pub use layout::{HilbertLayout, Subsystem};
pub use operator::{embed_operator, Operator};
pub use phase_space::{husimi_q, square_grid, HusimiGrid};
pub use state::{
    min_eigenvalue, partial_trace, root_fidelity, state_fidelity, QuantumState, Representation,
};
