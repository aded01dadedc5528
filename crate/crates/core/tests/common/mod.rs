//! Helpers shared by the integration tests and the acceptance harness.
#![allow(dead_code)]

use cavity_parity::stabilizer::PauliString;
use cavity_parity::system::SystemSpec;
use cavity_parity::tensorspace::{coherent_state, HilbertLayout, QuantumState};
use cavity_parity::units::mhz;
use cavity_parity::{CVector, C64};
use rand::Rng;

/// Pointer amplitude used wherever the two cat branches must be orthogonal
/// to better than 1e-8.
pub const PROTOCOL_ALPHA: f64 = 3.0;
pub const PROTOCOL_FOCK: usize = 80;

/// Lossless N-qubit spec with an ancilla at χ_A = 10Nχ, K = 0.
pub fn protocol_spec(n: usize) -> SystemSpec {
    let chi = mhz(5.0);
    SystemSpec::uniform(n, chi, 0.0, PROTOCOL_FOCK).with_ancilla(10.0 * n as f64 * chi)
}

/// |levels⟩ ⊗ |α⟩ on qubits ⊗ cavity.
pub fn product(levels: &[usize], alpha: C64, d: usize) -> QuantumState {
    let n = levels.len();
    let mut q = CVector::zeros(1 << n);
    q[levels.iter().fold(0, |a, &l| 2 * a + l)] = C64::new(1.0, 0.0);
    let v = q.kronecker(&coherent_state(alpha, d).unwrap());
    QuantumState::pure(v, HilbertLayout::cavity_qed(n, d, false)).unwrap()
}

/// Cavity vector of the branch with qubit levels `levels` (qubits ⊗ cavity layout).
pub fn branch(state: &QuantumState, levels: &[usize], d: usize) -> CVector {
    let v = state.as_vector().unwrap();
    let b = levels.iter().fold(0, |a, &l| 2 * a + l);
    CVector::from_fn(d, |k, _| v[b * d + k])
}

/// ⟨a⟩ of an (unnormalized) cavity vector.
pub fn mean_a(cav: &CVector) -> C64 {
    (1..cav.len()).map(|k| cav[k - 1].conj() * cav[k] * (k as f64).sqrt()).sum()
}

/// |ψ⟩ ⊗ |0⟩ ⊗ |g⟩ on the spec's layout (ancilla optional).
pub fn embed(psi: &CVector, spec: &SystemSpec) -> QuantumState {
    let tail = spec.dim() / psi.len();
    let mut v = CVector::zeros(spec.dim());
    for (i, c) in psi.iter().enumerate() {
        v[i * tail] = *c;
    }
    QuantumState::pure(v, spec.layout()).unwrap()
}

pub fn random_qubits(n: usize, rng: &mut impl Rng) -> CVector {
    let v = CVector::from_fn(1 << n, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    v.unscale(v.norm())
}

/// Random Hermitian, non-identity Pauli string with a random sign.
pub fn random_pauli(n: usize, rng: &mut impl Rng) -> PauliString {
    loop {
        let x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let z: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let ys = x.iter().zip(&z).filter(|(a, b)| **a && **b).count() as u8;
        let sign = if rng.gen() { 0 } else { 2 };
        let p = PauliString::from_bits(x, z, (ys + sign) % 4).unwrap();
        if !p.is_identity() && p.is_hermitian() {
            return p;
        }
    }
}
