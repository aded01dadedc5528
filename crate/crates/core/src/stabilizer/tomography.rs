//! Pauli-bar and logical Bloch-vector summaries of qubit states.

use super::code::StabilizerCode;
use super::pauli::{Pauli, PauliString};
use crate::tensorspace::{QuantumState, Subsystem};
use crate::{Error, Result};

const ORDER: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

/// Label of the `index`-th string in lexicographic I < X < Y < Z order,
/// qubit 1 most significant (0 → "IIII", 1 → "IIIX", 255 → "ZZZZ").
pub fn pauli_label(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| ORDER[(index >> (2 * (n - 1 - q))) & 3].symbol())
        .collect()
}

fn string_at(index: usize, n: usize) -> PauliString {
    let mut x = vec![false; n];
    let mut z = vec![false; n];
    for q in 0..n {
        let (xb, zb) = ORDER[(index >> (2 * (n - 1 - q))) & 3].bits();
        x[q] = xb;
        z[q] = zb;
    }
    PauliString::from_bits(x, z, 0).expect("equal lengths")
}

/// ⟨P⟩ for all 4ⁿ Pauli strings on an n-qubit state (n ≤ 6), lexicographic.
pub fn pauli_bars(rho: &QuantumState) -> Result<Vec<(String, f64)>> {
    let layout = rho.layout();
    let n = layout.len();
    if n == 0 || n > 6 || layout.labels().iter().any(|l| !matches!(l, Subsystem::Qubit(_))) {
        return Err(Error::Dimension(format!(
            "Pauli bars need a state of 1 to 6 qubits only, got {layout}"
        )));
    }
    let tr = rho.trace();
    (0..1usize << (2 * n))
        .map(|k| Ok((pauli_label(k, n), string_at(k, n).expectation(rho)? / tr)))
        .collect()
}

/// (⟨X̄⟩, ⟨Ȳ⟩, ⟨Z̄⟩) with Ȳ = iX̄Z̄, using the code's logicals named "X" and "Z".
pub fn logical_bloch_vector(rho: &QuantumState, code: &StabilizerCode) -> Result<[f64; 3]> {
    let get = |name: &str| {
        code.logical(name)
            .ok_or_else(|| Error::InvalidParameter(format!("{} has no logical {name}", code.name)))
    };
    let (x, z) = (get("X")?, get("Z")?);
    let y = PauliString::identity(code.n).with_phase(1).mul(&x.mul(z)?)?;
    if !y.is_hermitian() {
        return Err(Error::InvalidParameter("logical X and Z commute".into()));
    }
    let tr = rho.trace();
    Ok([
        x.expectation(rho)? / tr,
        y.expectation(rho)? / tr,
        z.expectation(rho)? / tr,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::{erasure_code, erasure_target};
    use crate::tensorspace::HilbertLayout;

    #[test]
    fn labels_are_lexicographic() {
        assert_eq!(pauli_label(0, 4), "IIII");
        assert_eq!(pauli_label(1, 4), "IIIX");
        assert_eq!(pauli_label(6, 4), "IIXY");
        assert_eq!(pauli_label(255, 4), "ZZZZ");
    }

    #[test]
    fn ground_state_bars() {
        let s = QuantumState::basis(&[0; 4], HilbertLayout::qubits(4)).unwrap();
        let bars = pauli_bars(&s).unwrap();
        assert_eq!(bars.len(), 256);
        assert_eq!(bars[0].1, 1.0);
        let get = |l: &str| bars.iter().find(|b| b.0 == l).unwrap().1;
        assert_eq!(get("ZIII"), -1.0);
        assert_eq!(get("ZZII"), 1.0);
        assert_eq!(get("XIII"), 0.0);
        assert_eq!(get("IYIZ"), 0.0);
    }

    #[test]
    fn erasure_bloch_vector() {
        let theta = std::f64::consts::PI / 8.0;
        let b = logical_bloch_vector(&erasure_target(theta), &erasure_code()).unwrap();
        assert!((b[2] - (2.0 * theta).cos()).abs() < 1e-12);
        assert!(b[0].abs() < 1e-12);
        assert!(((b[1]).abs() - (2.0 * theta).sin()).abs() < 1e-12);
    }
}
