use std::fmt;
use std::str::FromStr;

use crate::tensorspace::{HilbertLayout, Operator, QuantumState, Representation, Subsystem};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Single-qubit Pauli factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn matrix(self) -> CMatrix {
        use crate::tensorspace::ops;
        match self {
            Pauli::I => ops::identity(2),
            Pauli::X => ops::sigma_x(),
            Pauli::Y => ops::sigma_y(),
            Pauli::Z => ops::sigma_z(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Power of i picked up by the single-site product σ(x1,z1)·σ(x2,z2).
fn site_phase(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x2, z2) = (x2 as i32, z2 as i32);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

/// N-qubit Pauli operator i^phase ⊗ⱼ σ(xⱼ, zⱼ), with σ(1,1) the Hermitian Y.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<bool>,
    z: Vec<bool>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: vec![false; n],
            z: vec![false; n],
            phase: 0,
        }
    }

    pub fn from_bits(x: Vec<bool>, z: Vec<bool>, phase: u8) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::InvalidParameter("x and z bit vectors differ in length".into()));
        }
        Ok(Self {
            n: x.len(),
            x,
            z,
            phase: phase % 4,
        })
    }

    /// Product of `kind` on the given zero-based qubits.
    pub fn uniform(n: usize, kind: Pauli, qubits: &[usize]) -> Result<Self> {
        let mut p = Self::identity(n);
        for &q in qubits {
            if q >= n {
                return Err(Error::InvalidParameter(format!("qubit {} out of range 1..={n}", q + 1)));
            }
            p = p.mul(&Self::single(n, q, kind))?;
        }
        Ok(p)
    }

    pub fn single(n: usize, qubit: usize, kind: Pauli) -> Self {
        let mut p = Self::identity(n);
        let (x, z) = kind.bits();
        p.x[qubit] = x;
        p.z[qubit] = z;
        p
    }

    /// Parses the "X1X2Z4" grammar with an optional leading sign
    /// (`+`, `-`, `i`, `-i`). Indices are one-based; `I` is the identity.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidParameter(format!("malformed Pauli string {text:?}: {msg}"));
        let mut s = text.trim();
        let mut phase = 0u8;
        if let Some(rest) = s.strip_prefix("-i") {
            phase = 3;
            s = rest;
        } else if let Some(rest) = s.strip_prefix("+i") {
            phase = 1;
            s = rest;
        } else if let Some(rest) = s.strip_prefix('i') {
            phase = 1;
            s = rest;
        } else if let Some(rest) = s.strip_prefix('-') {
            phase = 2;
            s = rest;
        } else if let Some(rest) = s.strip_prefix('+') {
            s = rest;
        }
        let s = s.trim();
        let mut out = Self::identity(n);
        out.phase = phase;
        if s == "I" || s.is_empty() {
            if s.is_empty() {
                return Err(bad("empty"));
            }
            return Ok(out);
        }
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut i = 0;
        while i < chars.len() {
            let kind = match chars[i] {
                'X' | 'x' => Pauli::X,
                'Y' | 'y' => Pauli::Y,
                'Z' | 'z' => Pauli::Z,
                'I' => Pauli::I,
                c => return Err(bad(&format!("unexpected {c:?}"))),
            };
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(bad("missing qubit index"));
            }
            let idx: usize = chars[start..i].iter().collect::<String>().parse().map_err(|_| bad("index"))?;
            if idx == 0 || idx > n {
                return Err(Error::InvalidParameter(format!(
                    "qubit index {idx} in {text:?} outside 1..={n}"
                )));
            }
            out = out.mul(&Self::single(n, idx - 1, kind))?;
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> &[bool] {
        &self.x
    }

    pub fn z_bits(&self) -> &[bool] {
        &self.z
    }

    /// Exponent k of the global factor iᵏ.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn phase_factor(&self) -> C64 {
        [C64::new(1., 0.), C64::new(0., 1.), C64::new(-1., 0.), C64::new(0., -1.)][self.phase as usize]
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    pub fn negate(&self) -> Self {
        self.clone().with_phase(self.phase + 2)
    }

    pub fn factor(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x[q], self.z[q])
    }

    /// Zero-based qubits with a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x[q] || self.z[q]).collect()
    }

    pub fn weight(&self) -> usize {
        self.support().len()
    }

    pub fn is_identity(&self) -> bool {
        self.support().is_empty()
    }

    /// True for phase ±1, i.e. a Hermitian operator squaring to +I.
    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// Same operator without its phase.
    pub fn unsigned(&self) -> Self {
        self.clone().with_phase(0)
    }

    pub fn mul(&self, other: &PauliString) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "Pauli strings on {} and {} qubits",
                self.n, other.n
            )));
        }
        let mut ph = self.phase as i32 + other.phase as i32;
        let mut x = vec![false; self.n];
        let mut z = vec![false; self.n];
        for q in 0..self.n {
            ph += site_phase(self.x[q], self.z[q], other.x[q], other.z[q]);
            x[q] = self.x[q] ^ other.x[q];
            z[q] = self.z[q] ^ other.z[q];
        }
        Ok(Self {
            n: self.n,
            x,
            z,
            phase: ph.rem_euclid(4) as u8,
        })
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        let mut s = false;
        for q in 0..self.n.min(other.n) {
            s ^= (self.x[q] & other.z[q]) ^ (self.z[q] & other.x[q]);
        }
        !s
    }

    /// Dense 2ⁿ×2ⁿ matrix in the qubit-only basis.
    pub fn to_matrix(&self) -> CMatrix {
        let factors: Vec<CMatrix> = (0..self.n).map(|q| self.factor(q).matrix()).collect();
        crate::tensorspace::ops::kron_all(&factors) * self.phase_factor()
    }

    /// Permutation and phases of the action on `layout`'s basis:
    /// P|i⟩ = phases[i] |perm[i]⟩.
    pub fn action(&self, layout: &HilbertLayout) -> Result<(Vec<usize>, Vec<C64>)> {
        let mut positions = Vec::with_capacity(self.n);
        for q in 0..self.n {
            let pos = layout.position(Subsystem::Qubit(q)).ok_or_else(|| {
                Error::Dimension(format!("layout {layout} has no qubit {}", q + 1))
            })?;
            positions.push(pos);
        }
        let strides = layout.strides();
        let dim = layout.total_dim();
        let base = self.phase_factor();
        let mut perm = Vec::with_capacity(dim);
        let mut phases = Vec::with_capacity(dim);
        let (i, mi) = (C64::new(0., 1.), C64::new(0., -1.));
        for idx in 0..dim {
            let mut target = idx;
            let mut ph = base;
            for (q, &pos) in positions.iter().enumerate() {
                let b = layout.digit(idx, pos);
                match self.factor(q) {
                    Pauli::I => {}
                    Pauli::X => {}
                    Pauli::Y => ph *= if b == 0 { mi } else { i },
                    Pauli::Z => {
                        if b == 0 {
                            ph = -ph
                        }
                    }
                }
                if self.x[q] {
                    target = if b == 0 { target + strides[pos] } else { target - strides[pos] };
                }
            }
            perm.push(target);
            phases.push(ph);
        }
        Ok((perm, phases))
    }

    /// Dense operator on `layout` (identity on non-qubit factors).
    pub fn embed(&self, layout: &HilbertLayout) -> Result<Operator> {
        let (perm, phases) = self.action(layout)?;
        let d = layout.total_dim();
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            m[(perm[i], i)] = phases[i];
        }
        Operator::new(m, layout.clone())
    }

    /// P|ψ⟩ or PρP†.
    pub fn apply(&self, state: &QuantumState) -> Result<QuantumState> {
        let (perm, phases) = self.action(state.layout())?;
        Ok(match state.representation() {
            Representation::Pure(v) => {
                let mut out = CVector::zeros(v.len());
                for i in 0..v.len() {
                    out[perm[i]] = phases[i] * v[i];
                }
                QuantumState::from_vector(out, state.layout().clone())
            }
            Representation::Density(m) => {
                let d = m.nrows();
                let mut out = CMatrix::zeros(d, d);
                for j in 0..d {
                    let pj = phases[j].conj();
                    for i in 0..d {
                        out[(perm[i], perm[j])] = phases[i] * m[(i, j)] * pj;
                    }
                }
                QuantumState::from_matrix(out, state.layout().clone())
            }
        })
    }

    /// ⟨P⟩ without forming the dense operator.
    pub fn expectation(&self, state: &QuantumState) -> Result<f64> {
        let (perm, phases) = self.action(state.layout())?;
        let v = match state.representation() {
            Representation::Pure(v) => {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..v.len() {
                    acc += v[perm[i]].conj() * phases[i] * v[i];
                }
                acc
            }
            Representation::Density(m) => {
                // Tr(Pρ) = Σ_j P[perm j, j] ρ[j, perm j]
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..m.nrows() {
                    acc += phases[j] * m[(j, perm[j])];
                }
                acc
            }
        };
        Ok(v.re)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = ["", "i", "-", "-i"][self.phase as usize];
        write!(f, "{sign}")?;
        if self.is_identity() {
            return write!(f, "I");
        }
        for q in self.support() {
            write!(f, "{}{}", self.factor(q).symbol(), q + 1)?;
        }
        Ok(())
    }
}

/// Parses with n inferred from the largest index.
impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .unwrap_or(1);
        Self::parse(s, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_bits() {
        let p = PauliString::parse("Z1Z2", 4).unwrap();
        assert_eq!(p.z_bits(), &[true, true, false, false]);
        assert_eq!(p.x_bits(), &[false; 4]);
        assert_eq!(p.to_string(), "Z1Z2");
        assert!(PauliString::parse("Z5", 4).is_err());
        assert!(PauliString::parse("Q1", 4).is_err());
        assert!(PauliString::parse("Z", 4).is_err());
        assert_eq!(PauliString::parse("-iY2", 3).unwrap().to_string(), "-iY2");
    }

    #[test]
    fn commutation() {
        let a = PauliString::parse("X1X2X3X4", 4).unwrap();
        let b = PauliString::parse("Z1Z2", 4).unwrap();
        assert!(a.commutes(&b));
        let x = PauliString::parse("X1", 1).unwrap();
        let z = PauliString::parse("Z1", 1).unwrap();
        assert!(!x.commutes(&z));
    }

    #[test]
    fn product_matches_dense() {
        let a = PauliString::parse("X1Y2Z3", 3).unwrap();
        let b = PauliString::parse("Y1Y2X3", 3).unwrap();
        let ab = a.mul(&b).unwrap();
        let dense = a.to_matrix() * b.to_matrix();
        assert!((ab.to_matrix() - dense).norm() < 1e-14);
        // XZ = -iY
        let xz = PauliString::parse("X1", 1).unwrap().mul(&PauliString::parse("Z1", 1).unwrap()).unwrap();
        assert_eq!(xz.to_string(), "-iY1");
    }

    #[test]
    fn action_matches_embedding() {
        let layout = HilbertLayout::cavity_qed(3, 3, true);
        let p = PauliString::parse("-Y1X2Z3", 3).unwrap();
        let emb = p.embed(&layout).unwrap();
        let qubit_only = p.to_matrix();
        let full = qubit_only.kronecker(&CMatrix::identity(6, 6));
        assert!((emb.matrix() - full).norm() < 1e-14);
    }
}
