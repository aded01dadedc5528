use serde::{Deserialize, Serialize};
use std::fmt;

use crate::{Error, Result};

/// Role of one tensor factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    /// System qubit with a zero-based index.
    Qubit(usize),
    Cavity,
    Ancilla,
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subsystem::Qubit(i) => write!(f, "q{}", i + 1),
            Subsystem::Cavity => write!(f, "cavity"),
            Subsystem::Ancilla => write!(f, "ancilla"),
        }
    }
}

/// Ordered list of tensor factors and their dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertLayout {
    dims: Vec<usize>,
    labels: Vec<Subsystem>,
}

impl HilbertLayout {
    pub fn new(dims: Vec<usize>, labels: Vec<Subsystem>) -> Result<Self> {
        if dims.is_empty() || dims.len() != labels.len() {
            return Err(Error::Dimension(format!(
                "{} dims for {} labels",
                dims.len(),
                labels.len()
            )));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Dimension("zero-dimensional subsystem".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for (&d, l) in dims.iter().zip(&labels) {
            if !seen.insert(*l) {
                return Err(Error::Dimension(format!("subsystem {l} appears twice")));
            }
            if matches!(l, Subsystem::Qubit(_) | Subsystem::Ancilla) && d != 2 {
                return Err(Error::Dimension(format!("{l} must have dimension 2, got {d}")));
            }
        }
        Ok(Self { dims, labels })
    }

    /// qubits 1..N, cavity with `fock_dim` levels, optional ancilla.
    pub fn cavity_qed(n_qubits: usize, fock_dim: usize, ancilla: bool) -> Self {
        let mut dims = vec![2; n_qubits];
        let mut labels: Vec<Subsystem> = (0..n_qubits).map(Subsystem::Qubit).collect();
        dims.push(fock_dim);
        labels.push(Subsystem::Cavity);
        if ancilla {
            dims.push(2);
            labels.push(Subsystem::Ancilla);
        }
        Self { dims, labels }
    }

    pub fn qubits(n: usize) -> Self {
        Self {
            dims: vec![2; n],
            labels: (0..n).map(Subsystem::Qubit).collect(),
        }
    }

    pub fn cavity_only(fock_dim: usize) -> Self {
        Self {
            dims: vec![fock_dim],
            labels: vec![Subsystem::Cavity],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[Subsystem] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, s: Subsystem) -> Option<usize> {
        self.labels.iter().position(|&l| l == s)
    }

    pub fn cavity(&self) -> Option<usize> {
        self.position(Subsystem::Cavity)
    }

    pub fn ancilla(&self) -> Option<usize> {
        self.position(Subsystem::Ancilla)
    }

    pub fn qubit(&self, i: usize) -> Option<usize> {
        self.position(Subsystem::Qubit(i))
    }

    pub fn n_qubits(&self) -> usize {
        self.labels
            .iter()
            .filter(|l| matches!(l, Subsystem::Qubit(_)))
            .count()
    }

    pub fn fock_dim(&self) -> Option<usize> {
        self.cavity().map(|p| self.dims[p])
    }

    /// Index stride of each factor in the flattened basis.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    /// Level of factor `pos` in flattened basis index `index`.
    pub fn digit(&self, index: usize, pos: usize) -> usize {
        let stride: usize = self.dims[pos + 1..].iter().product();
        (index / stride) % self.dims[pos]
    }

    /// Flattened index of a multi-index.
    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.dims.len() {
            return Err(Error::Dimension(format!(
                "expected {} levels, got {}",
                self.dims.len(),
                levels.len()
            )));
        }
        let mut idx = 0;
        for (&l, &d) in levels.iter().zip(&self.dims) {
            if l >= d {
                return Err(Error::Dimension(format!("level {l} out of range {d}")));
            }
            idx = idx * d + l;
        }
        Ok(idx)
    }

    /// Layout restricted to the given factor positions (kept in layout order).
    pub fn sub_layout(&self, positions: &[usize]) -> Result<Self> {
        let mut pos = positions.to_vec();
        pos.sort_unstable();
        pos.dedup();
        if pos.is_empty() {
            return Err(Error::Dimension("empty subsystem selection".into()));
        }
        if let Some(&p) = pos.iter().find(|&&p| p >= self.dims.len()) {
            return Err(Error::Dimension(format!("subsystem index {p} out of range")));
        }
        Ok(Self {
            dims: pos.iter().map(|&p| self.dims[p]).collect(),
            labels: pos.iter().map(|&p| self.labels[p]).collect(),
        })
    }

    /// Concatenation `self ⊗ other`.
    pub fn tensor(&self, other: &HilbertLayout) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Self::new(dims, labels)
    }
}

impl fmt::Display for HilbertLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .labels
            .iter()
            .zip(&self.dims)
            .map(|(l, d)| format!("{l}:{d}"))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}
