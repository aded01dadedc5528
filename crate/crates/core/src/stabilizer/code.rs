//! Stabilizer codes: erasure, toric and cluster constructions.

use serde::Serialize;

use super::pauli::{Pauli, PauliString};
use crate::tensorspace::{HilbertLayout, Operator};
use crate::{CMatrix, CVector, Error, Result, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerCode {
    pub name: String,
    pub n: usize,
    /// Named generators, e.g. ("P1", Z1Z4Z7Z8).
    pub generators: Vec<(String, PauliString)>,
    /// Named logical operators.
    pub logicals: Vec<(String, PauliString)>,
}

/// Plain listing used for golden files.
#[derive(Serialize)]
struct Listing<'a> {
    name: &'a str,
    n_qubits: usize,
    generators: Vec<(&'a str, String)>,
    logicals: Vec<(&'a str, String)>,
}

impl StabilizerCode {
    /// Checks that generators commute pairwise and logicals commute with them.
    pub fn validate(&self) -> Result<()> {
        for (i, (na, a)) in self.generators.iter().enumerate() {
            if a.n() != self.n || !a.is_hermitian() {
                return Err(Error::InvalidParameter(format!("generator {na} = {a} is invalid")));
            }
            for (nb, b) in &self.generators[i + 1..] {
                if !a.commutes(b) {
                    return Err(Error::InvalidParameter(format!("{na} and {nb} anticommute")));
                }
            }
            for (nl, l) in &self.logicals {
                if !a.commutes(l) {
                    return Err(Error::InvalidParameter(format!("logical {nl} anticommutes with {na}")));
                }
            }
        }
        Ok(())
    }

    pub fn generator(&self, name: &str) -> Option<&PauliString> {
        self.generators.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    pub fn logical(&self, name: &str) -> Option<&PauliString> {
        self.logicals.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    /// Number of independent generators (GF(2) rank of the symplectic matrix).
    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<bool>> = self
            .generators
            .iter()
            .map(|(_, p)| p.x_bits().iter().chain(p.z_bits()).copied().collect())
            .collect();
        gf2_rank(rows)
    }

    /// Dimension of the joint +1 eigenspace, 2^{n − rank}.
    pub fn code_dimension(&self) -> usize {
        1 << (self.n - self.rank())
    }

    /// Dense projector onto the joint +1 eigenspace of the generators.
    pub fn projector(&self) -> Result<Operator> {
        let layout = HilbertLayout::qubits(self.n);
        let mut acc = Operator::identity(&layout);
        for (_, g) in &self.generators {
            acc = acc.compose(&pauli_projector(g, 1, &layout)?)?;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> String {
        let listing = Listing {
            name: &self.name,
            n_qubits: self.n,
            generators: self.generators.iter().map(|(n, p)| (n.as_str(), p.to_string())).collect(),
            logicals: self.logicals.iter().map(|(n, p)| (n.as_str(), p.to_string())).collect(),
        };
        serde_json::to_string_pretty(&listing).expect("listing serializes")
    }
}

fn gf2_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] {
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a ^= *b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// (1 ± P)/2 on `layout` (identity on non-qubit factors).
pub fn pauli_projector(p: &PauliString, sign: i8, layout: &HilbertLayout) -> Result<Operator> {
    if !p.is_hermitian() {
        return Err(Error::InvalidParameter(format!(
            "{p} squares to −1 and has no ±1 projectors"
        )));
    }
    let s = if sign >= 0 { 0.5 } else { -0.5 };
    let pm = p.embed(layout)?;
    let id = CMatrix::identity(pm.dim(), pm.dim()).scale(0.5);
    Operator::new(id + pm.matrix() * C64::new(s, 0.0), layout.clone())
}

fn parse(text: &str, n: usize) -> PauliString {
    PauliString::parse(text, n).expect("built-in Pauli string")
}

/// Four-qubit erasure code ⟨Z1Z2, Z3Z4, X1X2X3X4⟩ with Z̄ = X1X2, X̄ = Z1Z3.
pub fn erasure_code() -> StabilizerCode {
    let n = 4;
    StabilizerCode {
        name: "erasure-4".into(),
        n,
        generators: vec![
            ("S1".into(), parse("Z1Z2", n)),
            ("S2".into(), parse("Z3Z4", n)),
            ("S3".into(), parse("X1X2X3X4", n)),
        ],
        logicals: vec![("Z".into(), parse("X1X2", n)), ("X".into(), parse("Z1Z3", n))],
    }
}

/// Logical codewords |±⟩ = ½(|gg⟩ ± |ee⟩)(|gg⟩ ± |ee⟩) as 16-component vectors.
pub fn erasure_codewords() -> (CVector, CVector) {
    // basis order |q1 q2 q3 q4⟩ with g = 0: gggg = 0, ggee = 3, eegg = 12, eeee = 15
    let word = |s: f64| {
        let mut v = CVector::zeros(16);
        v[0] = C64::new(0.5, 0.0);
        v[3] = C64::new(0.5 * s, 0.0);
        v[12] = C64::new(0.5 * s, 0.0);
        v[15] = C64::new(0.5, 0.0);
        v
    };
    (word(1.0), word(-1.0))
}

/// Qubit (zero-based) on edge `e` of a rows×cols torus.
///
/// Horizontal edges h(r, c) join vertices (r, c)–(r, c+1) and are numbered
/// row by row, alternating direction (row 0 left to right, row 1 right to
/// left, ...); vertical edges v(r, c) join (r, c)–(r+1, c) and follow
/// row-major after all horizontal ones. For a 2×2 torus this reproduces
/// the usual planar unfolding of the 8-qubit code.
#[derive(Clone, Copy, Debug)]
pub struct ToricLattice {
    pub rows: usize,
    pub cols: usize,
}

impl ToricLattice {
    pub fn n_qubits(&self) -> usize {
        2 * self.rows * self.cols
    }

    pub fn h(&self, r: usize, c: usize) -> usize {
        let (r, c) = (r % self.rows, c % self.cols);
        r * self.cols + if r % 2 == 0 { c } else { self.cols - 1 - c }
    }

    pub fn v(&self, r: usize, c: usize) -> usize {
        let (r, c) = (r % self.rows, c % self.cols);
        self.rows * self.cols + r * self.cols + c
    }

    /// Edges meeting at vertex (r, c).
    pub fn star(&self, r: usize, c: usize) -> [usize; 4] {
        let (rows, cols) = (self.rows, self.cols);
        [
            self.h(r, c),
            self.h(r, c + cols - 1),
            self.v(r, c),
            self.v(r + rows - 1, c),
        ]
    }

    /// Edges bounding the face with top-left vertex (r, c).
    pub fn plaquette(&self, r: usize, c: usize) -> [usize; 4] {
        [self.h(r, c), self.h(r + 1, c), self.v(r, c), self.v(r, c + 1)]
    }
}

/// Plaquettes P_i (Z-type) and stars S_i (X-type) on a rows×cols torus, plus
/// the incontractible loop logicals Z1, Z2, X1, X2.
pub fn toric_code_generators(rows: usize, cols: usize) -> Result<StabilizerCode> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter("toric lattice needs rows, cols ≥ 1".into()));
    }
    let lat = ToricLattice { rows, cols };
    let n = lat.n_qubits();
    let mut plaquettes = Vec::new();
    let mut stars = Vec::new();
    let mut k = 1;
    for r in 0..rows {
        for c in 0..cols {
            plaquettes.push((format!("P{k}"), PauliString::uniform(n, Pauli::Z, &lat.plaquette(r, c))?));
            stars.push((format!("S{k}"), PauliString::uniform(n, Pauli::X, &lat.star(r, c))?));
            k += 1;
        }
    }
    let row0: Vec<usize> = (0..cols).map(|c| lat.h(0, c)).collect();
    let col0_v: Vec<usize> = (0..rows).map(|r| lat.v(r, 0)).collect();
    let col0_h: Vec<usize> = (0..rows).map(|r| lat.h(r, 0)).collect();
    let row0_v: Vec<usize> = (0..cols).map(|c| lat.v(0, c)).collect();
    let logicals = vec![
        ("Z1".into(), PauliString::uniform(n, Pauli::Z, &row0)?),
        ("Z2".into(), PauliString::uniform(n, Pauli::Z, &col0_v)?),
        ("X1".into(), PauliString::uniform(n, Pauli::X, &col0_h)?),
        ("X2".into(), PauliString::uniform(n, Pauli::X, &row0_v)?),
    ];
    plaquettes.extend(stars);
    Ok(StabilizerCode {
        name: format!("toric-{rows}x{cols}"),
        n,
        generators: plaquettes,
        logicals,
    })
}

/// Cluster-state generators S_i = X_i Π_{j∈nn(i)} Z_j for a simple graph
/// with zero-based vertices.
pub fn cluster_state_generators(n_vertices: usize, edges: &[(usize, usize)]) -> Result<StabilizerCode> {
    let mut seen = std::collections::BTreeSet::new();
    for &(a, b) in edges {
        if a == b {
            return Err(Error::InvalidParameter(format!("self-loop on vertex {}", a + 1)));
        }
        if a >= n_vertices || b >= n_vertices {
            return Err(Error::InvalidParameter(format!("edge ({}, {}) outside the graph", a + 1, b + 1)));
        }
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(Error::InvalidParameter(format!("repeated edge ({}, {})", a + 1, b + 1)));
        }
    }
    let mut generators = Vec::with_capacity(n_vertices);
    for i in 0..n_vertices {
        let mut g = PauliString::single(n_vertices, i, Pauli::X);
        for &(a, b) in &seen {
            let other = if a == i {
                b
            } else if b == i {
                a
            } else {
                continue;
            };
            g = g.mul(&PauliString::single(n_vertices, other, Pauli::Z))?;
        }
        generators.push((format!("S{}", i + 1), g));
    }
    Ok(StabilizerCode {
        name: format!("cluster-{n_vertices}"),
        n: n_vertices,
        generators,
        logicals: Vec::new(),
    })
}
