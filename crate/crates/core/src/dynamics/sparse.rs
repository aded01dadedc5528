//! Compressed-row operators, plain and in the interaction picture.

use crate::tensorspace::HilbertLayout;
use crate::{CMatrix, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Csr {
    /// Builds from (row, col, value) triplets, summing duplicates and dropping zeros.
    pub fn from_triplets(dim: usize, mut trips: Vec<(usize, usize, C64)>) -> Self {
        trips.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(trips.len());
        let mut vals: Vec<C64> = Vec::with_capacity(trips.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(trips.len());
        for (r, c, v) in trips {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
                last = Some((r, c));
            }
        }
        let keep: Vec<bool> = vals.iter().map(|v| v.norm() != 0.0).collect();
        let mut c2 = Vec::with_capacity(cols.len());
        let mut v2 = Vec::with_capacity(vals.len());
        for i in 0..cols.len() {
            if keep[i] {
                row_ptr[rows[i] + 1] += 1;
                c2.push(cols[i]);
                v2.push(vals[i]);
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            dim,
            row_ptr,
            cols: c2,
            vals: v2,
        }
    }

    /// `local` acting on factor `pos` of `layout`, identity elsewhere.
    pub fn embed(layout: &HilbertLayout, pos: usize, local: &CMatrix) -> Self {
        let dims = layout.dims();
        let stride: usize = dims[pos + 1..].iter().product();
        let d = dims[pos];
        let dim = layout.total_dim();
        let mut trips = Vec::new();
        for row in 0..dim {
            let a = (row / stride) % d;
            for b in 0..d {
                let v = local[(a, b)];
                if v.norm() != 0.0 {
                    let col = row + b * stride - a * stride;
                    trips.push((row, col, v));
                }
            }
        }
        Self::from_triplets(dim, trips)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let trips = values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(values.len(), trips)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= s;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(r, c, v)| (c, r, v.conj())).collect())
    }

    pub fn sum(&self, other: &Csr) -> Self {
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()).collect())
    }

    pub fn product(&self, other: &Csr) -> Self {
        let mut trips = Vec::new();
        for r in 0..self.dim {
            for e in self.row_ptr[r]..self.row_ptr[r + 1] {
                let k = self.cols[e];
                for f in other.row_ptr[k]..other.row_ptr[k + 1] {
                    trips.push((r, other.cols[f], self.vals[e] * other.vals[f]));
                }
            }
        }
        Self::from_triplets(self.dim, trips)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |e| (r, self.cols[e], self.vals[e]))
        })
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        for r in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for e in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[e] * x[self.cols[e]];
            }
            y[r] = acc;
        }
    }
}

/// Operator O_I(t) = e^{iEt} Σⱼ cⱼ(t) Oⱼ e^{−iEt} for diagonal energies E.
///
/// Each stored entry (k, l) carries the Bohr frequency E_k − E_l and the list
/// of terms contributing to it; [`PictureOp::update`] refreshes the values for
/// a new time and new term coefficients.
#[derive(Clone, Debug)]
pub struct PictureOp {
    dim: usize,
    pub(crate) row_ptr: Vec<usize>,
    pub(crate) cols: Vec<usize>,
    freq: Vec<f64>,
    contrib_ptr: Vec<usize>,
    contrib_term: Vec<usize>,
    contrib_base: Vec<C64>,
    pub(crate) vals: Vec<C64>,
    /// Conjugated values, kept for the ρA† side of the Lindblad kernel.
    pub(crate) conj_vals: Vec<C64>,
    n_terms: usize,
}

impl PictureOp {
    pub fn new(energies: &[f64], terms: &[Csr]) -> Self {
        let dim = energies.len();
        let mut trips: Vec<(usize, usize, usize, C64)> = Vec::new();
        for (j, t) in terms.iter().enumerate() {
            assert_eq!(t.dim(), dim, "term dimension mismatch");
            for (r, c, v) in t.triplets() {
                trips.push((r, c, j, v));
            }
        }
        trips.sort_by_key(|&(r, c, j, _)| (r, c, j));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::new();
        let mut freq = Vec::new();
        let mut contrib_ptr = vec![0usize];
        let mut contrib_term = Vec::new();
        let mut contrib_base = Vec::new();
        let mut last = None;
        for (r, c, j, v) in trips {
            if last != Some((r, c)) {
                if last.is_some() {
                    contrib_ptr.push(contrib_term.len());
                }
                row_ptr[r + 1] += 1;
                cols.push(c);
                freq.push(energies[r] - energies[c]);
                last = Some((r, c));
            }
            contrib_term.push(j);
            contrib_base.push(v);
        }
        if last.is_some() {
            contrib_ptr.push(contrib_term.len());
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        let nnz = cols.len();
        Self {
            dim,
            row_ptr,
            cols,
            freq,
            contrib_ptr,
            contrib_term,
            contrib_base,
            vals: vec![C64::new(0.0, 0.0); nnz],
            conj_vals: vec![C64::new(0.0, 0.0); nnz],
            n_terms: terms.len(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    /// Sets the values for segment-local time `t` and term coefficients `coefs`.
    pub fn update(&mut self, t: f64, coefs: &[C64]) {
        debug_assert_eq!(coefs.len(), self.n_terms);
        for e in 0..self.cols.len() {
            let mut acc = C64::new(0.0, 0.0);
            for c in self.contrib_ptr[e]..self.contrib_ptr[e + 1] {
                acc += coefs[self.contrib_term[c]] * self.contrib_base[c];
            }
            let f = self.freq[e];
            let v = if f == 0.0 { acc } else { acc * C64::from_polar(1.0, f * t) };
            self.vals[e] = v;
            self.conj_vals[e] = v.conj();
        }
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        for r in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for e in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[e] * x[self.cols[e]];
            }
            y[r] = acc;
        }
    }

    #[inline]
    pub(crate) fn row(&self, r: usize) -> std::ops::Range<usize> {
        self.row_ptr[r]..self.row_ptr[r + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorspace::{embed_operator, ops};

    #[test]
    fn embed_matches_dense() {
        let l = HilbertLayout::cavity_qed(2, 4, true);
        for (pos, local) in [
            (0, ops::sigma_minus()),
            (1, ops::sigma_z()),
            (2, ops::annihilation(4)),
            (3, ops::sigma_x()),
        ] {
            let sparse = Csr::embed(&l, pos, &local).to_dense();
            let dense = embed_operator(&local, pos, &l).unwrap();
            assert_eq!(&sparse, dense.matrix());
        }
    }

    #[test]
    fn picture_phases() {
        let e = [0.0, 1.5];
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(2.0, 0.0);
        let op = Csr::from_triplets(2, vec![(0, 1, C64::new(2.0, 0.0))]);
        let mut p = PictureOp::new(&e, &[op.clone(), op]);
        p.update(0.3, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let expected = C64::new(2.0, 2.0) * C64::from_polar(1.0, -1.5 * 0.3);
        assert!((p.vals[0] - expected).norm() < 1e-15);
    }
}
