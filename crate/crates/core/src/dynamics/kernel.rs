//! Right-hand sides for the interaction-picture equations of motion.
//!
//! Density matrices are stored as their lower triangle, row by row
//! (entry (k, l), l ≤ k, at k(k+1)/2 + l). The Lindblad kernel fills only that
//! triangle, reading from a full row-major copy of ρ rebuilt on every call.

use super::sparse::PictureOp;
use crate::exec::{for_each_chunk_mut, Execution};
use crate::{CMatrix, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

pub fn packed_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

#[inline]
fn row_start(k: usize) -> usize {
    k * (k + 1) / 2
}

pub fn pack(m: &CMatrix) -> Vec<C64> {
    let dim = m.nrows();
    let mut out = Vec::with_capacity(packed_len(dim));
    for k in 0..dim {
        for l in 0..=k {
            out.push(m[(k, l)]);
        }
    }
    out
}

pub fn unpack(p: &[C64], dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let r = &p[row_start(k)..row_start(k) + k + 1];
        for l in 0..k {
            m[(k, l)] = r[l];
            m[(l, k)] = r[l].conj();
        }
        m[(k, k)] = C64::new(r[k].re, 0.0);
    }
    m
}

/// Fills a full row-major matrix from packed storage, working in tiles.
fn unpack_rows(p: &[C64], dim: usize, full: &mut [C64]) {
    const TILE: usize = 48;
    for kb in (0..dim).step_by(TILE) {
        let kend = (kb + TILE).min(dim);
        for lb in (0..kend).step_by(TILE) {
            for k in kb..kend {
                let rs = row_start(k);
                let lend = (lb + TILE).min(k + 1);
                for l in lb..lend {
                    let v = p[rs + l];
                    full[k * dim + l] = v;
                    full[l * dim + k] = v.conj();
                }
            }
        }
    }
}

/// Trace, purity and smallest diagonal entry of a packed density matrix.
pub fn packed_stats(p: &[C64], dim: usize) -> (f64, f64, f64) {
    let mut tr = 0.0;
    let mut pur = 0.0;
    let mut min_diag = f64::INFINITY;
    for k in 0..dim {
        let rs = row_start(k);
        for l in 0..k {
            pur += 2.0 * p[rs + l].norm_sqr();
        }
        let d = p[rs + k].re;
        tr += d;
        pur += d * d;
        min_diag = min_diag.min(d);
    }
    (tr, pur, min_diag)
}

/// Removes imaginary parts that drift onto the diagonal.
pub fn zero_diagonal_imag(p: &mut [C64], dim: usize) {
    for k in 0..dim {
        p[row_start(k) + k].im = 0.0;
    }
}

/// Contiguous row groups of roughly equal triangle area.
fn row_groups(dim: usize, n_groups: usize) -> Vec<(usize, usize)> {
    let total = packed_len(dim) as f64;
    let mut groups = Vec::with_capacity(n_groups);
    let mut start = 0;
    for g in 1..=n_groups {
        let target = total * g as f64 / n_groups as f64;
        // rows up to r contain r(r+1)/2 entries
        let mut end = ((2.0 * target).sqrt()) as usize;
        while end < dim && row_start(end + 1) as f64 <= target {
            end += 1;
        }
        end = end.clamp(start, dim);
        if g == n_groups {
            end = dim;
        }
        if end > start {
            groups.push((start, end));
            start = end;
        }
    }
    groups
}

/// dρ/dt = Aρ + ρA† + Σ LρL† with all operators in the interaction picture.
pub struct LindbladKernel {
    dim: usize,
    full: Vec<C64>,
    groups: Vec<(usize, usize)>,
    exec: Execution,
}

impl LindbladKernel {
    pub fn new(dim: usize, exec: Execution) -> Self {
        let n_groups = if exec.is_parallel() { 64.min(dim.max(1)) } else { 1 };
        Self {
            dim,
            full: vec![ZERO; dim * dim],
            groups: row_groups(dim, n_groups),
            exec,
        }
    }

    pub fn apply(&mut self, a: &PictureOp, jumps: &[PictureOp], y: &[C64], dy: &mut [C64]) {
        let dim = self.dim;
        unpack_rows(y, dim, &mut self.full);
        let full = &self.full[..];
        let mut chunks = Vec::with_capacity(self.groups.len());
        let mut rest = dy;
        for &(r0, r1) in &self.groups {
            let (head, tail) = rest.split_at_mut(row_start(r1) - row_start(r0));
            chunks.push(head);
            rest = tail;
        }
        let groups = &self.groups;
        for_each_chunk_mut(self.exec, chunks, |g, chunk| {
            let (r0, r1) = groups[g];
            let base = row_start(r0);
            for k in r0..r1 {
                let out = &mut chunk[row_start(k) - base..row_start(k) - base + k + 1];
                lindblad_row(k, dim, full, a, jumps, out);
            }
        });
    }
}

#[inline]
fn lindblad_row(k: usize, dim: usize, full: &[C64], a: &PictureOp, jumps: &[PictureOp], out: &mut [C64]) {
    out.fill(ZERO);
    // (Aρ)_{kl} = Σ_e A_{ke} ρ_{el}
    for e in a.row(k) {
        let v = a.vals[e];
        let c = a.cols[e];
        let src = &full[c * dim..c * dim + k + 1];
        for (o, s) in out.iter_mut().zip(src) {
            *o += v * s;
        }
    }
    // (ρA†)_{kl} = Σ_f ρ_{kf} conj(A_{lf})
    let rk = &full[k * dim..(k + 1) * dim];
    for (l, o) in out.iter_mut().enumerate() {
        let mut s = ZERO;
        for f in a.row(l) {
            s += rk[a.cols[f]] * a.conj_vals[f];
        }
        *o += s;
    }
    // (LρL†)_{kl} = Σ_e L_{ke} Σ_f ρ_{ef} conj(L_{lf})
    for jump in jumps {
        for e in jump.row(k) {
            let u = jump.vals[e];
            let c = jump.cols[e];
            let src = &full[c * dim..(c + 1) * dim];
            for (l, o) in out.iter_mut().enumerate() {
                let mut s = ZERO;
                for f in jump.row(l) {
                    s += src[jump.cols[f]] * jump.conj_vals[f];
                }
                *o += u * s;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::sparse::Csr;

    #[test]
    fn pack_round_trip() {
        let m = CMatrix::from_fn(5, 5, |i, j| {
            if i == j {
                C64::new(i as f64, 0.0)
            } else if i > j {
                C64::new(i as f64, j as f64)
            } else {
                C64::new(j as f64, -(i as f64))
            }
        });
        assert_eq!(unpack(&pack(&m), 5), m);
        let mut full = vec![ZERO; 25];
        unpack_rows(&pack(&m), 5, &mut full);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(full[i * 5 + j], m[(i, j)]);
            }
        }
    }

    #[test]
    fn groups_cover_rows() {
        for dim in [1, 2, 7, 100, 1920] {
            for n in [1, 3, 64] {
                let g = row_groups(dim, n);
                assert_eq!(g.first().unwrap().0, 0);
                assert_eq!(g.last().unwrap().1, dim);
                assert!(g.windows(2).all(|w| w[0].1 == w[1].0));
            }
        }
    }

    #[test]
    fn kernel_matches_dense_formula() {
        let dim = 6;
        let energies: Vec<f64> = (0..dim).map(|i| 0.3 * i as f64).collect();
        let h = Csr::from_triplets(
            dim,
            vec![(1, 0, C64::new(0.5, 0.2)), (0, 1, C64::new(0.5, -0.2)), (4, 2, C64::new(0.1, 0.0)), (2, 4, C64::new(0.1, 0.0))],
        );
        let l = Csr::from_triplets(dim, (1..dim).map(|i| (i - 1, i, C64::new((i as f64).sqrt() * 0.2, 0.0))).collect());
        let b = l.adjoint().product(&l);
        let a_op = h.scaled(C64::new(0.0, -1.0)).sum(&b.scaled(C64::new(-0.5, 0.0)));
        let t = 0.7;
        let mut a = PictureOp::new(&energies, &[a_op.clone()]);
        a.update(t, &[C64::new(1.0, 0.0)]);
        let mut lj = PictureOp::new(&energies, &[l.clone()]);
        lj.update(t, &[C64::new(1.0, 0.0)]);
        let rho = CMatrix::from_fn(dim, dim, |i, j| {
            C64::new(1.0 / (1.0 + (i + j) as f64), 0.1 * (i as f64 - j as f64))
        });
        let mut dy = vec![ZERO; packed_len(dim)];
        let mut kern = LindbladKernel::new(dim, Execution::Sequential);
        kern.apply(&a, std::slice::from_ref(&lj), &pack(&rho), &mut dy);
        let phase = CMatrix::from_fn(dim, dim, |i, j| C64::from_polar(1.0, (energies[i] - energies[j]) * t));
        let ad = a_op.to_dense().component_mul(&phase);
        let ld = l.to_dense().component_mul(&phase);
        let expected = &ad * &rho + &rho * ad.adjoint() + &ld * &rho * ld.adjoint();
        let got = unpack(&dy, dim);
        for i in 0..dim {
            for j in 0..=i {
                assert!((got[(i, j)] - expected[(i, j)]).norm() < 1e-12);
            }
        }
        let mut dy2 = vec![ZERO; packed_len(dim)];
        LindbladKernel::new(dim, Execution::Parallel).apply(&a, std::slice::from_ref(&lj), &pack(&rho), &mut dy2);
        assert_eq!(dy, dy2);
    }
}
