//! Instantaneous operations: gates, resets and projective measurements.

use rand::Rng;

use super::sparse::Csr;
use crate::stabilizer::PauliString;
use crate::tensorspace::{HilbertLayout, QuantumState, Representation};
use crate::{CMatrix, CVector, Error, Result, SimRng, C64};

/// Outcomes with probability below this are never sampled.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-12;

/// Product of local operators, each acting on one factor of `layout`.
pub fn local_operator(layout: &HilbertLayout, factors: &[(usize, CMatrix)]) -> Result<Csr> {
    let mut acc = Csr::identity(layout.total_dim());
    for (pos, m) in factors {
        let d = *layout
            .dims()
            .get(*pos)
            .ok_or_else(|| Error::Dimension(format!("no factor {pos} in {layout}")))?;
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Dimension(format!(
                "{}x{} operator on a factor of dimension {d}",
                m.nrows(),
                m.ncols()
            )));
        }
        acc = Csr::embed(layout, *pos, m).product(&acc);
    }
    Ok(acc)
}

/// U·M for sparse U and dense M.
fn csr_times_dense(u: &Csr, m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut out = vec![C64::new(0.0, 0.0); n * m.ncols()];
    for (src, dst) in m.as_slice().chunks(n).zip(out.chunks_mut(n)) {
        u.matvec(src, dst);
    }
    CMatrix::from_vec(n, m.ncols(), out)
}

fn hermitian_part(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()).scale(0.5)
}

/// U|ψ⟩ or UρU† (no renormalization).
pub fn apply_csr(state: &QuantumState, u: &Csr) -> Result<QuantumState> {
    if u.dim() != state.dim() {
        return Err(Error::Dimension(format!(
            "operator dimension {} vs state dimension {}",
            u.dim(),
            state.dim()
        )));
    }
    let layout = state.layout().clone();
    Ok(match state.representation() {
        Representation::Pure(v) => {
            let mut out = vec![C64::new(0.0, 0.0); v.len()];
            u.matvec(v.as_slice(), &mut out);
            QuantumState::from_vector(CVector::from_vec(out), layout)
        }
        Representation::Density(rho) => {
            // UρU† = U (Uρ)† for Hermitian ρ
            let x = csr_times_dense(u, rho);
            QuantumState::from_matrix(hermitian_part(csr_times_dense(u, &x.adjoint())), layout)
        }
    })
}

pub fn apply_local(state: &QuantumState, factors: &[(usize, CMatrix)]) -> Result<QuantumState> {
    let u = local_operator(state.layout(), factors)?;
    apply_csr(state, &u)
}

/// Replaces factor `pos` by its ground state, tracing out what was there.
///
/// A pure state stays pure when the factor was not entangled with the rest;
/// otherwise the result is returned as a density matrix.
pub fn reset_factor(state: &QuantumState, pos: usize) -> Result<QuantumState> {
    let layout = state.layout();
    if pos >= layout.len() {
        return Err(Error::Dimension(format!("no factor {pos} in {layout}")));
    }
    let d = layout.dims()[pos];
    let stride = layout.strides()[pos];
    let dim = layout.total_dim();
    let grounds: Vec<usize> = (0..dim).filter(|&i| layout.digit(i, pos) == 0).collect();
    match state.representation() {
        Representation::Pure(psi) => {
            // branches v_k = ⟨k|ψ⟩ placed on |0⟩
            let branches: Vec<Vec<C64>> = (0..d)
                .map(|k| grounds.iter().map(|&i| psi[i + k * stride]).collect())
                .collect();
            let norms: Vec<f64> = branches
                .iter()
                .map(|b| b.iter().map(|z| z.norm_sqr()).sum())
                .collect();
            let (kmax, &nmax) = norms
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            let lead = &branches[kmax];
            let product = branches.iter().zip(&norms).all(|(b, &nb)| {
                let ov: C64 = lead.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                (ov.norm_sqr() - nmax * nb).abs() <= 1e-12 * nmax.max(1e-300)
            });
            if product {
                let mut out = CVector::zeros(dim);
                let total: f64 = norms.iter().sum();
                let scale = total.sqrt() / nmax.sqrt();
                for (&i, &z) in grounds.iter().zip(lead) {
                    out[i] = z * scale;
                }
                return Ok(QuantumState::from_vector(out, layout.clone()));
            }
            let mut out = CMatrix::zeros(dim, dim);
            for b in &branches {
                for (jj, &j) in grounds.iter().enumerate() {
                    let cj = b[jj].conj();
                    if cj == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for (ii, &i) in grounds.iter().enumerate() {
                        out[(i, j)] += b[ii] * cj;
                    }
                }
            }
            Ok(QuantumState::from_matrix(out, layout.clone()))
        }
        Representation::Density(rho) => {
            let mut out = CMatrix::zeros(dim, dim);
            for &j in &grounds {
                for &i in &grounds {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..d {
                        acc += rho[(i + k * stride, j + k * stride)];
                    }
                    out[(i, j)] = acc;
                }
            }
            Ok(QuantumState::from_matrix(out, layout.clone()))
        }
    }
}

/// Probabilities of each level of factor `pos`.
pub fn level_probabilities(state: &QuantumState, pos: usize) -> Vec<f64> {
    let layout = state.layout();
    let mut p = vec![0.0; layout.dims()[pos]];
    for (i, w) in state.populations().into_iter().enumerate() {
        p[layout.digit(i, pos)] += w;
    }
    p
}

fn sample(probs: &[f64], rng: &mut SimRng) -> Result<usize> {
    let total: f64 = probs
        .iter()
        .filter(|&&p| p >= MIN_OUTCOME_PROBABILITY)
        .sum();
    if !(total > 0.0) {
        return Err(Error::Numerical("no measurement outcome has non-zero probability".into()));
    }
    let mut r = rng.gen::<f64>() * total;
    let mut last = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p < MIN_OUTCOME_PROBABILITY {
            continue;
        }
        last = k;
        if r < p {
            return Ok(k);
        }
        r -= p;
    }
    Ok(last)
}

fn renormalize(state: QuantumState, p: f64) -> QuantumState {
    match state.into_parts() {
        (Representation::Pure(v), layout) => QuantumState::from_vector(v / C64::new(p.sqrt(), 0.0), layout),
        (Representation::Density(m), layout) => QuantumState::from_matrix(m / C64::new(p, 0.0), layout),
    }
}

/// Projects factor `pos` onto `level` without renormalizing.
pub fn project_level(state: &QuantumState, pos: usize, level: usize) -> QuantumState {
    let layout = state.layout().clone();
    let keep: Vec<bool> = (0..state.dim()).map(|i| layout.digit(i, pos) == level).collect();
    match state.representation() {
        Representation::Pure(v) => {
            let out = CVector::from_iterator(
                v.len(),
                v.iter().zip(&keep).map(|(&z, &k)| if k { z } else { C64::new(0.0, 0.0) }),
            );
            QuantumState::from_vector(out, layout)
        }
        Representation::Density(m) => {
            let mut out = m.clone();
            for j in 0..m.ncols() {
                for i in 0..m.nrows() {
                    if !(keep[i] && keep[j]) {
                        out[(i, j)] = C64::new(0.0, 0.0);
                    }
                }
            }
            QuantumState::from_matrix(out, layout)
        }
    }
}

/// Projective measurement of factor `pos` in its level basis.
///
/// Returns the post-measurement state, the observed level and its probability.
pub fn measure_factor(
    state: &QuantumState,
    pos: usize,
    rng: &mut SimRng,
) -> Result<(QuantumState, usize, f64)> {
    if pos >= state.layout().len() {
        return Err(Error::Dimension(format!("no factor {pos} in {}", state.layout())));
    }
    let probs = level_probabilities(state, pos);
    let level = sample(&probs, rng)?;
    let p = probs[level];
    Ok((renormalize(project_level(state, pos, level), p), level, p))
}

/// (1 + sP)/2 applied on the left of a vector or matrix (column-major data).
fn pauli_project_left(perm: &[usize], phases: &[C64], sign: f64, m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut out = m.scale(0.5);
    let h = C64::new(0.5 * sign, 0.0);
    for j in 0..m.ncols() {
        for i in 0..n {
            out[(perm[i], j)] += h * phases[i] * m[(i, j)];
        }
    }
    out
}

/// Projects onto the ±1 eigenspace of a Hermitian Pauli string (unnormalized).
pub fn project_pauli(state: &QuantumState, pauli: &PauliString, sign: i8) -> Result<QuantumState> {
    if !pauli.is_hermitian() {
        return Err(Error::InvalidParameter(format!("{pauli} is not Hermitian")));
    }
    let (perm, phases) = pauli.action(state.layout())?;
    let s = f64::from(sign.signum());
    let layout = state.layout().clone();
    Ok(match state.representation() {
        Representation::Pure(v) => {
            let m = CMatrix::from_column_slice(v.len(), 1, v.as_slice());
            let out = pauli_project_left(&perm, &phases, s, &m);
            QuantumState::from_vector(CVector::from_column_slice(out.as_slice()), layout)
        }
        Representation::Density(rho) => {
            let x = pauli_project_left(&perm, &phases, s, rho);
            let y = pauli_project_left(&perm, &phases, s, &x.adjoint());
            QuantumState::from_matrix(hermitian_part(y), layout)
        }
    })
}

/// Ideal projective measurement of a Pauli string; returns the eigenvalue ±1.
pub fn measure_pauli(
    state: &QuantumState,
    pauli: &PauliString,
    rng: &mut SimRng,
) -> Result<(QuantumState, i8, f64)> {
    let ev = pauli.expectation(state)? / state.trace();
    let p_plus = (0.5 * (1.0 + ev)).clamp(0.0, 1.0);
    let outcome = sample(&[p_plus, 1.0 - p_plus], rng)?;
    let (sign, p) = if outcome == 0 { (1i8, p_plus) } else { (-1i8, 1.0 - p_plus) };
    let projected = project_pauli(state, pauli, sign)?;
    let p_actual = projected.trace();
    Ok((renormalize(projected, p_actual), sign, p))
}

/// Population in the two highest Fock levels of the cavity (0 without a cavity).
pub fn fock_tail_population(state: &QuantumState) -> f64 {
    let layout = state.layout();
    let Some(pos) = layout.cavity() else {
        return 0.0;
    };
    let d = layout.dims()[pos];
    let top = d.saturating_sub(2);
    state
        .populations()
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| layout.digit(i, pos) >= top)
        .map(|(_, w)| w)
        .sum()
}
