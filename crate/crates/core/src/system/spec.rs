use crate::tensorspace::{embed_operator, ops, HilbertLayout, Operator};
use crate::{CMatrix, Error, Result, C64};

/// Physical parameters. Frequencies in rad/ns, times in ns.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub n_qubits: usize,
    /// Dispersive shift χᵢ of each system qubit.
    pub chi: Vec<f64>,
    /// Magnitude K of the −K a†a†aa self-Kerr term.
    pub kerr: f64,
    /// Ancilla dispersive shift; `None` means no ancilla in the layout.
    pub chi_ancilla: Option<f64>,
    pub kappa: f64,
    /// Relaxation time, `f64::INFINITY` to disable.
    pub t1: f64,
    /// Coherence time, `f64::INFINITY` to disable.
    pub t2: f64,
    pub fock_dim: usize,
}

impl SystemSpec {
    /// N qubits with a common χ, no dissipation and no ancilla.
    pub fn uniform(n_qubits: usize, chi: f64, kerr: f64, fock_dim: usize) -> Self {
        Self {
            n_qubits,
            chi: vec![chi; n_qubits],
            kerr,
            chi_ancilla: None,
            kappa: 0.0,
            t1: f64::INFINITY,
            t2: f64::INFINITY,
            fock_dim,
        }
    }

    pub fn with_decoherence(mut self, kappa: f64, t1: f64, t2: f64) -> Self {
        self.kappa = kappa;
        self.t1 = t1;
        self.t2 = t2;
        self
    }

    pub fn with_ancilla(mut self, chi_ancilla: f64) -> Self {
        self.chi_ancilla = Some(chi_ancilla);
        self
    }

    pub fn with_fock_dim(mut self, fock_dim: usize) -> Self {
        self.fock_dim = fock_dim;
        self
    }

    /// Same parameters with every dissipation channel switched off.
    pub fn lossless(&self) -> Self {
        let mut s = self.clone();
        s.kappa = 0.0;
        s.t1 = f64::INFINITY;
        s.t2 = f64::INFINITY;
        s
    }

    pub fn has_ancilla(&self) -> bool {
        self.chi_ancilla.is_some()
    }

    pub fn layout(&self) -> HilbertLayout {
        HilbertLayout::cavity_qed(self.n_qubits, self.fock_dim, self.has_ancilla())
    }

    pub fn dim(&self) -> usize {
        self.layout().total_dim()
    }

    /// The common χ if all qubits share it (relative tolerance 1e-12).
    pub fn equal_chi(&self) -> Option<f64> {
        let first = *self.chi.first()?;
        self.chi
            .iter()
            .all(|&c| (c - first).abs() <= 1e-12 * first.abs().max(1e-300))
            .then_some(first)
    }

    pub fn max_chi(&self) -> f64 {
        self.chi.iter().fold(0.0f64, |a, &c| a.max(c.abs()))
    }

    pub fn is_lossless(&self) -> bool {
        self.kappa == 0.0 && self.t1.is_infinite() && self.t2.is_infinite()
    }

    /// Checks invariants; returns advisory warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.chi.len() != self.n_qubits {
            return Err(Error::InvalidParameter(format!(
                "{} dispersive shifts for {} qubits",
                self.chi.len(),
                self.n_qubits
            )));
        }
        if self.fock_dim < 2 {
            return Err(Error::InvalidParameter(format!("fock_dim {} < 2", self.fock_dim)));
        }
        let finite = self.chi.iter().all(|c| c.is_finite())
            && self.kerr.is_finite()
            && self.chi_ancilla.map_or(true, f64::is_finite)
            && self.kappa.is_finite();
        if !finite {
            return Err(Error::InvalidParameter("non-finite frequency or rate".into()));
        }
        if self.kerr < 0.0 {
            return Err(Error::InvalidParameter(
                "kerr is the magnitude of the −K a†a†aa term and must be ≥ 0".into(),
            ));
        }
        if self.kappa < 0.0 || !(self.t1 > 0.0) || !(self.t2 > 0.0) {
            return Err(Error::InvalidParameter(
                "rates must be ≥ 0 and T1, T2 must be > 0".into(),
            ));
        }
        self.rates()?;
        let mut warnings = Vec::new();
        if let Some(chi_a) = self.chi_ancilla {
            let needed = 10.0 * self.n_qubits as f64 * self.max_chi();
            if chi_a.abs() < needed {
                warnings.push(format!(
                    "ancilla shift {chi_a:.4} rad/ns is below 10·N·max χ = {needed:.4} rad/ns"
                ));
            }
        }
        Ok(warnings)
    }

    /// Relaxation and pure-dephasing rates.
    pub fn rates(&self) -> Result<DecoherenceRates> {
        let gamma_minus = if self.t1.is_infinite() { 0.0 } else { 1.0 / self.t1 };
        let inv_t2 = if self.t2.is_infinite() { 0.0 } else { 1.0 / self.t2 };
        let gamma_phi = inv_t2 - gamma_minus / 2.0;
        if gamma_phi < -1e-15 {
            return Err(Error::InvalidParameter(format!(
                "T2 = {} ns exceeds 2·T1 = {} ns (negative dephasing rate)",
                self.t2,
                2.0 * self.t1
            )));
        }
        Ok(DecoherenceRates {
            gamma_minus,
            gamma_phi: gamma_phi.max(0.0),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoherenceRates {
    /// Γ₋ = 1/T1
    pub gamma_minus: f64,
    /// Γ_φ = 1/T2 − 1/(2T1)
    pub gamma_phi: f64,
}

/// Diagonal of H for each basis index of `spec.layout()`.
///
/// `shifted` lists qubits whose dispersive term uses (a†a − n̄) instead of a†a,
/// which is the frame used while those qubits are driven.
pub fn diagonal_energies(spec: &SystemSpec, shifted: &[(usize, f64)]) -> Vec<f64> {
    let layout = spec.layout();
    let cav = layout.cavity().expect("system layout has a cavity");
    let anc = layout.ancilla();
    let mut shift = vec![0.0; spec.n_qubits];
    for &(q, nbar) in shifted {
        if q < spec.n_qubits {
            shift[q] = nbar;
        }
    }
    (0..layout.total_dim())
        .map(|idx| {
            let n = layout.digit(idx, cav) as f64;
            let mut e = -spec.kerr * n * (n - 1.0);
            for q in 0..spec.n_qubits {
                let s = if layout.digit(idx, q) == 1 { 1.0 } else { -1.0 };
                e += spec.chi[q] * s * (n - shift[q]);
            }
            if let (Some(p), Some(chi_a)) = (anc, spec.chi_ancilla) {
                if layout.digit(idx, p) == 1 {
                    e += 2.0 * chi_a * n;
                }
            }
            e
        })
        .collect()
}

/// Dense Hamiltonian on the composite space.
pub fn build_hamiltonian(spec: &SystemSpec) -> Result<Operator> {
    spec.validate()?;
    let e = diagonal_energies(spec, &[]);
    let m = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        e.len(),
        e.iter().map(|&x| C64::new(x, 0.0)),
    ));
    Operator::new(m, spec.layout())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelKind {
    /// L = a
    PhotonLoss,
    /// L = σᶻ of a system qubit
    Dephasing(usize),
    /// L = σ⁻ of a system qubit
    Relaxation(usize),
}

/// One dissipator rate·(LρL† − ½{L†L, ρ}).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollapseChannel {
    pub kind: ChannelKind,
    pub rate: f64,
}

impl CollapseChannel {
    /// Local matrix of L and the layout position it acts on.
    pub fn local(&self, spec: &SystemSpec) -> (usize, CMatrix) {
        let layout = spec.layout();
        match self.kind {
            ChannelKind::PhotonLoss => (
                layout.cavity().expect("cavity"),
                ops::annihilation(spec.fock_dim),
            ),
            ChannelKind::Dephasing(q) => (q, ops::sigma_z()),
            ChannelKind::Relaxation(q) => (q, ops::sigma_minus()),
        }
    }
}

/// Non-zero dissipators: κ D[a], (Γ_φ/2) D[σᵢᶻ], Γ₋ D[σᵢ⁻]. The ancilla is noiseless.
pub fn collapse_channels(spec: &SystemSpec) -> Result<Vec<CollapseChannel>> {
    let rates = spec.rates()?;
    let mut out = Vec::new();
    if spec.kappa > 0.0 {
        out.push(CollapseChannel {
            kind: ChannelKind::PhotonLoss,
            rate: spec.kappa,
        });
    }
    for q in 0..spec.n_qubits {
        if rates.gamma_phi > 0.0 {
            out.push(CollapseChannel {
                kind: ChannelKind::Dephasing(q),
                rate: rates.gamma_phi / 2.0,
            });
        }
        if rates.gamma_minus > 0.0 {
            out.push(CollapseChannel {
                kind: ChannelKind::Relaxation(q),
                rate: rates.gamma_minus,
            });
        }
    }
    Ok(out)
}

/// Dense (rate, L) pairs on the composite space.
pub fn collapse_operators(spec: &SystemSpec) -> Result<Vec<(f64, Operator)>> {
    spec.validate()?;
    let layout = spec.layout();
    collapse_channels(spec)?
        .into_iter()
        .map(|ch| {
            let (pos, local) = ch.local(spec);
            Ok((ch.rate, embed_operator(&local, pos, &layout)?))
        })
        .collect()
}

/// Result of the K ≥ χ²/(4α_q) accessibility check.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidityReport {
    pub min_kerr: f64,
    pub kerr: f64,
    pub accessible: bool,
}

/// Checks whether (χ, K) lies in the physically accessible region for a
/// transmon-like coupler with anharmonicity `alpha_q` (rad/ns). Advisory only.
pub fn validate_parameters(spec: &SystemSpec, alpha_q: f64) -> Result<ValidityReport> {
    if !(alpha_q > 0.0) {
        return Err(Error::InvalidParameter(format!("anharmonicity {alpha_q} must be > 0")));
    }
    let chi = spec.max_chi();
    let min_kerr = chi * chi / (4.0 * alpha_q);
    Ok(ValidityReport {
        min_kerr,
        kerr: spec.kerr,
        accessible: spec.kerr >= min_kerr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{khz, mhz, us};

    #[test]
    fn zero_hamiltonian() {
        let h = build_hamiltonian(&SystemSpec::uniform(1, 0.0, 0.0, 4)).unwrap();
        assert_eq!(h.matrix().camax(), 0.0);
    }

    #[test]
    fn excited_two_photon_level() {
        let spec = SystemSpec::uniform(1, mhz(5.0), 0.0, 3);
        let h = build_hamiltonian(&spec).unwrap();
        let l = spec.layout();
        let idx = l.index_of(&[1, 2]).unwrap();
        assert!((h.matrix()[(idx, idx)].re - 0.06283185307179587).abs() < 1e-12);
        assert!(h.hermiticity_error() < 1e-12);
        assert!(h.max_off_diagonal() < 1e-14);
    }

    #[test]
    fn commutes_with_parities() {
        let spec = SystemSpec::uniform(2, mhz(5.0), khz(80.0), 6).with_ancilla(mhz(100.0));
        let h = build_hamiltonian(&spec).unwrap();
        let l = spec.layout();
        let z1 = embed_operator(&ops::sigma_z(), 0, &l).unwrap();
        let z2 = embed_operator(&ops::sigma_z(), 1, &l).unwrap();
        assert!(h.commutator_norm(&(&z1 * &z2)).unwrap() < 1e-12);
        assert!(h.commutator_norm(&z1).unwrap() < 1e-12);
    }

    #[test]
    fn decoherence_rates() {
        let spec = SystemSpec::uniform(1, mhz(5.0), 0.0, 4).with_decoherence(
            khz(10.0),
            us(20.0),
            us(20.0),
        );
        let r = spec.rates().unwrap();
        assert!((r.gamma_phi - 2.5e-5).abs() < 1e-18);
        assert!((r.gamma_minus - 5e-5).abs() < 1e-18);
        assert!((spec.kappa - 6.283185307179586e-5).abs() < 1e-15);
        let ops = collapse_operators(&spec).unwrap();
        assert_eq!(ops.len(), 3);
        assert!((ops[1].0 - 1.25e-5).abs() < 1e-18);
        let none = SystemSpec::uniform(1, mhz(5.0), 0.0, 4);
        assert!(collapse_operators(&none).unwrap().is_empty());
        let bad = none.with_decoherence(0.0, 10.0, 30.0);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn accessibility() {
        let spec = SystemSpec::uniform(4, mhz(5.0), khz(80.0), 10);
        let r = validate_parameters(&spec, mhz(200.0)).unwrap();
        assert!((r.min_kerr - khz(31.25)).abs() < 1e-15);
        assert!(r.accessible);
        let no_kerr = SystemSpec::uniform(4, mhz(5.0), 0.0, 10);
        assert!(!validate_parameters(&no_kerr, mhz(200.0)).unwrap().accessible);
        let no_chi = SystemSpec::uniform(4, 0.0, 0.0, 10);
        assert!(validate_parameters(&no_chi, mhz(200.0)).unwrap().accessible);
    }

    #[test]
    fn ancilla_warning() {
        let spec = SystemSpec::uniform(4, mhz(5.0), 0.0, 10).with_ancilla(mhz(100.0));
        assert_eq!(spec.validate().unwrap().len(), 1);
        let spec = SystemSpec::uniform(4, mhz(5.0), 0.0, 10).with_ancilla(mhz(200.0));
        assert!(spec.validate().unwrap().is_empty());
    }
}
