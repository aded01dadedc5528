//! Property tests for the Pauli algebra, tomography and evolution invariants.

use cavity_parity::dynamics::{run_schedule, EvolutionOptions};
use cavity_parity::protocols::{parity_encoding_schedule, PulseDurations, PulseSchedule};
use cavity_parity::stabilizer::{pauli_bars, PauliString};
use cavity_parity::system::SystemSpec;
use cavity_parity::tensorspace::{HilbertLayout, QuantumState};
use cavity_parity::units::{khz, mhz};
use cavity_parity::{rng_for, CMatrix, CVector, C64};
use proptest::prelude::*;

fn pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (prop::collection::vec(any::<bool>(), n), prop::collection::vec(any::<bool>(), n), 0u8..4)
        .prop_map(|(x, z, ph)| PauliString::from_bits(x, z, ph).unwrap())
}

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), len)
}

fn density(n: usize, entries: &[(f64, f64)]) -> QuantumState {
    let d = 1 << n;
    let g = CMatrix::from_fn(d, d, |i, j| {
        let (re, im) = entries[i * d + j];
        C64::new(re, im)
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    QuantumState::density(rho / tr, HilbertLayout::qubits(n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn commutation_matches_dense_matrices(a in pauli(3), b in pauli(3)) {
        let (ma, mb) = (a.to_matrix(), b.to_matrix());
        let comm = &ma * &mb - &mb * &ma;
        prop_assert_eq!(a.commutes(&b), comm.norm() < 1e-12);
        let prod = a.mul(&b).unwrap().to_matrix();
        prop_assert!((prod - &ma * &mb).norm() < 1e-12);
    }

    #[test]
    fn pauli_bars_are_bounded(entries in complex_vec(64)) {
        let rho = density(3, &entries);
        let bars = pauli_bars(&rho).unwrap();
        prop_assert_eq!(bars.len(), 64);
        prop_assert!((bars[0].1 - 1.0).abs() < 1e-12);
        for (label, v) in bars {
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&v), "{} = {}", label, v);
        }
    }

    #[test]
    fn pure_state_bar_squares_sum_to_dimension(entries in complex_vec(4)) {
        // Σ ⟨P⟩² = 2ⁿ Tr ρ² for any state
        let v = CVector::from_iterator(4, entries.iter().map(|&(r, i)| C64::new(r, i)));
        prop_assume!(v.norm() > 1e-3);
        let rho = QuantumState::pure(v.unscale(v.norm()), HilbertLayout::qubits(2)).unwrap();
        let s: f64 = pauli_bars(&rho).unwrap().iter().map(|(_, x)| x * x).sum();
        prop_assert!((s - 4.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn echo_schedule_matches_subset_only_evolution(
        subset_mask in 1u8..16,
        levels in 0usize..16,
        alpha in 0.5..2.0f64,
    ) {
        // instantaneous pulses, K = 0: the echo leaves only the subset's dispersive phase
        let n = 4;
        let d = 30;
        let chi = mhz(5.0);
        let spec = SystemSpec::uniform(n, chi, 0.0, d);
        let subset: Vec<usize> = (0..n).filter(|q| subset_mask >> q & 1 == 1).collect();
        let s = parity_encoding_schedule(&spec, &subset, C64::new(alpha, 0.0), PulseDurations::INSTANT, false).unwrap();
        let mut psi = CVector::zeros(spec.dim());
        psi[levels * d] = C64::new(1.0, 0.0);
        let out = run_schedule(
            QuantumState::pure(psi, spec.layout()).unwrap(),
            &s, &spec, &EvolutionOptions::default(), false, &mut rng_for(0, 0),
        ).unwrap();
        let v = out.state.as_vector().unwrap();
        let cav = CVector::from_fn(d, |k, _| v[levels * d + k]);
        let m = subset.len();
        let a: i32 = subset.iter().map(|&q| if levels >> (n - 1 - q) & 1 == 1 { 1 } else { -1 }).sum();
        // pointer (−i)^A α = (−i)^M α (−1)^{#g}, #g = (M − A)/2
        let sign = if ((m as i32 - a) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let want = cavity_parity::protocols::minus_i_pow(m) * C64::new(alpha * sign, 0.0);
        let mean: C64 = (1..d).map(|k| cav[k - 1].conj() * cav[k] * (k as f64).sqrt()).sum();
        prop_assert!((cav.norm() - 1.0).abs() < 1e-9);
        prop_assert!((mean - want).norm() < 1e-6, "mean {} want {}", mean, want);
    }

    #[test]
    fn dissipation_preserves_trace_and_never_raises_purity(
        entries in complex_vec(4),
        alpha in 0.0..1.5f64,
        duration in 5.0..60.0f64,
    ) {
        let d = 16;
        let spec = SystemSpec::uniform(2, mhz(5.0), khz(80.0), d).with_decoherence(khz(500.0), 5_000.0, 3_000.0);
        let q = CVector::from_iterator(4, entries.iter().map(|&(r, i)| C64::new(r, i)));
        prop_assume!(q.norm() > 1e-3);
        let q = q.unscale(q.norm());
        let cav = cavity_parity::tensorspace::coherent_state(C64::new(alpha, 0.0), d).unwrap();
        let state = QuantumState::pure(q.kronecker(&cav), spec.layout()).unwrap();
        let mut s = PulseSchedule::new("free");
        s.free(duration / 2.0).free(duration / 2.0);
        let out = run_schedule(state, &s, &spec, &EvolutionOptions::default(), true, &mut rng_for(0, 0)).unwrap();
        prop_assert!((out.state.trace() - 1.0).abs() < 1e-7);
        prop_assert!(out.report.max_trace_drift < 1e-7);
        prop_assert!(out.report.max_purity_increase < 1e-8);
        prop_assert!(out.state.purity() <= 1.0 + 1e-8);
    }
}
