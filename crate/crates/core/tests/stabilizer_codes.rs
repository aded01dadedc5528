//! Stabilizer codes, toric ground states and parity ratios.

mod common;

use common::{embed, protocol_spec, PROTOCOL_ALPHA};

use std::collections::BTreeSet;

use cavity_parity::dynamics::EvolutionOptions;
use cavity_parity::protocols::PulseDurations;
use cavity_parity::stabilizer::{
    erasure_code, single_qubit_parity_via_ratio, toric_code_generators, toric_ground_state, Pauli,
    PauliString, ProtocolSettings,
};
use cavity_parity::{rng_for, CVector, C64};
use rand::Rng;

#[test]
fn eight_qubit_toric_listing() {
    let code = toric_code_generators(2, 2).unwrap();
    let got: BTreeSet<String> = code.generators.iter().map(|(_, p)| p.to_string()).collect();
    let want: BTreeSet<String> = [
        "Z1Z4Z7Z8", "Z2Z3Z7Z8", "Z1Z4Z5Z6", "Z2Z3Z5Z6", "X1X2X5X7", "X3X4X5X7", "X1X2X6X8", "X3X4X6X8",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(got, want);
}

#[test]
fn plaquette_and_star_products_are_identity() {
    let code = toric_code_generators(2, 2).unwrap();
    for prefix in ['P', 'S'] {
        let prod = code
            .generators
            .iter()
            .filter(|(name, _)| name.starts_with(prefix))
            .fold(PauliString::identity(8), |acc, (_, g)| acc.mul(g).unwrap());
        assert!(prod.is_identity() && prod.phase() == 0, "{prefix}");
    }
}

#[test]
fn code_space_ranks() {
    let toric = toric_code_generators(2, 2).unwrap();
    let p = toric.projector().unwrap();
    let tr = p.matrix().trace();
    assert!((tr.re - 4.0).abs() < 1e-9 && tr.im.abs() < 1e-9);
    // projector: idempotent
    let sq = p.matrix() * p.matrix();
    assert!((sq - p.matrix()).norm() < 1e-9);

    let erasure = erasure_code().projector().unwrap();
    assert!((erasure.matrix().trace().re - 2.0).abs() < 1e-9);
    assert_eq!(erasure_code().code_dimension(), 2);
}

#[test]
fn toric_ground_state_for_many_seeds() {
    for seed in 0..10 {
        let prep = toric_ground_state(2, 2, &mut rng_for(seed, 0)).unwrap();
        for (name, g) in &prep.code.generators {
            let v = g.expectation(&prep.state).unwrap();
            assert!((v - 1.0).abs() < 1e-9, "seed {seed} {name}: {v}");
        }
    }
}

#[test]
fn parity_ratio_on_basis_states() {
    let spec = protocol_spec(4);
    let opts = EvolutionOptions::default();
    let cfg = ProtocolSettings {
        spec: &spec,
        alpha: C64::new(PROTOCOL_ALPHA, 0.0),
        pulses: PulseDurations::INSTANT,
        opts: &opts,
        noise: false,
    };
    // |gggg⟩ → σz₁ = −1, |eggg⟩ → +1
    for (idx, want) in [(0usize, -1i8), (8, 1)] {
        let mut psi = CVector::zeros(16);
        psi[idx] = C64::new(1.0, 0.0);
        let (got, _) = single_qubit_parity_via_ratio(&embed(&psi, &spec), 0, cfg, &mut rng_for(0, 0)).unwrap();
        assert_eq!(got, want, "basis index {idx}");
    }
}

#[test]
fn parity_ratio_agrees_with_post_state() {
    let n = 3;
    let spec = protocol_spec(n);
    let opts = EvolutionOptions::default();
    let cfg = ProtocolSettings {
        spec: &spec,
        alpha: C64::new(PROTOCOL_ALPHA, 0.0),
        pulses: PulseDurations::INSTANT,
        opts: &opts,
        noise: false,
    };
    let mut gen = rng_for(41, 0);
    let mut seen = BTreeSet::new();
    for trial in 0..50u64 {
        let psi = CVector::from_fn(1 << n, |_, _| C64::new(gen.gen::<f64>() - 0.5, gen.gen::<f64>() - 0.5));
        let psi = psi.unscale(psi.norm());
        let i = (trial % n as u64) as usize;
        let (ev, post) = single_qubit_parity_via_ratio(&embed(&psi, &spec), i, cfg, &mut rng_for(7, trial)).unwrap();
        let reduced = cavity_parity::stabilizer::qubit_reduced(&post).unwrap();
        let z = PauliString::single(n, i, Pauli::Z).expectation(&reduced).unwrap();
        assert!((z - f64::from(ev)).abs() < 1e-6, "trial {trial}: ratio {ev}, ⟨Z⟩ = {z}");
        seen.insert(ev);
    }
    assert_eq!(seen.len(), 2, "both outcomes should occur on random states");
}

#[test]
fn ratio_requires_valid_qubit() {
    let spec = protocol_spec(2);
    let opts = EvolutionOptions::default();
    let cfg = ProtocolSettings {
        spec: &spec,
        alpha: C64::new(PROTOCOL_ALPHA, 0.0),
        pulses: PulseDurations::INSTANT,
        opts: &opts,
        noise: false,
    };
    let psi = CVector::from_element(4, C64::new(0.5, 0.0));
    assert!(single_qubit_parity_via_ratio(&embed(&psi, &spec), 5, cfg, &mut rng_for(0, 0)).is_err());
}
