//! Simulator against the closed-form oracles.

mod common;

use std::f64::consts::PI;

use common::{branch, mean_a, product};

use cavity_parity::dynamics::{run_schedule, EvolutionOptions};
use cavity_parity::oracle;
use cavity_parity::protocols::{PulseSchedule, Segment};
use cavity_parity::system::{build_hamiltonian, DriveTerm, SystemSpec};
use cavity_parity::tensorspace::{coherent_state, expm_hermitian, ops, partial_trace, QuantumState};
use cavity_parity::units::{khz, mhz};
use cavity_parity::{CMatrix, C64};

fn run(spec: &SystemSpec, state: QuantumState, s: &PulseSchedule) -> QuantumState {
    let mut rng = cavity_parity::rng_for(0, 0);
    run_schedule(state, s, spec, &EvolutionOptions::default(), false, &mut rng)
        .unwrap()
        .state
}

#[test]
fn dispersive_branches_match_oracle() {
    let chi = mhz(5.0);
    let d = 40;
    let spec = SystemSpec::uniform(3, chi, 0.0, d);
    let alpha = C64::new(2.0, 0.0);
    for t in [PI / (4.0 * chi), PI / (2.0 * chi), 13.7] {
        let mut s = PulseSchedule::new("free");
        s.free(t);
        for idx in 0..8usize {
            let levels: Vec<usize> = (0..3).map(|q| (idx >> (2 - q)) & 1).collect();
            let out = run(&spec, product(&levels, alpha, d), &s);
            let lv: Vec<u8> = levels.iter().map(|&l| l as u8).collect();
            let a = oracle::magnetization(&lv, &[0, 1, 2]);
            let want = coherent_state(oracle::dispersive_branch_amplitude(alpha, chi, t, a), d).unwrap();
            let got = branch(&out, &levels, d);
            assert!((got - want).norm() < 1e-9, "t={t} levels={levels:?}");
        }
    }
}

#[test]
fn echo_identity_dense() {
    // (Π σx) U(t/2) (Π σx) U(t/2) = U_S(t) for K = 0, built from dense exponentials
    let chi = mhz(5.0);
    let d = 6;
    for (n, subset) in [(2usize, vec![0usize]), (3, vec![0, 2]), (4, vec![1, 3]), (4, vec![0, 1, 2, 3])] {
        let spec = SystemSpec::uniform(n, chi, 0.0, d);
        let layout = spec.layout();
        let h = build_hamiltonian(&spec).unwrap();
        let complement: Vec<usize> = (0..n).filter(|q| !subset.contains(q)).collect();
        let mut flips = CMatrix::identity(layout.total_dim(), layout.total_dim());
        for &q in &complement {
            flips = cavity_parity::tensorspace::embed_operator(&ops::sigma_x(), q, &layout).unwrap().matrix() * flips;
        }
        let mut hs = CMatrix::zeros(layout.total_dim(), layout.total_dim());
        for &q in &subset {
            let zn = ops::kron_all(&[ops::sigma_z(), ops::number(d)]);
            let _ = zn;
            let z = cavity_parity::tensorspace::embed_operator(&ops::sigma_z(), q, &layout).unwrap();
            let num = cavity_parity::tensorspace::embed_operator(&ops::number(d), n, &layout).unwrap();
            hs += (z.matrix() * num.matrix()) * C64::new(chi, 0.0);
        }
        for t in [3.0, 17.5, 50.0] {
            let half = expm_hermitian(h.matrix(), C64::new(0.0, -t / 2.0));
            let echo = &flips * &half * &flips * &half;
            let want = expm_hermitian(&hs, C64::new(0.0, -t));
            assert!((echo - want).norm() < 1e-12, "n={n} t={t}");
        }
    }
}

#[test]
fn cat_overlap_matches_fock_vectors() {
    for a in [0.5, 1.0, 2.0] {
        let alpha = C64::new(a, 0.3);
        let p = coherent_state(alpha, 60).unwrap();
        let m = coherent_state(-alpha, 60).unwrap();
        assert!((p.dotc(&m).norm() - oracle::cat_overlap(alpha)).abs() < 1e-9);
    }
}

#[test]
fn kerr_rotation_matches_lossless_evolution() {
    let d = 40;
    let kerr = khz(80.0);
    let alpha = C64::new(2.0, 0.0);
    let n_bar = alpha.norm_sqr();
    let dt = 50.5;
    let spec = SystemSpec::uniform(1, mhz(5.0), kerr, d);
    let mut s = PulseSchedule::new("kerr");
    s.free(dt);
    let out = run(&spec, product(&[0], alpha, d), &s);
    // remove the known dispersive rotation of the g branch (A = −1)
    let amp = mean_a(&branch(&out, &[0], d)) * C64::from_polar(1.0, -spec.chi[0] * dt);
    let (phase, damping) = oracle::kerr_correction(n_bar, kerr, dt);
    let got_phase = (amp / alpha).arg();
    let got_damp = amp.norm() / alpha.norm();
    assert!((got_phase - phase).abs() / phase < 1e-3, "{got_phase} vs {phase}");
    assert!((got_damp - damping).abs() / damping < 1e-3, "{got_damp} vs {damping}");
}

#[test]
fn square_pulse_matches_sinc_formula() {
    let d = 40;
    let chi = mhz(10.0);
    let spec = SystemSpec::uniform(4, chi, 0.0, d);
    let alpha = C64::new(2.5, 0.0);
    for t in [0.5, 1.0, 2.0, 4.0] {
        let mut s = PulseSchedule::new("drive");
        s.push(Segment::Drive(DriveTerm::displacement(alpha, t).unwrap()));
        for levels in [[0, 0, 0, 0], [1, 0, 1, 0], [1, 1, 1, 0], [1, 1, 1, 1]] {
            let out = run(&spec, product(&levels, C64::new(0.0, 0.0), d), &s);
            let lv: Vec<u8> = levels.iter().map(|&l| l as u8).collect();
            let a = oracle::magnetization(&lv, &[0, 1, 2, 3]);
            // drive ε = iα/T, i.e. i times a real ε₀ = α/T
            let want = C64::new(0.0, 1.0) * oracle::square_pulse_displacement(alpha.re / t, t, chi, a).unwrap();
            let cav = branch(&out, &levels, d);
            assert!((cav.norm() - 1.0).abs() < 1e-9);
            assert!((mean_a(&cav) - want).norm() < 1e-6, "T={t} A={a}");
        }
    }
}

#[test]
fn photon_loss_damping_of_the_pointer() {
    let chi = mhz(5.0);
    let kappa = khz(10.0);
    let d = 30;
    let spec = SystemSpec::uniform(1, chi, 0.0, d).with_decoherence(kappa, f64::INFINITY, f64::INFINITY);
    let t = PI / (2.0 * chi);
    let mut s = PulseSchedule::new("free");
    s.free(t);
    let alpha = C64::new(2.0, 0.0);
    let mut rng = cavity_parity::rng_for(0, 0);
    let out = run_schedule(product(&[0], alpha, d), &s, &spec, &EvolutionOptions::default(), true, &mut rng).unwrap();
    let cav = partial_trace(&out.state, &[1]).unwrap();
    let a = ops::annihilation(d);
    let mean = cav.expectation_matrix(&a).unwrap();
    // amplitude decays as e^{−κt/2}; over T = π/2χ this is the oracle's exp(−κπ/4χ)
    let (exact, linear) = oracle::photon_loss_damping(kappa, chi).unwrap();
    assert!((mean.norm() / alpha.norm() - exact).abs() < 1e-7);
    assert!((exact - linear).abs() < (kappa * PI / (4.0 * chi)).powi(2) / 2.0);
}
