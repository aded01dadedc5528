//! Sequential vs rayon execution of the two parallel paths: the Lindblad
//! kernel inside one run, and independent sweep points.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cavity_parity::dynamics::{run_schedule, EvolutionOptions};
use cavity_parity::exec::Execution;
use cavity_parity::experiment::{run_sweep, ExperimentConfig};
use cavity_parity::protocols::{parity_encoding_schedule, PulseDurations};
use cavity_parity::system::SystemSpec;
use cavity_parity::tensorspace::{coherent_state, QuantumState};
use cavity_parity::units::{khz, mhz};
use cavity_parity::{rng_for, CVector, C64};

fn noisy_encoding(c: &mut Criterion) {
    let d = 16;
    let spec = SystemSpec::uniform(3, mhz(5.0), khz(80.0), d).with_decoherence(khz(10.0), 20_000.0, 20_000.0);
    let schedule = parity_encoding_schedule(&spec, &[0, 2], C64::new(1.5, 0.0), PulseDurations::uniform(1.0), true).unwrap();
    let q = CVector::from_element(8, C64::new(1.0 / 8f64.sqrt(), 0.0));
    let state = QuantumState::pure(q.kronecker(&coherent_state(C64::new(0.0, 0.0), d).unwrap()), spec.layout()).unwrap();
    let mut group = c.benchmark_group("lindblad-encoding");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let opts = EvolutionOptions::default().with_execution(exec);
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &opts, |b, opts| {
            b.iter(|| run_schedule(state.clone(), &schedule, &spec, opts, true, &mut rng_for(0, 0)).unwrap())
        });
    }
    group.finish();
}

fn pump_sweep(c: &mut Criterion) {
    let cfg = ExperimentConfig::parse(
        "experiment = pump-cycles\nn_qubits = 2\nchi = 5 MHz\nkerr = 0 kHz\nfock_dim = 40\nalpha = 2.5\n\
         subset = 1, 2\ninitial_state = eg + ge\ncycles = 3\npulse_duration = 0 ns\n\
         sweep.theta = 0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3, 1.5\n",
    )
    .unwrap();
    let mut group = c.benchmark_group("pump-sweep");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| run_sweep(&cfg, 1, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, noisy_encoding, pump_sweep);
criterion_main!(benches);
