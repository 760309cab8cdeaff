use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use qnd_lab::bath::{self, BathSpec, Occupation, TemperatureMode};
use qnd_lab::composite::{self, CompositeOptions, CompositeScenario, DiscreteBathSpec, DiscreteMode};
use qnd_lab::linalg::c;
use qnd_lab::phase_space::{self, GridSpec};
use qnd_lab::qnd::{self, PureState, SystemSpectrum};
use qnd_lab::quadrature::Tolerance;

fn zero_t(r: f64) -> BathSpec {
    BathSpec::new(0.1, 50.0, r, 0.0, TemperatureMode::Zero, 0.0).unwrap()
}

fn kernels(c: &mut Criterion) {
    let spec = zero_t(0.4);
    let high = BathSpec::new(0.1, 50.0, 0.4, 0.0, TemperatureMode::High, 300.0).unwrap();
    let mut g = c.benchmark_group("kernels");
    g.bench_function("closed form zero-T", |b| b.iter(|| bath::kernels(black_box(3.7), &spec).unwrap()));
    g.bench_function("closed form high-T", |b| b.iter(|| bath::kernels(black_box(3.7), &high).unwrap()));
    let tol = Tolerance { abs: 1e-14, rel: 1e-10 };
    g.bench_function("quadrature gamma", |b| {
        b.iter(|| bath::gamma_quadrature(black_box(3.7), &spec, Occupation::Vacuum, tol).unwrap())
    });
    g.bench_function("quadrature gamma_dot", |b| {
        b.iter(|| bath::gamma_dot_quadrature(black_box(3.7), &spec, Occupation::Vacuum, tol).unwrap())
    });
    g.finish();
}

fn coherence(c: &mut Criterion) {
    let spec = zero_t(0.4);
    let state = qnd::coherent_state(5.0).unwrap();
    let spectrum = qnd::ho_spectrum(1.0, state.dimension() - 1).unwrap();
    c.bench_function("coherence oscillator alpha^2=5", |b| {
        b.iter(|| qnd::coherence_measure(&state, black_box(20.0), &spec, &spectrum).unwrap())
    });
}

fn composite_oracle(crit: &mut Criterion) {
    let spectrum = SystemSpectrum::two_level(1.0).unwrap();
    let rho0 = PureState::normalized(vec![c(0.8, 0.0), c(0.3, 0.5)]).unwrap().density();
    let mode = |n| DiscreteBathSpec::new(vec![DiscreteMode { omega: 1.3, g: 0.4, r: 0.3, phi: 0.2 }], 0.5, n).unwrap();
    let mut g = crit.benchmark_group("composite");
    g.sample_size(10);
    for n in [15, 30] {
        let scenario = CompositeScenario {
            rho0: rho0.clone(),
            spectrum: spectrum.clone(),
            bath: mode(n),
            times: vec![0.0, 1.0, 2.0, 4.0],
            options: CompositeOptions::default(),
        };
        g.bench_function(format!("K=1 n_max={n}"), |b| b.iter(|| composite::verify_against_analytic(&scenario)));
    }
    g.finish();
}

fn q_grid(c: &mut Criterion) {
    let state = qnd::coherent_state(5.0).unwrap();
    let spectrum = qnd::ho_spectrum(1.0, state.dimension() - 1).unwrap();
    let spec = zero_t(0.4);
    let rho = qnd::evolve_density(&state.density(), 10.0, &spec, &spectrum).unwrap();
    let mut g = c.benchmark_group("qfunc");
    for (n_xi, n_theta) in [(32, 32), (64, 64)] {
        let grid = GridSpec { xi_max: 5.0f64.sqrt() + 6.0, n_xi, n_theta };
        g.bench_function(format!("{n_xi}x{n_theta}"), |b| {
            b.iter(|| phase_space::q_from_density(rho.matrix(), &grid).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, kernels, coherence, composite_oracle, q_grid);
criterion_main!(benches);
