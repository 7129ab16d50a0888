use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pointopt::configurations::{canonical, random_config, sharp_sphere};
use pointopt::kernels::{bessel_k0, green_loop_negative};
use pointopt::optimizer::surface_energy;
use pointopt::spectral::ground_state;
use pointopt::Setting;

fn kernels(c: &mut Criterion) {
    c.bench_function("bessel_k0 small", |b| b.iter(|| bessel_k0(black_box(0.7))));
    c.bench_function("bessel_k0 large", |b| b.iter(|| bessel_k0(black_box(12.5))));
    c.bench_function("green_loop_negative", |b| {
        b.iter(|| green_loop_negative(black_box(1.3), black_box(2.1)))
    });
}

fn secular(c: &mut Criterion) {
    let mut g = c.benchmark_group("ground_state");
    for (name, config, alpha) in [
        ("loop attractive N=6", random_config(Setting::Loop, 6, 1).unwrap(), -2.0),
        ("loop repulsive N=6", random_config(Setting::Loop, 6, 1).unwrap(), 2.0),
        ("circle2 N=6", canonical(Setting::Circle2, 6).unwrap(), -0.5),
        ("sphere N=12", sharp_sphere(12).unwrap().0, -1.0),
    ] {
        g.bench_function(name, |b| b.iter(|| ground_state(black_box(alpha), &config)));
    }
    g.finish();
}

fn energy(c: &mut Criterion) {
    let config = random_config(Setting::Sphere, 12, 3).unwrap();
    c.bench_function("surface_energy N=12", |b| {
        b.iter(|| surface_energy(&config, black_box(1.0)))
    });
}

criterion_group!(benches, kernels, secular, energy);
criterion_main!(benches);
