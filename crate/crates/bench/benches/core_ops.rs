use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64 as C64;

use dalat_bench::{rhombic, square};
use dalat_core::calculus::{backward_shift, exp_basis, forward_shift, monomial_basis};
use dalat_core::lattice::{Lattice, LatticeKind};
use dalat_core::rational::kernel;
use dalat_core::realization::resolvent;
use dalat_core::{CMatrix, Tolerance};

fn bench_generate(c: &mut Criterion) {
    let mut group = c.benchmark_group("lattice_generate");
    for radius in [4u32, 8, 16] {
        group.bench_with_input(BenchmarkId::new("square", radius), &radius, |b, &r| {
            b.iter(|| Lattice::generate(LatticeKind::Square, black_box(r)).unwrap());
        });
    }
    group.finish();
}

fn bench_basis(c: &mut Criterion) {
    let tol = Tolerance::default();
    let lat = square(4);
    c.bench_function("monomial_basis_n12_r4", |b| {
        b.iter(|| monomial_basis(&lat, black_box(12), tol).unwrap());
    });
}

fn bench_shifts(c: &mut Criterion) {
    let tol = Tolerance::default();
    let lat = square(8);
    let e = exp_basis(&lat, C64::new(0.3, 0.1), tol).unwrap();
    c.bench_function("forward_shift_r8", |b| {
        b.iter(|| forward_shift(black_box(&e), tol).unwrap());
    });
    c.bench_function("backward_shift_r8", |b| {
        b.iter(|| backward_shift(black_box(&e), tol).unwrap());
    });
}

fn bench_resolvent(c: &mut Criterion) {
    let tol = Tolerance::default();
    let lat = rhombic(6);
    let a = CMatrix::from_row_slice(
        3,
        3,
        &[
            C64::new(0.2, 0.1),
            C64::new(0.1, 0.0),
            C64::new(0.0, -0.1),
            C64::new(0.0, 0.2),
            C64::new(-0.2, 0.0),
            C64::new(0.1, 0.1),
            C64::new(0.05, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.15, -0.2),
        ],
    );
    c.bench_function("resolvent_3x3_rhombic_r6", |b| {
        b.iter(|| resolvent(black_box(&a), &lat, tol).unwrap());
    });
}

fn bench_kernel(c: &mut Criterion) {
    let tol = Tolerance::default();
    let lat = square(4);
    let w = lat.vertex_at(C64::new(2.0, 2.0), 1e-9).unwrap();
    c.bench_function("kernel_w22_m2_r4", |b| {
        b.iter(|| kernel(&lat, black_box(w), 2.0, tol).unwrap());
    });
}

criterion_group!(
    benches,
    bench_generate,
    bench_basis,
    bench_shifts,
    bench_resolvent,
    bench_kernel
);
criterion_main!(benches);
