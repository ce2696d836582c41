use criterion::{black_box, criterion_group, criterion_main, Criterion};
use gkdeform_core::biherm::{self, constant_beta};
use gkdeform_core::brackets::{random_multivector, schouten, schouten_classical};
use gkdeform_core::fields::TorusKahlerData;
use gkdeform_core::mc;
use gkdeform_core::surfaces::{self, SurfaceLattice};
use gkdeform_core::Scalar;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn brackets(c: &mut Criterion) {
    let mut g = ChaCha8Rng::seed_from_u64(1);
    let a = random_multivector(&mut g, 2, 2, 3, 1);
    let b = random_multivector(&mut g, 2, 2, 3, 1);
    c.bench_function("schouten_derived_n2", |bn| bn.iter(|| schouten(black_box(&a), black_box(&b))));
    c.bench_function("schouten_classical_n2", |bn| bn.iter(|| schouten_classical(black_box(&a), black_box(&b))));
}

fn maurer_cartan(c: &mut Criterion) {
    let mut g = ChaCha8Rng::seed_from_u64(2);
    let eta = random_multivector(&mut g, 2, 1, 2, 1);
    let eps1 = gkdeform_core::brackets::d_l(&eta);
    c.bench_function("mc_solve_n2_order4", |bn| bn.iter(|| mc::mc_solve(black_box(&eps1), 4).unwrap()));
}

fn construction(c: &mut Criterion) {
    let torus = TorusKahlerData::standard(2);
    let beta = constant_beta(2, Scalar::frac(1, 4));
    let mut group = c.benchmark_group("gk");
    group.sample_size(10);
    group.bench_function("construction_loop_n2_order3", |bn| bn.iter(|| biherm::construction_loop(black_box(&beta), &torus, 3).unwrap()));
    group.finish();
}

fn lattice(c: &mut Criterion) {
    c.bench_function("table_report", |bn| bn.iter(surfaces::table_report));
    let s8 = SurfaceLattice::del_pezzo_blowup(8);
    c.bench_function("roots_e8_box6", |bn| bn.iter(|| s8.classes_with(-2, 0, 6).len()));
}

criterion_group!(benches, brackets, maurer_cartan, construction, lattice);
criterion_main!(benches);
