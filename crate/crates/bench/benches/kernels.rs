use alpha_forge::alpha::alpha_partial;
use alpha_forge::avgalpha::{mean_alpha_p, CoefficientBox};
use alpha_forge::census::{census_form, psi_exact};
use alpha_forge::dickman::RhoTable;
use alpha_forge::{Parallelism, Polynomial, RootCounter};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn sextic() -> Polynomial {
    Polynomial::from_i64s(&[-7_163_152, 1_294_374, 8_214, -62_117, 1_730, 9, 12]).unwrap()
}

pub fn bench_root_counts(c: &mut Criterion) {
    let rc = RootCounter::new(&sextic());
    let mut group = c.benchmark_group("n_pk_lifted");
    for p in [2u64, 3, 101] {
        group.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| {
            b.iter(|| rc.n_pk_lifted(black_box(p), 6).unwrap())
        });
    }
    group.finish();
}

pub fn bench_alpha_partial(c: &mut Criterion) {
    let f = sextic();
    let par = Parallelism::new(1, 1 << 14);
    c.bench_function("alpha_partial x=1e5", |b| {
        b.iter(|| alpha_partial(&f, black_box(100_000), &par).unwrap())
    });
}

pub fn bench_rho_table(c: &mut Criterion) {
    c.bench_function("RhoTable::new u_max=20", |b| b.iter(|| RhoTable::new(black_box(20.0)).unwrap()));
}

pub fn bench_census(c: &mut Criterion) {
    let form = Polynomial::from_i64s(&[1, 0, 1]).unwrap().homogenize();
    let par = Parallelism::new(1, 1 << 14);
    c.bench_function("census_form X^2+1 x=1e5 B=1000", |b| {
        b.iter(|| census_form(&form, black_box(100_000), 1000, &par).unwrap())
    });
    c.bench_function("psi_exact x=1e6 B=1000", |b| {
        b.iter(|| psi_exact(black_box(1_000_000), 1000, &par).unwrap())
    });
}

pub fn bench_box_mean(c: &mut Criterion) {
    let bx = CoefficientBox::new(2, vec![(-20, 20), (-20, 20)]).unwrap();
    let par = Parallelism::new(1, 1 << 12);
    c.bench_function("mean_alpha_p d=2 box=41x41 p=5", |b| {
        b.iter(|| mean_alpha_p(&bx, black_box(5), &par).unwrap())
    });
}

criterion_group!(
    benches,
    bench_root_counts,
    bench_alpha_partial,
    bench_rho_table,
    bench_census,
    bench_box_mean
);
criterion_main!(benches);
