use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use grwa_core::hybrid::{analytic_energy, hybrid_state_embed};
use grwa_core::qrm::displaced_overlap;
use grwa_core::{solve_hybrid, AnalyticStateLabel, Cutoffs, Family, Sign, SystemParams};
use std::hint::black_box;

fn params(g: f64) -> SystemParams {
    SystemParams::new(5.0, 5.0, 1.0, g, 0.1).unwrap()
}

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_hybrid");
    group.sample_size(10);
    for (photon, phonon) in [(12, 10), (20, 16), (30, 23)] {
        let cut = Cutoffs::new(photon, phonon).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(cut.dim()), &cut, |b, cut| {
            b.iter(|| solve_hybrid(&params(5.0), cut, cut.dim()).unwrap())
        });
    }
    group.finish();
}

fn analytic(c: &mut Criterion) {
    let label = AnalyticStateLabel::grwa(Family::Doublet { n: 1, m: 2, sign: Sign::Plus });
    let p = params(5.0);
    c.bench_function("grwa_doublet_energy", |b| b.iter(|| analytic_energy(black_box(label), black_box(&p))));
    let cut = Cutoffs::new(30, 23).unwrap();
    c.bench_function("grwa_doublet_embed", |b| b.iter(|| hybrid_state_embed(black_box(label), &p, &cut).unwrap()));
    c.bench_function("displaced_overlap_20_40", |b| b.iter(|| displaced_overlap(black_box(20), black_box(40), 1.7)));
}

criterion_group!(benches, exact, analytic);
criterion_main!(benches);
