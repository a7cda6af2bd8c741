//! End-to-end benchmarks of the main pipelines: Diophantine solving, pair
//! unitaries, CA sector decomposition, and the ED fragmentation stack.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::f64::consts::PI;
use std::hint::black_box;

use floqca::ca::{krylov_decompose, make_rule_table, ModelKind, DEFAULT_SECTOR_GUARD};
use floqca::dioph::{hubbard_params, search_dmax4, Direction};
use floqca::ed::{floquet_operator, quasispectrum, SectorBasis};
use floqca::lattice::{build_chain, Boundary};
use floqca::pairdyn::{hubbard_pair_unitary, nn_pair_unitary, DriveParams, NeighborContext};

fn bench_dioph(c: &mut Criterion) {
    c.bench_function("dioph/hubbard_params_sweep", |b| {
        b.iter(|| {
            for w1 in -20i128..=20 {
                for w2 in -20i128..=20 {
                    if w1 * w1 == w2 * w2 {
                        continue;
                    }
                    if let Ok(dir) = Direction::normalized(w1, w2, 1) {
                        black_box(hubbard_params(&dir).unwrap());
                    }
                }
            }
        })
    });
    c.bench_function("dioph/search_dmax4_10x2000", |b| {
        b.iter(|| black_box(search_dmax4(10, 2000).unwrap()))
    });
}

fn bench_pairdyn(c: &mut Criterion) {
    c.bench_function("pairdyn/hubbard_pair_unitary", |b| {
        b.iter(|| black_box(hubbard_pair_unitary(black_box(3.0), black_box(4.0 * PI))))
    });
    c.bench_function("pairdyn/nn_pair_unitary", |b| {
        b.iter(|| {
            black_box(nn_pair_unitary(
                black_box(12f64.sqrt()),
                black_box(PI / 2.0),
                NeighborContext { n1: 1, n2: 0 },
            ))
        })
    });
}

fn bench_ca(c: &mut Criterion) {
    let (lattice, schedule) = build_chain(12, Boundary::Open).unwrap();
    let rules = make_rule_table(
        ModelKind::NnChain,
        &DriveParams::new(12f64.sqrt(), PI / 2.0),
        1e-9,
    );
    c.bench_function("ca/krylov_decompose_n12_k6", |b| {
        b.iter(|| {
            black_box(
                krylov_decompose(&lattice, &schedule, &rules, 6, 4096, DEFAULT_SECTOR_GUARD)
                    .unwrap(),
            )
        })
    });
}

fn bench_ed(c: &mut Criterion) {
    let mut group = c.benchmark_group("ed");
    group.sample_size(10);
    group.bench_function("floquet_operator_n12_k6", |b| {
        b.iter_batched(
            || SectorBasis::new(12, 6).unwrap(),
            |basis| {
                black_box(
                    floquet_operator(&basis, 12f64.sqrt(), PI / 2.0, Boundary::Open, None)
                        .unwrap(),
                )
            },
            BatchSize::LargeInput,
        )
    });
    group.bench_function("quasispectrum_n10_k5", |b| {
        let basis = SectorBasis::new(10, 5).unwrap();
        let op =
            floquet_operator(&basis, 12f64.sqrt(), PI / 2.0, Boundary::Open, None).unwrap();
        b.iter(|| black_box(quasispectrum(&op, &basis, None).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bench_dioph, bench_pairdyn, bench_ca, bench_ed);
criterion_main!(benches);
