use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use twistlab::algebra::{FiniteField, FqPoly};
use twistlab::family::{density_experiment, haar_baseline, HaarGroup, TwistFamily};
use twistlab::lfunc::{euler_series, LocalConditions};
use twistlab::par::{self, Parallelism};
use twistlab::places::Place;
use twistlab::reps::{PowerCharacter, RepDescriptor};

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Rayon)];

fn euler(c: &mut Criterion) {
    let k = FiniteField::of_order(7).unwrap();
    let g = FqPoly::parse(&k, "t^7+3*t^2+1").unwrap();
    let rep = RepDescriptor::Char(PowerCharacter::from_poly(g, 2, 1).unwrap());
    let mut group = c.benchmark_group("euler_series_q7_depth6");
    for (name, mode) in MODES {
        group.bench_function(name, |b| {
            par::set_default(mode);
            b.iter(|| euler_series(black_box(&rep), 6).unwrap())
        });
    }
    group.finish();
}

fn haar(c: &mut Criterion) {
    let mut group = c.benchmark_group("haar_usp4_2000");
    group.sample_size(20);
    for (name, mode) in MODES {
        group.bench_function(name, |b| {
            par::set_default(mode);
            b.iter(|| haar_baseline(HaarGroup::Symplectic, 4, 2000, black_box(3)).unwrap())
        });
    }
    group.finish();
}

fn density(c: &mut Criterion) {
    let k = FiniteField::of_order(5).unwrap();
    let conds = LocalConditions {
        d: 2,
        split: vec![Place::linear(&k, 0)],
        inert: vec![Place::linear(&k, 4)],
        ramified: vec![],
    };
    let fam = TwistFamily::new(RepDescriptor::Trivial(k.clone()), 2, 2, 3, conds).unwrap();
    let mut group = c.benchmark_group("density_q25_deg3");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(name, |b| {
            par::set_default(mode);
            b.iter(|| density_experiment(black_box(&fam), 1 << 20, 1).unwrap())
        });
    }
    group.finish();
    par::set_default(Parallelism::Rayon);
}

criterion_group!(benches, euler, haar, density);
criterion_main!(benches);
