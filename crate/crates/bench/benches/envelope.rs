use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use mcenv_core::catalog;
use mcenv_core::centralizers::{CentralizerLattice, DEFAULT_NODE_CAP};
use mcenv_core::envelope::build_envelope;
use mcenv_core::formula::{envelope_formula, evaluate};
use mcenv_core::subgroups::all_subgroups;

const GROUPS: [&str; 4] = ["dihedral(8)", "symmetric(4)", "unitriangular(3)", "product(dihedral(4),symmetric(3))"];

fn lattice(c: &mut Criterion) {
    let mut group = c.benchmark_group("lattice");
    for spec in GROUPS {
        let g = catalog::parse_spec(spec).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(spec), &g, |b, g| {
            b.iter(|| CentralizerLattice::build(black_box(g), DEFAULT_NODE_CAP).unwrap().c_dimension())
        });
    }
    group.finish();
}

fn envelope(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_envelope");
    for spec in GROUPS {
        let g = catalog::parse_spec(spec).unwrap();
        // the largest nilpotent subgroup is the most expensive case
        let h = all_subgroups(&g)
            .into_iter()
            .filter(mcenv_core::series::is_nilpotent)
            .max_by_key(|h| h.order())
            .unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(spec), &h, |b, h| {
            b.iter(|| build_envelope(&g, black_box(h)).unwrap())
        });
    }
    group.finish();
}

fn evaluator(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate");
    for spec in GROUPS {
        let g = catalog::parse_spec(spec).unwrap();
        let d = CentralizerLattice::build(&g, DEFAULT_NODE_CAP).unwrap().c_dimension().dimension;
        for n in [1, 2] {
            let f = envelope_formula(d, n);
            let params = vec![1 % g.order(); d * n];
            group.bench_with_input(BenchmarkId::new(spec, n), &f, |b, f| {
                b.iter(|| evaluate(black_box(f), &g, &params).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, lattice, envelope, evaluator);
criterion_main!(benches);
