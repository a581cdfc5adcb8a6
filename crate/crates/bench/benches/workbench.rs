use criterion::{black_box, criterion_group, criterion_main, Criterion};

use fmtk_core::counterexample::{build_a, build_b, phi, phi_prenex, verify_counterexample, VerifyMode};
use fmtk_core::games::{solve_family_game, GameConfig};
use fmtk_core::logic::{evaluate_naive, CompiledFormula, Assignment};
use fmtk_core::preservation::{is_hereditary_over, Family};
use fmtk_core::DEFAULT_BUDGET;

fn evaluation(c: &mut Criterion) {
    let a = build_a(2, 2).unwrap();
    let compiled = CompiledFormula::new(&phi_prenex(2), a.vocab()).unwrap();
    c.bench_function("eval/prenex-compiled A(2,2)", |b| b.iter(|| compiled.check(black_box(&a))));
    let small = build_a(1, 0).unwrap();
    let f = phi(0);
    c.bench_function("eval/phi-naive A(1,0)", |b| {
        b.iter(|| evaluate_naive(black_box(&small), &f, &Assignment::new()).unwrap())
    });
}

fn strategy(c: &mut Criterion) {
    c.bench_function("verify/exhaustive (1,1)", |b| {
        b.iter(|| verify_counterexample(1, 1, VerifyMode::Exhaustive, DEFAULT_BUDGET).unwrap())
    });
}

fn games(c: &mut Criterion) {
    let a = build_a(1, 1).unwrap();
    let bs: Vec<_> = (0..=1).map(|i| build_b(1, 1, i).unwrap()).collect();
    c.bench_function("game/family (1,1)", |b| {
        b.iter(|| solve_family_game(&a, &bs, GameConfig::new(1, 1)).unwrap())
    });
}

fn lattice(c: &mut Criterion) {
    let family = Family::substructure_lattice("A10", build_a(1, 0).unwrap());
    let f = phi(0);
    c.bench_function("preserve/hereditary A(1,0) lattice", |b| {
        b.iter(|| is_hereditary_over(&f, &family).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = evaluation, strategy, games, lattice
}
criterion_main!(benches);
