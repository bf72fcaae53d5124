use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use cubemix::coord::CornerCoordinate;
use cubemix::exact::{evolve_step, DistributionVector};
use cubemix::oracle::{default_cache_dir, PdbSet};
use cubemix::{random_move, solve_optimal, uniform_state, walk, Budget, ChainMode, CubeState, Move, RngStream};

fn moves(c: &mut Criterion) {
    let mut rng = RngStream::new(1, 0);
    let x = uniform_state(&mut rng);
    let m = Move::from_index(7);
    c.bench_function("cubie apply_move", |b| b.iter(|| black_box(&x).apply_move(black_box(m))));
    let f = x.to_facelets();
    c.bench_function("facelet apply_move", |b| b.iter(|| black_box(&f).apply_move(black_box(m))));
    c.bench_function("compose", |b| b.iter(|| black_box(&x).compose(black_box(&x))));
    c.bench_function("random_move", |b| b.iter(|| random_move(&mut rng)));
    c.bench_function("walk 52", |b| b.iter(|| walk(&CubeState::SOLVED, 52, &mut rng)));
    c.bench_function("uniform_state", |b| b.iter(|| uniform_state(&mut rng)));
    c.bench_function("facelet pack", |b| b.iter(|| black_box(&f).pack()));
}

fn coordinates(c: &mut Criterion) {
    let mut rng = RngStream::new(2, 0);
    let x = uniform_state(&mut rng).corners();
    c.bench_function("corner encode", |b| b.iter(|| CornerCoordinate::encode(black_box(&x)).flat()));
    c.bench_function("quotient index", |b| b.iter(|| ChainMode::Quotient.index_of(black_box(&x))));
    let i = ChainMode::Corner.index_of(&x);
    c.bench_function("corner coordinate apply", |b| b.iter(|| ChainMode::Corner.apply(black_box(i), 5)));
}

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    g.sample_size(10);
    let start = evolve_step(&evolve_step(&DistributionVector::origin(ChainMode::Quotient)));
    let mixed = (0..12).fold(start.clone(), |d, _| evolve_step(&d));
    g.bench_function("quotient evolve_step sparse", |b| b.iter(|| evolve_step(black_box(&start))));
    g.bench_function("quotient evolve_step dense", |b| b.iter(|| evolve_step(black_box(&mixed))));
    g.finish();
}

fn solver(c: &mut Criterion) {
    // building the databases takes a while; only benchmark when they are cached
    let Ok(Some(pdbs)) = PdbSet::load(&default_cache_dir()) else {
        eprintln!("pattern databases not cached; skipping solver benchmark (run `cubemix pdb build`)");
        return;
    };
    let mut g = c.benchmark_group("solver");
    g.sample_size(10);
    let mut rng = RngStream::new(3, 0);
    g.bench_function("solve_optimal depth 9 walk", |b| {
        b.iter_batched(
            || walk(&CubeState::SOLVED, 9, &mut rng),
            |x| solve_optimal(&x, &pdbs, Budget::UNLIMITED).unwrap().distance,
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

criterion_group!(benches, moves, coordinates, exact, solver);
criterion_main!(benches);
