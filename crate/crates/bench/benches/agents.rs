//! Agent training throughput on the standard maze size.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use dynah_core::{
    generate_maze, run_episode, AgentConfig, AgentKind, LearnedModel, MazeGenConfig, Position,
    QTable, RngStream, SquaredEuclidean,
};

fn bench_training(c: &mut Criterion) {
    let grid = generate_maze(&MazeGenConfig {
        height: 39,
        width: 36,
        start: Position::new(1, 4),
        goal: Position::new(28, 34),
        sigma: 0.3,
        seed: 7,
    })
    .unwrap();
    let cfg = AgentConfig::default();
    let h = SquaredEuclidean;

    let mut group = c.benchmark_group("train 20 episodes 39x36");
    for kind in AgentKind::ALL {
        group.bench_function(kind.name(), |b| {
            b.iter(|| {
                let mut q = QTable::zeros(&grid);
                let mut model = LearnedModel::empty(&grid);
                let mut rng = RngStream::from_seed(42);
                for _ in 0..20 {
                    run_episode(kind, &grid, &mut q, &mut model, Some(&h), &cfg, &mut rng)
                        .unwrap();
                }
                black_box(q)
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_training);
criterion_main!(benches);
