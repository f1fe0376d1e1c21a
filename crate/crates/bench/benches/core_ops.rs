use criterion::{black_box, criterion_group, criterion_main, Criterion};

use resilnet_core::allocation::min_allocation;
use resilnet_core::harness::{run_scenario, PredictorKind, ScenarioConfig};
use resilnet_core::topology::{critical_nodes, vertex_connectivity, Topology};
use resilnet_core::{Belief, LinkModel};

fn allocation(c: &mut Criterion) {
    let link = LinkModel::new(10.0, 1.0, 1.0).unwrap();
    let belief = Belief::new(vec![0.0, 2.0, 8.0], vec![0.1, 0.15, 0.75]).unwrap();
    c.bench_function("min_allocation/3-state", |b| {
        b.iter(|| min_allocation(&link, black_box(&belief), 0.01, 64).unwrap())
    });
}

fn simulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_scenario/10k");
    group.sample_size(20);
    for kind in [PredictorKind::Oracle, PredictorKind::Markov, PredictorKind::Average] {
        let mut cfg = ScenarioConfig::reference(kind, 1, 10_000);
        cfg.warmup_slots = 1_000;
        group.bench_function(kind.as_str(), |b| b.iter(|| run_scenario(black_box(&cfg)).unwrap()));
    }
    group.finish();
}

fn graphs(c: &mut Criterion) {
    let grid = Topology::grid(8, 8).unwrap();
    c.bench_function("vertex_connectivity/grid8x8", |b| b.iter(|| vertex_connectivity(black_box(&grid)).unwrap()));
    c.bench_function("critical_nodes/grid8x8", |b| b.iter(|| critical_nodes(black_box(&grid)).unwrap()));
}

criterion_group!(benches, allocation, simulation, graphs);
criterion_main!(benches);
